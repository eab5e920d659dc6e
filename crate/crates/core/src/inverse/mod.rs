//! Geometry read off from the spectrum: curve-length bounds, isospectral
//! simple domains, localised Hilbert–Schmidt norms and reconstruction of
//! the volume density.

mod isospectral;
mod reconstruct;

pub use isospectral::{isospectral_pair, IsospectralPair};
pub use reconstruct::{reconstruct_volume_density, ReconstructionAssessment, ReconstructionField};

use crate::error::{invariant, Error, Result};
use crate::geometry::region::{self, clip_all, Rect, TrapIntegrator};
use crate::geometry::{conformal_curve_length, CausalType, CurveSample, Point, SimpleDomain, ValidatedDomain};
use crate::sigop::OperatorMatrix;
use crate::spectral::SpectrumReport;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Spectral quantity against the geometric bound `ℓ / 4π`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub spectral: f64,
    pub length: f64,
    pub bound: f64,
    /// `spectral - bound`.
    pub margin: f64,
}

const INTERIOR_SAMPLES: usize = 16;

fn checked_length(d: &ValidatedDomain, c: &CurveSample, kind: CausalType) -> Result<f64> {
    if c.points.len() < 2 {
        return Err(invariant("a curve needs at least two points"));
    }
    if c.interior_samples(INTERIOR_SAMPLES).into_iter().any(|p| !d.contains(p)) {
        return Err(Error::CurveLeavesDomain);
    }
    let l = conformal_curve_length(d, c)?;
    if l.kind != kind {
        return Err(invariant(format!("expected a {kind:?} curve, got {:?}", l.kind)));
    }
    Ok(l.length)
}

/// `λ_1 >= ℓ / 4π` for a timelike curve in the domain.
pub fn bound_timelike(report: &SpectrumReport, d: &ValidatedDomain, c: &CurveSample) -> Result<BoundCheck> {
    let length = checked_length(d, c, CausalType::Timelike)?;
    let bound = length / (4.0 * PI);
    let spectral = report.largest();
    Ok(BoundCheck { spectral, length, bound, margin: spectral - bound })
}

/// `tr S_+ >= ℓ / 4π` for a spacelike curve in the domain.
pub fn bound_spacelike(report: &SpectrumReport, d: &ValidatedDomain, c: &CurveSample) -> Result<BoundCheck> {
    let length = checked_length(d, c, CausalType::Spacelike)?;
    let bound = length / (4.0 * PI);
    let spectral = report.positive_trace;
    Ok(BoundCheck { spectral, length, bound, margin: spectral - bound })
}

/// Test curves of a simple domain: the timelike and spacelike diagonals of
/// every lightlike rectangle made of included cells, plus the Cauchy line.
pub fn cell_diagonal_curves(s: &SimpleDomain) -> (Vec<CurveSample>, Vec<CurveSample>) {
    let k = s.cells();
    let bp = &s.breakpoints;
    let (mut timelike, mut spacelike) = (Vec::new(), Vec::new());
    for k0 in 0..k {
        for k1 in k0..k {
            for l0 in 0..k {
                for l1 in l0..k {
                    if !(k0..=k1).all(|a| (l0..=l1).all(|c| s.incidence[a][c])) {
                        continue;
                    }
                    let (w0, w1, u0, u1) = (bp[k0], bp[k1 + 1], bp[l0], bp[l1 + 1]);
                    timelike.push(CurveSample::segment(Point::from_uw(u0, w1), Point::from_uw(u1, w0)));
                    spacelike.push(CurveSample::segment(Point::from_uw(u0, w0), Point::from_uw(u1, w1)));
                }
            }
        }
    }
    spacelike.push(CurveSample::segment(Point::new(0.0, 0.0), Point::new(0.0, s.b())));
    (timelike, spacelike)
}

/// `‖π_{L,I} S π_{R,J}‖_HS^2`. A grid point belongs to `[a, b)` when its
/// cell centre does, so adjacent intervals tile exactly.
pub fn localized_hs_norm(op: &OperatorMatrix, left: (f64, f64), right: (f64, f64)) -> Result<f64> {
    if !op.is_chiral() {
        return Err(Error::NotChiral("localisation needs a massless operator".into()));
    }
    op.localized_hs(left, right)
}

/// Volume of `{x + t ∈ left, x - t ∈ right}` within the domain, exact for
/// flat domains and by Gauss–Legendre quadrature of `f^2` otherwise.
pub fn beam_volume(d: &ValidatedDomain, left: (f64, f64), right: (f64, f64)) -> f64 {
    let pieces = clip_all(d.traps(), &[Rect::new(left.0, left.1, right.0, right.1)]);
    if !d.is_conformal() {
        return region::area(&pieces);
    }
    TrapIntegrator::new(10, 4).integrate(&pieces, 0.0, |t, x| {
        let f = d.f(Point::new(t, x));
        f * f
    })
}
