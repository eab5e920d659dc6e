//! Monte Carlo evaluation of the light-cone trace integrals.
//!
//! Points are drawn uniformly from the bounding square `(0, b)^2` in
//! light-cone coordinates, whose spacetime area is `b^2 / 2`. Every
//! estimator consumes the random streams in the same order, so estimators
//! sharing a seed see identical samples.

use crate::dirac::bessel::{j0, j1};
use crate::error::{invariant, Error, Result};
use crate::geometry::{diamond_curvature_integral, Estimate, Point, ValidatedDomain};
use crate::rng::{parallel_moments, unit2, Moments};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVariant {
    pub label: String,
    pub coefficient: f64,
    /// `theta` for the full constraint, `causal` for causally related pairs.
    pub region: String,
    pub value: f64,
    pub std_error: f64,
    /// Within three combined standard errors of the adopted estimate.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaTrace {
    pub q: u32,
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
    pub accepted: usize,
    /// Alternative normalisations of `tr S^4`, reported for comparison.
    pub variants: Vec<CoefficientVariant>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureRegion {
    ThetaRectangle,
    CausalOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassiveTrace {
    pub mass: f64,
    pub value: f64,
    pub std_error: f64,
    /// `μ / 4π^2`.
    pub volume_term: f64,
    /// `(m^2 / 8π^2) ∬ Θ`.
    pub m2_term: f64,
    /// `value - volume_term - m2_term` from the same samples.
    pub residual: f64,
    pub residual_std_error: f64,
    /// `-(m^4 / 32π^2) ∬ (ζ - ζ')^2 Θ`, the next order of the expansion.
    pub m4_term: f64,
    /// `(m / 4π^3) ∬ Θ / sqrt((ζ - ζ')^2)`.
    pub large_m_asymptote: f64,
}

#[inline]
fn draw(rng: &mut ChaCha8Rng, b: f64) -> Point {
    let (a, c) = unit2(rng);
    Point::from_uw(a * b, c * b)
}

/// `x^n` by repeated multiplication. Unlike `powi` it rounds identically
/// whether or not `n` is known at compile time.
fn ipow(x: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, _| acc * x)
}

/// `2 / (2π)^{2q} · 2^{-q} = 2 / (8π^2)^q`.
pub fn theta_coefficient(q: u32) -> f64 {
    2.0 / ipow(8.0 * PI * PI, q)
}

/// `tr S^{2q} = c_q ∫ Θ(ζ_1, ..., ζ_q) Π f(ζ_j) f(η_j) d^2ζ_1 ... d^2ζ_q` with
/// `η_j = (u_j, w_{j+1})`.
pub fn trace_theta_mc(d: &ValidatedDomain, q: u32, samples: usize, seed: u64) -> Result<ThetaTrace> {
    if q == 0 {
        return Err(invariant("q must be at least 1"));
    }
    if samples < 2 {
        return Err(invariant("need at least two samples"));
    }
    let b = d.b();
    let qn = q as usize;
    // slot 0: Θ-weight, 1: acceptance, 2: causal-pair weight (q = 2 only)
    let m = parallel_moments(samples, seed, 3, |rng, count, acc| {
        let mut z = vec![Point::new(0.0, 0.0); qn];
        for _ in 0..count {
            for p in z.iter_mut() {
                *p = draw(rng, b);
            }
            let mut w = 1.0;
            for j in 0..qn {
                let eta = Point::from_uw(z[j].u(), z[(j + 1) % qn].w());
                if !(d.contains(z[j]) && d.contains(eta)) {
                    w = 0.0;
                    break;
                }
                w *= d.f(z[j]) * d.f(eta);
            }
            acc[0].push(w);
            acc[1].push(if w != 0.0 { 1.0 } else { 0.0 });
            if qn == 2 {
                let c = if d.contains(z[0]) && d.contains(z[1]) && z[0].causal(&z[1]) {
                    (d.f(z[0]) * d.f(z[1])).powi(2)
                } else {
                    0.0
                };
                acc[2].push(c);
            }
        }
    });
    let accepted = m[1].sum.round() as usize;
    if accepted == 0 {
        return Err(Error::ZeroAcceptance);
    }
    let scale = ipow(0.5 * b * b, q);
    let coeff = theta_coefficient(q);
    let value = coeff * scale * m[0].mean();
    let std_error = coeff * scale * m[0].std_error();
    let mut variants = Vec::new();
    if q == 2 {
        let causal = (scale * m[2].mean(), scale * m[2].std_error());
        for (label, c) in [("1/(8 pi^2) over J(zeta)", 1.0 / (8.0 * PI * PI)), ("1/(8 pi^4) over J(zeta)", 1.0 / (8.0 * PI.powi(4)))] {
            let (v, s) = (c * causal.0, c * causal.1);
            variants.push(CoefficientVariant {
                label: label.into(),
                coefficient: c,
                region: "causal".into(),
                value: v,
                std_error: s,
                consistent: (v - value).abs() <= 3.0 * s.hypot(std_error),
            });
        }
    }
    Ok(ThetaTrace { q, value, std_error, samples, seed, accepted, variants })
}

/// `tr S^4` written with the curvature of the spanned light-cone
/// rectangle: `c_2 ∬ f(ζ)^2 f(ζ')^2 exp(¼ ∫_D R dμ)`. Over the full
/// Θ-region this is the same estimator as [`trace_theta_mc`] with `q = 2`;
/// `CausalOnly` drops spacelike pairs.
pub fn trace_s4_curvature(d: &ValidatedDomain, samples: usize, seed: u64, region: CurvatureRegion) -> Result<Estimate> {
    if samples < 2 {
        return Err(invariant("need at least two samples"));
    }
    let b = d.b();
    let m = parallel_moments(samples, seed, 1, |rng, count, acc| {
        for _ in 0..count {
            let z1 = draw(rng, b);
            let z2 = draw(rng, b);
            let w = if !(d.contains(z1) && d.contains(z2)) {
                0.0
            } else if region == CurvatureRegion::CausalOnly && !z1.causal(&z2) {
                0.0
            } else {
                match diamond_curvature_integral(d, z1, z2) {
                    Ok(r) => (d.f(z1) * d.f(z2)).powi(2) * (0.25 * r).exp(),
                    Err(_) => 0.0,
                }
            };
            acc[0].push(w);
        }
    });
    let (coeff, scale) = (theta_coefficient(2), ipow(0.5 * b * b, 2));
    Ok(Estimate { value: coeff * scale * m[0].mean(), std_error: coeff * scale * m[0].std_error() })
}

/// Hilbert–Schmidt norm of the massive operator,
/// `μ/4π^2 + (m^2/8π^2) ∬ (J_0^2 + J_1^2)(m sqrt((ζ - ζ')^2)) Θ((ζ - ζ')^2)`.
/// The mass term and its expansion pieces share samples, so the residual
/// after the `m^2` term carries only the `O(m^4)` part of the variance.
pub fn trace_s2_massive_mc(d: &ValidatedDomain, m: f64, samples: usize, seed: u64) -> Result<MassiveTrace> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(invariant("mass must be non-negative"));
    }
    if d.is_conformal() {
        return Err(invariant("the massive trace is implemented for flat domains"));
    }
    if samples < 2 {
        return Err(invariant("need at least two samples"));
    }
    let b = d.b();
    // slots: Θ, (J0²+J1²)Θ, (J0²+J1²-1)Θ, s²Θ, Θ/s
    let mo = parallel_moments(samples, seed, 5, |rng, count, acc| {
        for _ in 0..count {
            let z1 = draw(rng, b);
            let z2 = draw(rng, b);
            let s2 = if d.contains(z1) && d.contains(z2) { -(z1.u() - z2.u()) * (z1.w() - z2.w()) } else { 0.0 };
            if s2 > 0.0 {
                let z = m * s2.sqrt();
                let (a, c) = (j0(z), j1(z));
                let g = a * a + c * c;
                acc[0].push(1.0);
                acc[1].push(g);
                acc[2].push(g - 1.0);
                acc[3].push(s2);
                acc[4].push(1.0 / s2.sqrt());
            } else {
                for a in acc.iter_mut() {
                    a.push(0.0);
                }
            }
        }
    });
    let area2 = (0.5 * b * b).powi(2);
    let c2 = m * m / (8.0 * PI * PI) * area2;
    let est = |x: &Moments| (x.mean(), x.std_error());
    let volume_term = d.total_volume()? / (4.0 * PI * PI);
    let (full, full_se) = est(&mo[1]);
    let (res, res_se) = est(&mo[2]);
    Ok(MassiveTrace {
        mass: m,
        value: volume_term + c2 * full,
        std_error: c2 * full_se,
        volume_term,
        m2_term: c2 * mo[0].mean(),
        residual: c2 * res,
        residual_std_error: c2 * res_se,
        m4_term: -m.powi(4) / (32.0 * PI * PI) * area2 * mo[3].mean(),
        large_m_asymptote: m / (4.0 * PI.powi(3)) * area2 * mo[4].mean(),
    })
}
