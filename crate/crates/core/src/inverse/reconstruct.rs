//! Volume density from localised Hilbert–Schmidt norms.
//!
//! The grid is cut into windows of `w` cells. For a left window `I` (in
//! `u = x + t`) and a right window `J` (in `w = x - t`) the localised norm
//! equals `μ(beam) / 8π^2`, and the beam is a lightlike square of spacetime
//! area `|I| |J| / 2`, so `8π^2 · HS^2 / (|I| |J| / 2)` is the mean of `f^2`
//! over the square.

use super::beam_volume;
use crate::error::{Error, Result};
use crate::geometry::region::{self, clip_all, Rect};
use crate::geometry::{Point, ValidatedDomain};
use crate::sigop::{HermitianOperator, OperatorMatrix};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionField {
    pub b: f64,
    pub window: usize,
    /// Windows per axis.
    pub blocks: usize,
    /// Side of one window in `u` and `w`.
    pub side: f64,
    /// `values[j][i]`: mean of `f^2` over `u ∈ I_i`, `w ∈ J_j`.
    pub values: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionAssessment {
    /// Fraction of windows where `value > 1/2` agrees with more than half
    /// of the window lying inside the domain.
    pub indicator_agreement: f64,
    /// Largest `|value - f^2| / f^2` at window centres, over windows
    /// entirely inside the domain.
    pub sup_relative_error: f64,
    /// `Σ value · |I| |J| / 2`.
    pub recovered_volume: f64,
    pub true_volume: f64,
}

impl ReconstructionField {
    pub fn center(&self, i: usize, j: usize) -> Point {
        Point::from_uw((i as f64 + 0.5) * self.side, (j as f64 + 0.5) * self.side)
    }

    fn window_uw(&self, i: usize, j: usize) -> ((f64, f64), (f64, f64)) {
        let s = self.side;
        ((i as f64 * s, (i + 1) as f64 * s), (j as f64 * s, (j + 1) as f64 * s))
    }

    /// Compare with the known geometry of `d`.
    pub fn assess(&self, d: &ValidatedDomain) -> Result<ReconstructionAssessment> {
        let cell = 0.5 * self.side * self.side;
        let (mut agree, mut sup, mut recovered) = (0usize, 0.0f64, 0.0);
        for j in 0..self.blocks {
            for i in 0..self.blocks {
                let v = self.values[j][i];
                recovered += v * cell;
                let (left, right) = self.window_uw(i, j);
                let coverage = region::area(&clip_all(d.traps(), &[Rect::new(left.0, left.1, right.0, right.1)])) / cell;
                if (v > 0.5) == (coverage > 0.5) {
                    agree += 1;
                }
                if coverage > 1.0 - 1e-12 {
                    let f = d.f(self.center(i, j));
                    sup = sup.max((v - f * f).abs() / (f * f));
                }
            }
        }
        Ok(ReconstructionAssessment {
            indicator_agreement: agree as f64 / (self.blocks * self.blocks) as f64,
            sup_relative_error: sup,
            recovered_volume: recovered,
            true_volume: d.total_volume()?,
        })
    }

    /// Exact window means from the geometry, for comparison.
    pub fn exact(d: &ValidatedDomain, blocks: usize) -> ReconstructionField {
        let side = d.b() / blocks as f64;
        let mut f = ReconstructionField { b: d.b(), window: 0, blocks, side, values: vec![vec![0.0; blocks]; blocks] };
        for j in 0..blocks {
            for i in 0..blocks {
                let (l, r) = f.window_uw(i, j);
                f.values[j][i] = beam_volume(d, l, r) / (0.5 * side * side);
            }
        }
        f
    }
}

/// Recover window means of `f^2` from a massless operator matrix.
pub fn reconstruct_volume_density(op: &OperatorMatrix, window: usize) -> Result<ReconstructionField> {
    if window < 2 {
        return Err(Error::WindowTooSmall(window));
    }
    let b_block = op
        .real_chiral_block()
        .ok_or_else(|| Error::NotChiral("reconstruction needs a massless operator".into()))?;
    let n = op.n();
    let blocks = n / window;
    if blocks == 0 {
        return Err(Error::WindowTooSmall(window));
    }
    let h = op.grid.h();
    let side = window as f64 * h;
    let scale = 8.0 * PI * PI / (0.5 * side * side);
    // block entries are (h / 4π) f(i^+) for flat and conformal operators alike
    let mut values = vec![vec![0.0; blocks]; blocks];
    for (j, row) in values.iter_mut().enumerate() {
        for (i, v) in row.iter_mut().enumerate() {
            let mut s = 0.0;
            for r in j * window..(j + 1) * window {
                for c in i * window..(i + 1) * window {
                    let e = b_block[(r, c)];
                    s += e * e;
                }
            }
            *v = scale * s;
        }
    }
    Ok(ReconstructionField { b: op.grid.b, window, blocks, side, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigop::build_flat_massless;

    #[test]
    fn triangle_indicator() {
        let d = ValidatedDomain::triangle(1.0);
        let op = build_flat_massless(&d, 128).unwrap();
        let f = reconstruct_volume_density(&op, 8).unwrap();
        let a = f.assess(&d).unwrap();
        assert!(a.indicator_agreement >= 0.98, "{a:?}");
        assert!((a.recovered_volume - 0.25).abs() < 0.03 * 0.25);
        assert!(a.sup_relative_error < 1e-12);
        assert_eq!(reconstruct_volume_density(&op, 1), Err(Error::WindowTooSmall(1)));
    }
}
