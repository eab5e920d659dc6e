//! Kernel of the massive signature operator,
//! `S(x, y) = 2π ∫_M k_m(-t, x - z) k_m(t, z - y) γ^0 dt dz`.
//!
//! Splitting `k_m` into its light-cone part and its regular part `K` gives
//! four kinds of contribution: the massless kernel, four line integrals
//! along the null rays through `(0, x)` and `(0, y)`, and one area integral
//! over the intersection of the two light cones with the domain. With
//! `A(p) = K(-t, x - z)` and `B(p) = K(t, z - y)`, in light-cone
//! coordinates the Minkowski squares are `(u - x)(x - w)` and
//! `(y - w)(u - y)`, so every integrand is smooth on its piece.

use super::{check_grid, from_dense, HermitianOperator, OperatorMatrix};
use crate::dirac::bessel::{j0, j1_over_x};
use crate::dirac::{GammaAlgebra, Grid, Mat2, C64};
use crate::error::{invariant, Error, Result};
use crate::geometry::region::{clip_all, Rect, Trap};
use crate::geometry::ValidatedDomain;
use crate::quad::{PanelRule, QuadratureSpec};
use nalgebra::DMatrix;
use rayon::prelude::*;
use std::f64::consts::PI;

/// `K(t, ξ)` given the precomputed square `s2 = t^2 - ξ^2 >= 0`.
#[inline]
fn k_reg(m: f64, t: f64, xi: f64, s2: f64) -> Mat2 {
    let e = if t > 0.0 { 1.0 } else if t < 0.0 { -1.0 } else { 0.0 };
    let z = m * s2.max(0.0).sqrt();
    let a = C64::new(0.0, -m / (4.0 * PI) * j0(z) * e);
    let b = -m * m / (4.0 * PI) * e * j1_over_x(z);
    Mat2::new(a, C64::new(b * (t - xi), 0.0), C64::new(b * (t + xi), 0.0), a)
}

struct KernelCtx<'a> {
    m: f64,
    traps: &'a [Trap],
    rule: PanelRule,
    b: f64,
    g0: Mat2,
    gu: Mat2,
    gv: Mat2,
    gug0: Mat2,
    gvg0: Mat2,
}

impl KernelCtx<'_> {
    /// `A(p)` at `(u, w)`.
    fn a(&self, x: f64, u: f64, w: f64) -> Mat2 {
        let (t, z) = (0.5 * (u - w), 0.5 * (u + w));
        k_reg(self.m, -t, x - z, (u - x) * (x - w))
    }

    /// `B(p)` at `(u, w)`.
    fn bm(&self, y: f64, u: f64, w: f64) -> Mat2 {
        let (t, z) = (0.5 * (u - w), 0.5 * (u + w));
        k_reg(self.m, t, z - y, (y - w) * (u - y))
    }

    /// Pieces of `{w : (u, w) ∈ M} ∩ [w0, w1]` at fixed `u`.
    fn w_slice(&self, u: f64, w0: f64, w1: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for tr in self.traps.iter().filter(|tr| u >= tr.u0 && u < tr.u1) {
            let (lo, hi) = (tr.lo(u).max(w0), tr.hi(u).min(w1));
            if hi > lo {
                out.push((lo, hi));
            }
        }
        out
    }

    /// Pieces of `{u : (u, w) ∈ M} ∩ [u0, u1]` at fixed `w`.
    fn u_slice(&self, w: f64, u0: f64, u1: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for tr in self.traps {
            // lo(u) <= w <= hi(u) on a sub-interval of [tr.u0, tr.u1]
            let (mut a, mut b) = (tr.u0.max(u0), tr.u1.min(u1));
            for (p0, p1, below) in [(tr.lo0, tr.lo1, true), (tr.hi0, tr.hi1, false)] {
                let slope = (p1 - p0) / (tr.u1 - tr.u0);
                // need p(u) <= w (below) or p(u) >= w
                if slope == 0.0 {
                    if (below && p0 > w) || (!below && p0 < w) {
                        b = a;
                    }
                    continue;
                }
                let cross = tr.u0 + (w - p0) / slope;
                let upper_side = (slope > 0.0) == below;
                if upper_side {
                    b = b.min(cross);
                } else {
                    a = a.max(cross);
                }
            }
            if b > a {
                out.push((a, b));
            }
        }
        out
    }

    fn entry(&self, x: f64, y: f64) -> Mat2 {
        let (b, g0) = (self.b, self.g0);
        let mut s = Mat2::zeros();
        let half = |on_diag: bool| if on_diag { 0.5 } else { 1.0 };
        let diag = x == y;

        // (1/2) γ^u ∫_{u = x} B γ^0 dt, dt = dw/2
        let mut line = Mat2::zeros();
        for (branch, lo, hi) in [(x >= y, 0.0, y), (x <= y, y, b)] {
            if !branch {
                continue;
            }
            let mut acc = Mat2::zeros();
            for (p, q) in self.w_slice(x, lo, hi) {
                self.rule.for_each(p, q, |w, wt| acc += self.bm(y, x, w) * C64::new(0.5 * wt, 0.0));
            }
            line += acc * C64::new(half(diag), 0.0);
        }
        s += self.gu * line * g0 * C64::new(0.5, 0.0);

        // (1/2) γ^v ∫_{w = x} B γ^0 dt, dt = du/2
        let mut line = Mat2::zeros();
        for (branch, lo, hi) in [(x <= y, y, b), (x >= y, 0.0, y)] {
            if !branch {
                continue;
            }
            let mut acc = Mat2::zeros();
            for (p, q) in self.u_slice(x, lo, hi) {
                self.rule.for_each(p, q, |u, wt| acc += self.bm(y, u, x) * C64::new(0.5 * wt, 0.0));
            }
            line += acc * C64::new(half(diag), 0.0);
        }
        s += self.gv * line * g0 * C64::new(0.5, 0.0);

        // (1/2) ∫_{u = y} A dt γ^u γ^0
        let mut line = Mat2::zeros();
        for (branch, lo, hi) in [(x <= y, 0.0, x), (x >= y, x, b)] {
            if !branch {
                continue;
            }
            let mut acc = Mat2::zeros();
            for (p, q) in self.w_slice(y, lo, hi) {
                self.rule.for_each(p, q, |w, wt| acc += self.a(x, y, w) * C64::new(0.5 * wt, 0.0));
            }
            line += acc * C64::new(half(diag), 0.0);
        }
        s += line * self.gug0 * C64::new(0.5, 0.0);

        // (1/2) ∫_{w = y} A dt γ^v γ^0
        let mut line = Mat2::zeros();
        for (branch, lo, hi) in [(x >= y, x, b), (x <= y, 0.0, x)] {
            if !branch {
                continue;
            }
            let mut acc = Mat2::zeros();
            for (p, q) in self.u_slice(y, lo, hi) {
                self.rule.for_each(p, q, |u, wt| acc += self.a(x, u, y) * C64::new(0.5 * wt, 0.0));
            }
            line += acc * C64::new(half(diag), 0.0);
        }
        s += line * self.gvg0 * C64::new(0.5, 0.0);

        // 2π ∫∫ A B γ^0 dt dz over both cone intersections; dt dz = du dw / 2
        let (lo, hi) = (x.min(y), x.max(y));
        let pieces = clip_all(self.traps, &[Rect::new(hi, b, 0.0, lo), Rect::new(0.0, lo, hi, b)]);
        let mut area = Mat2::zeros();
        for tr in &pieces {
            self.rule.for_each(tr.u0, tr.u1, |u, wu| {
                self.rule.for_each(tr.lo(u), tr.hi(u), |w, ww| {
                    area += self.a(x, u, w) * self.bm(y, u, w) * C64::new(0.5 * wu * ww, 0.0);
                });
            });
        }
        s += area * g0 * C64::new(2.0 * PI, 0.0);
        s
    }
}

/// Nyström matrix of the massive kernel on a cell-centred grid, symmetrised
/// after assembly. The kernel jumps across the diagonal `x = y`; diagonal
/// entries take the mean of the two one-sided limits.
pub fn build_massive_kernel(d: &ValidatedDomain, m: f64, n: usize, quad: &QuadratureSpec) -> Result<OperatorMatrix> {
    check_grid(n)?;
    if d.is_conformal() {
        return Err(invariant("the massive kernel is implemented for flat domains"));
    }
    if !(m >= 0.0 && m.is_finite()) {
        return Err(invariant("mass must be non-negative"));
    }
    if quad.resolution() < 8 {
        return Err(Error::QuadratureTooCoarse(format!("{} points per unit length", quad.resolution())));
    }
    let grid = Grid::new(n, d.b());
    let h = grid.h();
    let xs = grid.points();
    let base = super::build_flat_massless(d, n)?;
    let bblock = base.real_chiral_block().expect("massless operator is chiral").clone();
    let ctx = KernelCtx {
        m,
        traps: d.traps(),
        rule: PanelRule::new(quad, d.b()),
        b: d.b(),
        g0: GammaAlgebra::gamma0(),
        gu: GammaAlgebra::gamma_u(),
        gv: GammaAlgebra::gamma_v(),
        gug0: GammaAlgebra::gamma_u() * GammaAlgebra::gamma0(),
        gvg0: GammaAlgebra::gamma_v() * GammaAlgebra::gamma0(),
    };
    let rows: Vec<Vec<Mat2>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| if m == 0.0 { Mat2::zeros() } else { ctx.entry(xs[i], xs[j]) * C64::new(h, 0.0) }).collect())
        .collect();
    let mut raw = DMatrix::<C64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let e = rows[i][j];
            raw[(i, j)] = e[(0, 0)];
            raw[(i, n + j)] = e[(0, 1)] + C64::new(bblock[(j, i)], 0.0);
            raw[(n + i, j)] = e[(1, 0)] + C64::new(bblock[(i, j)], 0.0);
            raw[(n + i, n + j)] = e[(1, 1)];
        }
    }
    Ok(from_dense(grid, m, raw))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_mass_reduces_to_massless() {
        let d = ValidatedDomain::triangle(1.0);
        let op = build_massive_kernel(&d, 0.0, 16, &QuadratureSpec::gauss(6, 2)).unwrap();
        let flat = crate::sigop::build_flat_massless(&d, 16).unwrap();
        assert!((op.dense() - flat.dense()).norm() < 1e-15);
        assert_eq!(op.symmetrization_defect, 0.0);
    }

    #[test]
    fn kernel_is_nearly_hermitian_and_charge_symmetric() {
        let d = ValidatedDomain::diamond(1.0);
        let op = build_massive_kernel(&d, 1.0, 16, &QuadratureSpec::gauss(8, 2)).unwrap();
        assert!(op.symmetrization_defect < 1e-10, "{}", op.symmetrization_defect);
        // Γ conj(H) Γ = -H
        let h = op.dense();
        let n = 16;
        let mut worst: f64 = 0.0;
        for r in 0..2 * n {
            for c in 0..2 * n {
                let sign = if (r < n) == (c < n) { 1.0 } else { -1.0 };
                worst = worst.max((h[(r, c)].conj() * sign + h[(r, c)]).norm());
            }
        }
        assert!(worst < 1e-15, "{worst}");
    }

    #[test]
    fn u_slices_invert_w_slices() {
        let d = ValidatedDomain::triangle(1.0);
        let ctx = KernelCtx {
            m: 1.0,
            traps: d.traps(),
            rule: PanelRule::new(&QuadratureSpec::gauss(4, 1), 1.0),
            b: 1.0,
            g0: Mat2::zeros(),
            gu: Mat2::zeros(),
            gv: Mat2::zeros(),
            gug0: Mat2::zeros(),
            gvg0: Mat2::zeros(),
        };
        // triangle: w < u; at w = 0.3 the slice is u in (0.3, 1)
        let s: f64 = ctx.u_slice(0.3, 0.0, 1.0).iter().map(|(a, b)| b - a).sum();
        assert!((s - 0.7).abs() < 1e-15);
        let s: f64 = ctx.w_slice(0.3, 0.0, 1.0).iter().map(|(a, b)| b - a).sum();
        assert!((s - 0.3).abs() < 1e-15);
    }
}
