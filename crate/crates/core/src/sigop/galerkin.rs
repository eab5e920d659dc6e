//! Plane-wave compression of the signature operator.
//!
//! On the Cauchy interval `(0, b)` with periodic momenta `p = 2πk/b`, the
//! free Dirac Hamiltonian `h(p) = [[-p, m], [m, p]]` has eigenvectors `s`
//! and energies `E = ±sqrt(p^2 + m^2)`. The solutions
//! `ψ = s e^{-iEt + ipx} / sqrt(2πb)` are orthonormal for the scalar product
//! `2π ∫ ψ^† φ dx`, and the matrix of the signature operator in this basis
//! is `∫_M ≺ψ_a|ψ_b≻ dt dx`, which only needs Fourier transforms of the
//! domain's indicator function.

use super::HermitianOperator;
use crate::dirac::{GammaAlgebra, Spinor, C64};
use crate::error::{invariant, Result};
use crate::geometry::{Point, ValidatedDomain};
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Compressed operator on `2 (2 k_max + 1)` plane waves.
#[derive(Clone, Debug)]
pub struct GalerkinOperator {
    pub mass: f64,
    pub k_max: usize,
    /// `(p, E)` for each basis function, in matrix order.
    pub modes: Vec<(f64, f64)>,
    matrix: DMatrix<C64>,
}

impl HermitianOperator for GalerkinOperator {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn dense(&self) -> DMatrix<C64> {
        self.matrix.clone()
    }
}

/// `(e^{iθ} - 1) / (iθ)`.
fn phi(theta: f64) -> C64 {
    if theta.abs() < 1e-4 {
        let t2 = theta * theta;
        C64::new(1.0 - t2 / 6.0 + t2 * t2 / 120.0, theta / 2.0 - theta * t2 / 24.0)
    } else {
        (C64::from_polar(1.0, theta) - 1.0) / C64::new(0.0, theta)
    }
}

/// `∫_P e^{i(α t + β x)} dt dx` over polygons given counter-clockwise in
/// the `(x, t)` plane, by the divergence theorem edge by edge.
pub fn polygon_fourier(polys: &[Vec<Point>], alpha: f64, beta: f64) -> C64 {
    let k2 = alpha * alpha + beta * beta;
    let mut total = C64::new(0.0, 0.0);
    for poly in polys {
        let n = poly.len();
        if k2 < 1e-16 {
            // shoelace
            let mut a = 0.0;
            for i in 0..n {
                let (p, q) = (poly[i], poly[(i + 1) % n]);
                a += p.x * q.t - q.x * p.t;
            }
            total += 0.5 * a;
            continue;
        }
        for i in 0..n {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            let (dx, dt) = (q.x - p.x, q.t - p.t);
            // outward normal scaled by the edge length: (dt, -dx) in (x, t)
            let kn = beta * dt - alpha * dx;
            let phase = C64::from_polar(1.0, beta * p.x + alpha * p.t);
            total += C64::new(0.0, -kn / k2) * phase * phi(beta * dx + alpha * dt);
        }
    }
    total
}

/// Unit eigenvectors of `h(p)` for `E = +ω` and `E = -ω`.
fn eigenvectors(p: f64, m: f64) -> [(f64, Spinor); 2] {
    let w = (p * p + m * m).sqrt();
    let pick = |a: (f64, f64), b: (f64, f64)| {
        let (na, nb) = (a.0.hypot(a.1), b.0.hypot(b.1));
        let (v, n) = if na >= nb { (a, na) } else { (b, nb) };
        Spinor::new(C64::new(v.0 / n, 0.0), C64::new(v.1 / n, 0.0))
    };
    if w == 0.0 {
        return [
            (0.0, Spinor::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0))),
            (0.0, Spinor::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0))),
        ];
    }
    [(w, pick((m, w + p), (w - p, m))), (-w, pick((w + p, -m), (m, p - w)))]
}

/// Galerkin matrix of the massive signature operator of a flat domain.
pub fn build_massive_galerkin(d: &ValidatedDomain, m: f64, k_max: usize) -> Result<GalerkinOperator> {
    if d.is_conformal() {
        return Err(invariant("the plane-wave compression needs a flat domain"));
    }
    if !(m >= 0.0 && m.is_finite()) {
        return Err(invariant("mass must be non-negative"));
    }
    let b = d.b();
    let polys = d.base().polygons();
    let mut modes = Vec::new();
    let mut spinors = Vec::new();
    for k in -(k_max as i64)..=k_max as i64 {
        let p = 2.0 * PI * k as f64 / b;
        for (e, s) in eigenvectors(p, m) {
            modes.push((p, e));
            spinors.push(s);
        }
    }
    let dim = modes.len();
    let g0 = GammaAlgebra::gamma0();
    let norm = 1.0 / (2.0 * PI * b);
    let mut g = DMatrix::<C64>::zeros(dim, dim);
    for a in 0..dim {
        for c in a..dim {
            let spin = spinors[a].dotc(&(g0 * spinors[c]));
            if spin.norm() == 0.0 {
                continue;
            }
            let f = polygon_fourier(&polys, modes[a].1 - modes[c].1, modes[c].0 - modes[a].0);
            let v = spin * f * norm;
            g[(a, c)] = v;
            g[(c, a)] = v.conj();
        }
        g[(a, a)] = C64::new(g[(a, a)].re, 0.0);
    }
    Ok(GalerkinOperator { mass: m, k_max, modes, matrix: g })
}
