//! Dirac equation in 1+1 dimensions: gamma matrices, the causal propagator
//! and Cauchy evolution of sampled spinor data.
//!
//! Spinors are `(ψ_L, ψ_R)`. Massless left movers depend on `x + t`, right
//! movers on `x - t`.

pub mod bessel;
mod evolve;

pub use evolve::{
    charge_conjugate, evolve_massive, evolve_massless, group_property_defect, norm_drift, reference_datum,
    slice_norm, FnData, Grid, InitialData, NormDrift, SpinorField,
};

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use std::f64::consts::PI;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Spinor = Vector2<C64>;

const fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// The Dirac matrices and derived projectors.
pub struct GammaAlgebra;

impl GammaAlgebra {
    pub fn gamma0() -> Mat2 {
        Mat2::new(c(0.0), c(1.0), c(1.0), c(0.0))
    }

    pub fn gamma1() -> Mat2 {
        Mat2::new(c(0.0), c(1.0), c(-1.0), c(0.0))
    }

    /// `γ^u = γ^0 + γ^1`
    pub fn gamma_u() -> Mat2 {
        Self::gamma0() + Self::gamma1()
    }

    /// `γ^v = γ^0 - γ^1`
    pub fn gamma_v() -> Mat2 {
        Self::gamma0() - Self::gamma1()
    }

    /// Pseudoscalar `Γ = diag(-1, 1)`.
    pub fn pseudo_scalar() -> Mat2 {
        Mat2::new(c(-1.0), c(0.0), c(0.0), c(1.0))
    }

    pub fn chi_l() -> Mat2 {
        Mat2::new(c(1.0), c(0.0), c(0.0), c(0.0))
    }

    pub fn chi_r() -> Mat2 {
        Mat2::new(c(0.0), c(0.0), c(0.0), c(1.0))
    }

    /// Adjoint with respect to the spin product: `γ^0 A^† γ^0`.
    pub fn spin_adjoint(a: &Mat2) -> Mat2 {
        let g = Self::gamma0();
        g * a.adjoint() * g
    }
}

/// Indefinite inner product `≺ψ|φ≻ = <ψ, γ^0 φ>`.
pub fn spin_product(psi: &Spinor, phi: &Spinor) -> C64 {
    psi.dotc(&(GammaAlgebra::gamma0() * phi))
}

/// `ε(t)` with `ε(0) = 0`.
#[inline]
pub fn sign(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Regular part of the causal propagator `k_m` at `(t, x)`: zero outside the
/// closed light cone and at `t = 0`.
pub fn km_regular(m: f64, t: f64, x: f64) -> Mat2 {
    let (a, b) = km_coefficients(m, t, x);
    // a·1 + b (t γ^0 - x γ^1)
    Mat2::new(a, c(b * (t - x)), c(b * (t + x)), a)
}

/// `(a, b)` with `k_reg = a·1 + b (t γ^0 - x γ^1)`.
#[inline]
pub(crate) fn km_coefficients(m: f64, t: f64, x: f64) -> (C64, f64) {
    let s2 = t * t - x * x;
    let e = sign(t);
    if s2 < 0.0 || e == 0.0 || m == 0.0 {
        return (c(0.0), 0.0);
    }
    let z = m * s2.sqrt();
    let a = C64::new(0.0, -m / (4.0 * PI) * bessel::j0(z) * e);
    // J_1(m s)/s = m · (J_1(z)/z)
    let b = -m / (4.0 * PI) * e * m * bessel::j1_over_x(z);
    (a, b)
}

/// Massless propagator coefficients of the two light-cone deltas:
/// `k_0 = (1/4π) (γ^u δ(t + x) + γ^v δ(t - x))`.
pub fn km_singular_weights() -> (Mat2, Mat2) {
    (GammaAlgebra::gamma_u() / c(4.0 * PI), GammaAlgebra::gamma_v() / c(4.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat2, b: &Mat2) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn clifford_relations() {
        let (g0, g1) = (GammaAlgebra::gamma0(), GammaAlgebra::gamma1());
        let one = Mat2::identity();
        assert!(close(&(g0 * g0), &one));
        assert!(close(&(g1 * g1), &(-one)));
        assert!(close(&(g0 * g1 + g1 * g0), &Mat2::zeros()));
        let (gu, gv) = (GammaAlgebra::gamma_u(), GammaAlgebra::gamma_v());
        assert!(close(&(gu * gu), &Mat2::zeros()));
        assert!(close(&(gv * gv), &Mat2::zeros()));
        assert!(close(&(gu * gv + gv * gu), &(one * c(4.0))));
        assert!(close(&(gu * gv), &(GammaAlgebra::chi_l() * c(4.0))));
        assert!(close(&(gv * gu), &(GammaAlgebra::chi_r() * c(4.0))));
        let g = GammaAlgebra::pseudo_scalar();
        assert!(close(&(g * g0 + g0 * g), &Mat2::zeros()));
        assert!(close(&(g * g1 + g1 * g), &Mat2::zeros()));
    }

    #[test]
    fn gammas_are_spin_symmetric() {
        for g in [GammaAlgebra::gamma0(), GammaAlgebra::gamma1()] {
            assert!(close(&GammaAlgebra::spin_adjoint(&g), &g));
        }
    }

    #[test]
    fn propagator_symmetry_and_axis_value() {
        let m = 1.3;
        for &(t, x) in &[(0.7, 0.2), (0.4, -0.39), (1.0, 0.0), (0.3, 0.5)] {
            let k = km_regular(m, t, x);
            let km = km_regular(m, -t, -x);
            assert!(close(&km, &GammaAlgebra::spin_adjoint(&k)));
        }
        let t = 0.8;
        let axis = km_regular(m, t, 0.0);
        let expect = Mat2::identity() * C64::new(0.0, -m / (4.0 * PI) * bessel::j0(m * t))
            - GammaAlgebra::gamma0() * c(m / (4.0 * PI) * bessel::j1(m * t));
        assert!(close(&axis, &expect));
        assert!(close(&km_regular(m, 0.0, 0.0), &Mat2::zeros()));
        assert!(close(&km_regular(m, 0.2, 0.5), &Mat2::zeros()));
    }

    #[test]
    fn spin_product_is_indefinite() {
        let l = Spinor::new(c(1.0), c(0.0));
        let r = Spinor::new(c(0.0), c(1.0));
        assert_eq!(spin_product(&l, &l), c(0.0));
        assert_eq!(spin_product(&l, &r), c(1.0));
        let s = Spinor::new(c(1.0), c(-1.0));
        assert_eq!(spin_product(&s, &s), c(-2.0));
    }
}
