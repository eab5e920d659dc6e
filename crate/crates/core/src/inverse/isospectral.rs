//! A pair of three-cell simple domains with isospectral signature operators.
//!
//! `T = [[a, √(ab), 0], [0, b, √(bc)], [0, 0, c]]` belongs to the domain
//! with the top corner cell removed, `T̃` with parameters `(1, 1, δ)` to the
//! full three-cell staircase. Equal determinants fix `c = δ / (ab)`; the two
//! remaining characteristic-polynomial conditions are reduced to a
//! quadratic in `b` and a scalar equation in `a`.

use crate::error::{Error, Result};
use crate::geometry::SimpleDomain;
use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsospectralPair {
    pub delta: f64,
    pub params_t: (f64, f64, f64),
    pub params_ttilde: (f64, f64, f64),
    /// Eigenvalues of `T*T` and `T̃*T̃`, ascending.
    pub spectrum_t: Vec<f64>,
    pub spectrum_ttilde: Vec<f64>,
    pub spectrum_difference: f64,
    /// Largest difference between the characteristic polynomial coefficients.
    pub charpoly_difference: f64,
    pub domain_t: SimpleDomain,
    pub domain_ttilde: SimpleDomain,
    /// `1 + sqrt(5δ/8)`, the leading-order location of `a`.
    pub a_asymptote: f64,
    /// Length of the Cauchy line `t = 0`, the longest spacelike curve.
    pub spacelike_length_t: f64,
    pub spacelike_length_ttilde: f64,
    /// `a + b + c` and `2 + δ`: the same lengths in units of `√2`.
    pub parameter_sum_t: f64,
    pub parameter_sum_ttilde: f64,
}

fn t_matrix(a: f64, b: f64, c: f64, corner: bool) -> Matrix3<f64> {
    let top = if corner { (a * c).sqrt() } else { 0.0 };
    Matrix3::new(a, (a * b).sqrt(), top, 0.0, b, (b * c).sqrt(), 0.0, 0.0, c)
}

fn eq1(a: f64, b: f64, d: f64) -> f64 {
    -1.0 + a * a * b * b - d + a * d + b * d - 3.0 * d * d + d * d / (a * a) + d * d / (b * b) + d * d / (a * b)
}

/// Root of `(δ - a^3) b^2 + B b + δ^2 / a = 0` that equals 1 at `δ = 0, a = 1`.
fn b_of_a(a: f64, d: f64) -> f64 {
    let qa = d - a.powi(3);
    let qb = 3.0 * a * a - a.powi(4) + 2.0 * d * a * a + d * d * a * a - 1.0 - d - 3.0 * d * d + d * d / (a * a);
    let qc = d * d / a;
    let disc = qb * qb - 4.0 * qa * qc;
    // (-B - √disc) / 2A, rewritten to avoid cancellation when A < 0 and B > 0
    let s = disc.sqrt();
    if qb >= 0.0 {
        (-qb - s) / (2.0 * qa)
    } else {
        2.0 * qc / (-qb + s)
    }
}

fn charpoly(m: &Matrix3<f64>) -> [f64; 3] {
    let tr = m.trace();
    let tr2 = (m * m).trace();
    [tr, 0.5 * (tr * tr - tr2), m.determinant()]
}

fn staircase(widths: [f64; 3], corner: bool) -> SimpleDomain {
    let mut cells = vec![(0, 1), (1, 2)];
    if corner {
        cells.push((0, 2));
    }
    SimpleDomain::from_widths(&widths, &cells)
}

pub fn isospectral_pair(delta: f64) -> Result<IsospectralPair> {
    if !(delta > 0.0 && delta <= 0.05) {
        return Err(crate::error::invariant("delta must lie in (0, 0.05]"));
    }
    let g = |a: f64| eq1(a, b_of_a(a, delta), delta);
    let (mut lo, mut hi) = (1.0, 1.0 + 2.0 * delta.sqrt());
    let (glo, ghi) = (g(lo), g(hi));
    if !(glo.is_finite() && ghi.is_finite()) || glo.signum() == ghi.signum() {
        return Err(Error::RootNotFound(format!("no sign change on [{lo}, {hi}]")));
    }
    // Newton with bisection safeguard
    let mut a = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..200 {
        let ga = g(a);
        if ga == 0.0 {
            converged = true;
            break;
        }
        if ga.signum() == glo.signum() {
            lo = a;
        } else {
            hi = a;
        }
        let h = 1e-7 * a;
        let slope = (g(a + h) - g(a - h)) / (2.0 * h);
        let newton = a - ga / slope;
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - a).abs() < 1e-15 * a || hi - lo < 1e-15 {
            a = next;
            converged = true;
            break;
        }
        a = next;
    }
    if !converged {
        return Err(Error::RootNotFound("Newton iteration did not converge".into()));
    }
    let b = b_of_a(a, delta);
    let c = delta / (a * b);
    let t = t_matrix(a, b, c, false);
    let tt = t_matrix(1.0, 1.0, delta, true);
    let (m, mt) = (t.transpose() * t, tt.transpose() * tt);
    let sorted = |x: Matrix3<f64>| {
        let mut v: Vec<f64> = SymmetricEigen::new(x).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let (spectrum_t, spectrum_ttilde) = (sorted(m), sorted(mt));
    let spectrum_difference = spectrum_t.iter().zip(&spectrum_ttilde).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let (p, q) = (charpoly(&m), charpoly(&mt));
    let charpoly_difference = p.iter().zip(&q).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let domain_t = staircase([SQRT_2 * a, SQRT_2 * b, SQRT_2 * c], false);
    let domain_ttilde = staircase([SQRT_2, SQRT_2, SQRT_2 * delta], true);
    Ok(IsospectralPair {
        delta,
        params_t: (a, b, c),
        params_ttilde: (1.0, 1.0, delta),
        spectrum_t,
        spectrum_ttilde,
        spectrum_difference,
        charpoly_difference,
        spacelike_length_t: domain_t.b(),
        spacelike_length_ttilde: domain_ttilde.b(),
        domain_t,
        domain_ttilde,
        a_asymptote: 1.0 + (5.0 * delta / 8.0).sqrt(),
        parameter_sum_t: a + b + c,
        parameter_sum_ttilde: 2.0 + delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{validate_domain, Domain};

    #[test]
    fn reduction_is_consistent() {
        // at δ = 0 the branch passes through (a, b) = (1, 1)
        assert!((b_of_a(1.0, 0.0) - 1.0).abs() < 1e-15);
        // second condition holds along the branch
        let (a, d) = (1.05, 0.01);
        let b = b_of_a(a, d);
        let eq2 = 3.0 - a * a - a * b - b * b + 2.0 * d - d / a + d * d - d * d / (a * a * b * b);
        assert!((eq2 * a * a + eq1(a, b, d)).abs() < 1e-13);
    }

    #[test]
    fn pair_is_isospectral_and_valid() {
        let p = isospectral_pair(0.01).unwrap();
        assert!(p.spectrum_difference < 1e-10, "{}", p.spectrum_difference);
        assert!(p.charpoly_difference < 1e-10);
        let (a, b, c) = p.params_t;
        assert!((a * b * c - 0.01).abs() < 1e-15);
        // the domains realise the matrices
        let t = p.domain_t.t_matrix();
        assert!((t[0][1] - (a * b).sqrt()).abs() < 1e-14 && t[0][2] == 0.0);
        for s in [p.domain_t, p.domain_ttilde] {
            validate_domain(Domain::Simple(s)).unwrap();
        }
    }
}
