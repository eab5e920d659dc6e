use super::{km_coefficients, C64};
use crate::error::{Error, Result};
use crate::quad::{PanelRule, QuadratureSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Cell-centred grid on `(0, b)`: `x_i = (i + 1/2) b / n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub b: f64,
}

impl Grid {
    pub fn new(n: usize, b: f64) -> Grid {
        Grid { n, b }
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.b / self.n as f64
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }
}

/// Anything that can be evaluated as Cauchy data on `(0, b)`.
pub trait InitialData: Sync {
    fn value(&self, x: f64) -> [C64; 2];
}

/// Spinor samples on a grid. Evaluated between samples by linear
/// interpolation, constant in the outer half cells and zero off `(0, b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinorField {
    pub grid: Grid,
    pub left: Vec<C64>,
    pub right: Vec<C64>,
}

/// Cauchy data given by a closure.
pub struct FnData<F: Fn(f64) -> [C64; 2] + Sync>(pub F);

impl<F: Fn(f64) -> [C64; 2] + Sync> InitialData for FnData<F> {
    fn value(&self, x: f64) -> [C64; 2] {
        (self.0)(x)
    }
}

impl SpinorField {
    pub fn zeros(grid: Grid) -> SpinorField {
        SpinorField { grid, left: vec![C64::new(0.0, 0.0); grid.n], right: vec![C64::new(0.0, 0.0); grid.n] }
    }

    pub fn sample(grid: Grid, data: &impl InitialData) -> SpinorField {
        let (left, right) = (0..grid.n).map(|i| {
            let v = data.value(grid.x(i));
            (v[0], v[1])
        }).unzip();
        SpinorField { grid, left, right }
    }

    fn interp(&self, vals: &[C64], x: f64) -> C64 {
        let g = self.grid;
        if x <= 0.0 || x >= g.b {
            return C64::new(0.0, 0.0);
        }
        let s = x / g.h() - 0.5;
        if s <= 0.0 {
            return vals[0];
        }
        if s >= (g.n - 1) as f64 {
            return vals[g.n - 1];
        }
        let i = s.floor() as usize;
        let a = s - i as f64;
        vals[i] * (1.0 - a) + vals[i + 1] * a
    }

    pub fn max_abs(&self) -> (f64, f64) {
        let m = |v: &[C64]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        (m(&self.left), m(&self.right))
    }
}

impl InitialData for SpinorField {
    fn value(&self, x: f64) -> [C64; 2] {
        [self.interp(&self.left, x), self.interp(&self.right, x)]
    }
}

/// `(ψ|ψ) = 2π ∫ |ψ|^2 dx` by the midpoint rule.
pub fn slice_norm(f: &SpinorField) -> f64 {
    let s: f64 = f.left.iter().chain(&f.right).map(|z| z.norm_sqr()).sum();
    2.0 * PI * f.grid.h() * s
}

/// `Γ ψ̄ = (-conj ψ_L, conj ψ_R)`.
pub fn charge_conjugate(f: &SpinorField) -> SpinorField {
    SpinorField {
        grid: f.grid,
        left: f.left.iter().map(|z| -z.conj()).collect(),
        right: f.right.iter().map(|z| z.conj()).collect(),
    }
}

/// Exact transport along characteristics.
pub fn evolve_massless(f: &SpinorField, t: f64) -> SpinorField {
    let g = f.grid;
    SpinorField {
        grid: g,
        left: (0..g.n).map(|i| f.interp(&f.left, g.x(i) + t)).collect(),
        right: (0..g.n).map(|i| f.interp(&f.right, g.x(i) - t)).collect(),
    }
}

/// `ψ(t, x) = 2π ∫ k_m(t, x - y) γ^0 ψ(0, y) dy` on the grid points. The
/// light-cone deltas give transport; the regular part is integrated over
/// `|x - y| < |t|`, which is also where the integrand is smooth.
pub fn evolve_massive(
    init: &impl InitialData,
    grid: Grid,
    t: f64,
    m: f64,
    quad: &QuadratureSpec,
) -> Result<SpinorField> {
    if quad.resolution() < grid.n {
        return Err(Error::QuadratureTooCoarse(format!(
            "{} quadrature points per slice for a grid of {}",
            quad.resolution(),
            grid.n
        )));
    }
    let rule = PanelRule::new(quad, grid.b);
    let at = t.abs();
    let vals: Vec<[C64; 2]> = (0..grid.n)
        .into_par_iter()
        .map(|i| {
            let x = grid.x(i);
            let mut l = init.value(x + t)[0];
            let mut r = init.value(x - t)[1];
            if m != 0.0 && t != 0.0 {
                let (lo, hi) = ((x - at).max(0.0), (x + at).min(grid.b));
                let mut acc = [C64::new(0.0, 0.0); 2];
                rule.for_each(lo, hi, |y, w| {
                    let xi = x - y;
                    let (a, b) = km_coefficients(m, t, xi);
                    let [pl, pr] = init.value(y);
                    // (a + b (t γ^0 - ξ γ^1)) γ^0 (pl, pr)
                    acc[0] += (a * pr + pl * (b * (t - xi))) * w;
                    acc[1] += (a * pl + pr * (b * (t + xi))) * w;
                });
                l += acc[0] * (2.0 * PI);
                r += acc[1] * (2.0 * PI);
            }
            [l, r]
        })
        .collect();
    Ok(SpinorField { grid, left: vals.iter().map(|v| v[0]).collect(), right: vals.iter().map(|v| v[1]).collect() })
}

/// Smooth compactly supported reference data: a left-moving bump on
/// `(0.25 b, 0.65 b)` and an imaginary right-moving bump on `(0.35 b, 0.75 b)`.
pub fn reference_datum(b: f64) -> FnData<impl Fn(f64) -> [C64; 2] + Sync> {
    let bump = move |x: f64, c: f64| {
        let r = (x - c * b) / (0.2 * b);
        if r.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - r * r)).exp()
        }
    };
    FnData(move |x| [C64::new(bump(x, 0.45), 0.0), C64::new(0.0, bump(x, 0.55))])
}

/// Maximum deviation between propagating the sampled reference data by
/// `t1 + t2` in one step and by `t1` then `t2`.
pub fn group_property_defect(m: f64, t1: f64, t2: f64, grid: Grid, quad: &QuadratureSpec) -> Result<f64> {
    let data = SpinorField::sample(grid, &reference_datum(grid.b));
    let one = evolve_massive(&data, grid, t1 + t2, m, quad)?;
    let mid = evolve_massive(&data, grid, t1, m, quad)?;
    let two = evolve_massive(&mid, grid, t2, m, quad)?;
    let d = one
        .left
        .iter()
        .zip(&two.left)
        .chain(one.right.iter().zip(&two.right))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(d)
}

/// Norm of evolved reference data against its initial norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormDrift {
    pub initial: f64,
    pub evolved: f64,
    pub drift: f64,
    /// Change of the evolved norm when the slice grid and the kernel
    /// quadrature are both refined twofold.
    pub quadrature_error: f64,
}

pub fn norm_drift(m: f64, t: f64, grid: Grid, quad: &QuadratureSpec) -> Result<NormDrift> {
    let data = reference_datum(grid.b);
    let initial = slice_norm(&SpinorField::sample(grid, &data));
    let evolved = slice_norm(&evolve_massive(&data, grid, t, m, quad)?);
    let fine_grid = Grid::new(2 * grid.n, grid.b);
    let fine = slice_norm(&evolve_massive(&data, fine_grid, t, m, &quad.refined())?);
    Ok(NormDrift { initial, evolved, drift: (evolved - initial).abs(), quadrature_error: (evolved - fine).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn massless_transport_moves_bumps() {
        let g = Grid::new(200, 1.0);
        let mut f = SpinorField::zeros(g);
        f.left[100] = C64::new(1.0, 0.0);
        f.right[100] = C64::new(0.0, 1.0);
        let shift = 20.0 * g.h();
        let e = evolve_massless(&f, shift);
        assert!((e.left[80] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((e.right[120] - C64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((slice_norm(&e) - slice_norm(&f)).abs() < 1e-12);
    }

    #[test]
    fn massive_at_zero_time_and_zero_mass() {
        let g = Grid::new(64, 1.0);
        let d = reference_datum(1.0);
        let f0 = SpinorField::sample(g, &d);
        let q = QuadratureSpec::simpson(64);
        assert_eq!(evolve_massive(&f0, g, 0.0, 2.0, &q).unwrap(), f0);
        let shift = 8.0 * g.h();
        assert_eq!(evolve_massive(&f0, g, shift, 0.0, &q).unwrap(), evolve_massless(&f0, shift));
        assert!(matches!(evolve_massive(&f0, g, 0.1, 1.0, &QuadratureSpec::simpson(8)), Err(Error::QuadratureTooCoarse(_))));
    }

    #[test]
    fn charge_conjugation_is_involutive() {
        let g = Grid::new(4, 1.0);
        let f = SpinorField {
            grid: g,
            left: vec![C64::new(0.0, 1.0); 4],
            right: vec![C64::new(1.0, 0.0); 4],
        };
        let c = charge_conjugate(&f);
        assert_eq!(c.left[0], C64::new(0.0, 1.0));
        assert_eq!(c.right[0], C64::new(1.0, 0.0));
        assert_eq!(charge_conjugate(&c), f);
    }

    #[test]
    fn massive_solution_satisfies_dirac_equation() {
        // (iγ^0 ∂_t + iγ^1 ∂_x - m) ψ = 0 in components:
        // i (∂_t + ∂_x) ψ_R = m ψ_L,  i (∂_t - ∂_x) ψ_L = m ψ_R
        let m = 3.0;
        let g = Grid::new(800, 1.0);
        let q = QuadratureSpec::gauss(8, 800);
        let d = reference_datum(1.0);
        let t = 0.1;
        let dt = 1e-3;
        let fp = evolve_massive(&d, g, t + dt, m, &q).unwrap();
        let fm = evolve_massive(&d, g, t - dt, m, &q).unwrap();
        let f0 = evolve_massive(&d, g, t, m, &q).unwrap();
        let h = g.h();
        let i = C64::new(0.0, 1.0);
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for k in 1..g.n - 1 {
            let lt = (fp.left[k] - fm.left[k]) / (2.0 * dt);
            let rt = (fp.right[k] - fm.right[k]) / (2.0 * dt);
            let lx = (f0.left[k + 1] - f0.left[k - 1]) / (2.0 * h);
            let rx = (f0.right[k + 1] - f0.right[k - 1]) / (2.0 * h);
            worst = worst.max((i * (rt + rx) - f0.left[k] * m).norm());
            worst = worst.max((i * (lt - lx) - f0.right[k] * m).norm());
            scale = scale.max(f0.left[k].norm() * m);
        }
        assert!(worst < 4e-3 * scale, "residual {worst}, scale {scale}");
    }

    #[test]
    fn pointwise_growth_bound() {
        let g = Grid::new(256, 1.0);
        let d = reference_datum(1.0);
        let f0 = SpinorField::sample(g, &d);
        let (l0, r0) = f0.max_abs();
        let sup = l0.max(r0);
        let q = QuadratureSpec::simpson(512);
        for (m, t) in [(1.0, 0.2), (4.0, 0.2), (10.0, 0.15)] {
            let f = evolve_massive(&d, g, t, m, &q).unwrap();
            let (l, r) = f.max_abs();
            let extra = 2.0 * (m * t as f64).sqrt() * sup;
            assert!(l <= l0 + extra && r <= r0 + extra, "m={m}: {l} {r}");
        }
    }
}
