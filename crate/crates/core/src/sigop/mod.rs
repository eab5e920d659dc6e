//! Discretisations of the fermionic signature operator.
//!
//! All matrices are indexed by `(chirality, grid point)` in block order:
//! index `i` is the left-handed component at `x_i`, index `n + i` the
//! right-handed one. They are stored in the Hermitian form `W^{1/2} M W^{-1/2}`
//! where `M` is the collocation matrix and `W` the diagonal quadrature weights
//! of the Hilbert space scalar product.

mod galerkin;
mod massive;

pub use galerkin::{build_massive_galerkin, polygon_fourier, GalerkinOperator};
pub use massive::build_massive_kernel;

use crate::dirac::{Grid, C64};
use crate::error::{invariant, Result};
use crate::geometry::{Point, ValidatedDomain};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Smallest grid accepted by the builders.
pub const MIN_GRID: usize = 8;

/// Common interface for everything the spectral module can diagonalise.
pub trait HermitianOperator {
    fn dim(&self) -> usize;
    /// Full Hermitian matrix.
    fn dense(&self) -> DMatrix<C64>;
    /// The real block mapping left- to right-handed components when the
    /// operator is massless, so that its spectrum is `±` singular values.
    fn real_chiral_block(&self) -> Option<&DMatrix<f64>> {
        None
    }
}

#[derive(Clone, Debug)]
enum Storage {
    /// `H = [[0, B^T], [B, 0]]`.
    Chiral(DMatrix<f64>),
    Dense(DMatrix<C64>),
}

/// Nyström discretisation on a cell-centred grid.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub grid: Grid,
    pub mass: f64,
    /// Quadrature weights `f(0, x_i) h`, shared by both chiralities.
    pub weights: Vec<f64>,
    /// Frobenius norm of the anti-Hermitian part before symmetrisation.
    pub symmetrization_defect: f64,
    storage: Storage,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chirality {
    Left,
    Right,
}

impl OperatorMatrix {
    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn is_chiral(&self) -> bool {
        matches!(self.storage, Storage::Chiral(_))
    }

    #[inline]
    pub fn index(&self, c: Chirality, i: usize) -> usize {
        match c {
            Chirality::Left => i,
            Chirality::Right => self.grid.n + i,
        }
    }

    /// Collocation matrix `M = W^{-1/2} H W^{1/2}`, i.e. `S(x_i, x_j) w_j`.
    pub fn entries(&self) -> DMatrix<C64> {
        let n = self.grid.n;
        let mut m = self.dense();
        for r in 0..2 * n {
            for c in 0..2 * n {
                let s = (self.weights[c % n] / self.weights[r % n]).sqrt();
                m[(r, c)] *= s;
            }
        }
        m
    }

    /// Hilbert–Schmidt norm squared of `π_{L, I} S π_{R, J}`.
    pub fn localized_hs(&self, left: (f64, f64), right: (f64, f64)) -> Result<f64> {
        for iv in [left, right] {
            if iv.1 <= iv.0 {
                return Err(crate::Error::EmptyInterval(iv.0, iv.1));
            }
        }
        let n = self.grid.n;
        let inside = |x: f64, iv: (f64, f64)| x >= iv.0 && x < iv.1;
        let mut s = 0.0;
        match &self.storage {
            Storage::Chiral(b) => {
                for i in (0..n).filter(|&i| inside(self.grid.x(i), left)) {
                    for j in (0..n).filter(|&j| inside(self.grid.x(j), right)) {
                        s += b[(j, i)] * b[(j, i)];
                    }
                }
            }
            Storage::Dense(h) => {
                for i in (0..n).filter(|&i| inside(self.grid.x(i), left)) {
                    for j in (0..n).filter(|&j| inside(self.grid.x(j), right)) {
                        s += h[(i, n + j)].norm_sqr();
                    }
                }
            }
        }
        Ok(s)
    }
}

impl HermitianOperator for OperatorMatrix {
    fn dim(&self) -> usize {
        2 * self.grid.n
    }

    fn dense(&self) -> DMatrix<C64> {
        match &self.storage {
            Storage::Dense(h) => h.clone(),
            Storage::Chiral(b) => chiral_dense(b),
        }
    }

    fn real_chiral_block(&self) -> Option<&DMatrix<f64>> {
        match &self.storage {
            Storage::Chiral(b) => Some(b),
            Storage::Dense(_) => None,
        }
    }
}

pub(crate) fn chiral_dense(b: &DMatrix<f64>) -> DMatrix<C64> {
    let (r, c) = b.shape();
    let mut h = DMatrix::<C64>::zeros(r + c, r + c);
    for i in 0..r {
        for j in 0..c {
            let v = C64::new(b[(i, j)], 0.0);
            h[(c + i, j)] = v;
            h[(j, c + i)] = v;
        }
    }
    h
}

fn check_grid(n: usize) -> Result<()> {
    if n < MIN_GRID {
        return Err(invariant(format!("grid of {n} points is below the minimum of {MIN_GRID}")));
    }
    Ok(())
}

/// Massless operator on the flat base of `d`:
/// `(S ψ)_L(x) = (1/4π) ∫ χ(i⁺(x, y)) ψ_R(y) dy`,
/// `(S ψ)_R(x) = (1/4π) ∫ χ(i⁻(x, y)) ψ_L(y) dy`, with
/// `i^±(x, y) = (±(x - y)/2, (x + y)/2)`.
pub fn build_flat_massless(d: &ValidatedDomain, n: usize) -> Result<OperatorMatrix> {
    check_grid(n)?;
    assemble_chiral(d, n, false)
}

/// Massless operator for the metric `f^2 η`. The Hermitian entries are
/// `(h / 4π) (χ f)(i^±)`; the Hilbert space weights are `f(0, x) h`.
pub fn build_conformal(d: &ValidatedDomain, n: usize) -> Result<OperatorMatrix> {
    check_grid(n)?;
    if !d.is_conformal() {
        return Err(invariant("build_conformal needs a conformal domain"));
    }
    assemble_chiral(d, n, true)
}

/// Fraction of a small circle around `p` inside the domain: 1 in the
/// interior, 1/2 on a straight edge through `p`. Grid nodes can sit exactly
/// on lightlike edges (the triangle's `u = w`), where a plain strict test
/// would drop the whole edge.
fn indicator(d: &ValidatedDomain, p: Point) -> f64 {
    const OFFSETS: [(f64, f64); 8] = {
        // angles 22.5° + k 45°, never along the u, w axes or the diagonals
        let (a, b) = (0.923_879_532_511_286_7, 0.382_683_432_365_089_8);
        [(a, b), (b, a), (-b, a), (-a, b), (-a, -b), (-b, -a), (b, -a), (a, -b)]
    };
    let inside = d.contains(p);
    let eps = 1e-9 * d.b();
    let (u, w) = (p.u(), p.w());
    // fast path: all four axis neighbours agree with the centre
    let probe = [(eps, 0.0), (-eps, 0.0), (0.0, eps), (0.0, -eps)];
    if probe.iter().all(|&(du, dw)| d.contains(Point::from_uw(u + du, w + dw)) == inside) {
        return if inside { 1.0 } else { 0.0 };
    }
    let hits = OFFSETS.iter().filter(|&&(du, dw)| d.contains(Point::from_uw(u + eps * du, w + eps * dw))).count();
    hits as f64 / OFFSETS.len() as f64
}

fn assemble_chiral(d: &ValidatedDomain, n: usize, weighted: bool) -> Result<OperatorMatrix> {
    let grid = Grid::new(n, d.b());
    let h = grid.h();
    let c = h / (4.0 * PI);
    let xs = grid.points();
    // row i: right-handed at x_i (w = x_i); column j: left-handed (u = x_j)
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let p = Point::from_uw(xs[j], xs[i]);
                    let chi = indicator(d, p);
                    if chi == 0.0 {
                        0.0
                    } else if weighted {
                        c * chi * d.f(p)
                    } else {
                        c * chi
                    }
                })
                .collect()
        })
        .collect();
    let b = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    if b.iter().any(|v| !v.is_finite()) {
        return Err(invariant("conformal factor is not finite on the grid"));
    }
    let weights = xs.iter().map(|&x| if weighted { d.f(Point::new(0.0, x)) * h } else { h }).collect();
    Ok(OperatorMatrix { grid, mass: 0.0, weights, symmetrization_defect: 0.0, storage: Storage::Chiral(b) })
}

/// Exact finite-rank operator of a simple domain in the basis of
/// normalised cell indicators: `(1 / 2π√2) [[0, T^T], [T, 0]]`.
#[derive(Clone, Debug)]
pub struct SimpleOperator {
    pub t: DMatrix<f64>,
    /// `T / (2π√2)`, the block mapping left to right components.
    block: DMatrix<f64>,
}

impl SimpleOperator {
    /// Operator of an arbitrary square block `T`.
    pub fn from_t(t: DMatrix<f64>) -> SimpleOperator {
        let block = &t / (2.0 * PI * std::f64::consts::SQRT_2);
        SimpleOperator { t, block }
    }

    pub fn cells(&self) -> usize {
        self.t.nrows()
    }
}

impl HermitianOperator for SimpleOperator {
    fn dim(&self) -> usize {
        2 * self.t.nrows()
    }

    fn dense(&self) -> DMatrix<C64> {
        chiral_dense(&self.block)
    }

    fn real_chiral_block(&self) -> Option<&DMatrix<f64>> {
        Some(&self.block)
    }
}

pub fn build_simple(d: &ValidatedDomain) -> Result<SimpleOperator> {
    let s = d.as_simple().ok_or_else(|| invariant("build_simple needs a simple domain"))?;
    let rows = s.t_matrix();
    let k = rows.len();
    Ok(SimpleOperator::from_t(DMatrix::from_fn(k, k, |i, j| rows[i][j])))
}

pub(crate) fn from_dense(grid: Grid, mass: f64, raw: DMatrix<C64>) -> OperatorMatrix {
    let anti = (&raw - raw.adjoint()) * C64::new(0.5, 0.0);
    let defect = anti.norm();
    let h = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);
    let weights = vec![grid.h(); grid.n];
    OperatorMatrix { grid, mass, weights, symmetrization_defect: defect, storage: Storage::Dense(h) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{validate_domain, ConformalDomain, ConformalFactor, Domain, FlatDomain, SimpleDomain};

    #[test]
    fn diamond_block_is_rank_one() {
        let d = ValidatedDomain::diamond(1.0);
        let op = build_flat_massless(&d, 16).unwrap();
        let b = op.real_chiral_block().unwrap();
        assert!(b.iter().all(|&v| (v - 1.0 / 16.0 / (4.0 * PI)).abs() < 1e-17));
        let h = op.dense();
        assert_eq!(h, h.adjoint());
    }

    #[test]
    fn simple_block_matches_cell_areas() {
        let s = SimpleDomain::from_widths(&[0.5, 0.25], &[(0, 1)]);
        let d = validate_domain(Domain::Simple(s)).unwrap();
        let op = build_simple(&d).unwrap();
        assert!((op.t[(0, 1)] - (0.5f64 * 0.5 * 0.25).sqrt()).abs() < 1e-16);
        assert_eq!(op.t[(1, 0)], 0.0);
        assert_eq!(op.dim(), 4);
    }

    #[test]
    fn conformal_similarity_is_hermitian() {
        let c = ConformalDomain {
            base: FlatDomain::Simple(SimpleDomain::diamond(1.0)),
            factor: ConformalFactor::expression("1 + 0.3*sin(pi*x)*exp(-t^2)").unwrap(),
        };
        let d = validate_domain(Domain::Conformal(c)).unwrap();
        let op = build_conformal(&d, 12).unwrap();
        let m = op.entries();
        // W^{1/2} M W^{-1/2} recovers the stored Hermitian form
        let n = 12;
        let mut back = m.clone();
        for r in 0..2 * n {
            for c in 0..2 * n {
                back[(r, c)] *= (op.weights[r % n] / op.weights[c % n]).sqrt();
            }
        }
        assert!((back - op.dense()).norm() < 1e-15);
        assert!(matches!(build_flat_massless(&d, 4), Err(crate::Error::InvariantViolation(_))));
    }
}
