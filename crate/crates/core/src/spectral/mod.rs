//! Spectra and trace functionals of discretised signature operators.

mod montecarlo;

pub use montecarlo::{
    theta_coefficient, trace_s2_massive_mc, trace_s4_curvature, trace_theta_mc, CoefficientVariant, CurvatureRegion, MassiveTrace,
    ThetaTrace,
};

use crate::dirac::C64;
use crate::error::{Error, Result};
use crate::geometry::GraphDomain;
use crate::sigop::{HermitianOperator, OperatorMatrix};
use nalgebra::linalg::{SymmetricEigen, SVD};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Relative tolerance for matching `λ` with `-λ` and for the unpaired
/// middle eigenvalue of an odd-dimensional spectrum.
pub const PAIRING_RTOL: f64 = 1e-9;
/// Singular values below this fraction of the largest count as zero.
pub const RANK_RTOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Ordered by decreasing modulus, ties by decreasing signed value.
    pub eigenvalues: Vec<f64>,
    pub pairing_defect: f64,
    /// `tr S^{2q}` from the eigenvalues, keyed by `2q`.
    pub traces: BTreeMap<u32, f64>,
    pub positive_trace: f64,
    /// Chiral index; `None` when the operator mixes chiralities.
    pub index: Option<i64>,
}

impl SpectrumReport {
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, index: Option<i64>) -> Result<SpectrumReport> {
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::EigensolverFailure("non-finite eigenvalue".into()));
        }
        sort_spectrum(&mut eigenvalues);
        let pairing_defect = pairing_defect(&eigenvalues)?;
        let traces = [1u32, 2]
            .into_iter()
            .map(|q| (2 * q, eigenvalues.iter().map(|l| l.powi(2 * q as i32)).sum()))
            .collect();
        let positive_trace = eigenvalues.iter().filter(|&&l| l > 0.0).sum();
        Ok(SpectrumReport { eigenvalues, pairing_defect, traces, positive_trace, index })
    }

    pub fn largest(&self) -> f64 {
        self.eigenvalues.first().map_or(0.0, |l| l.abs())
    }

    pub fn trace_eigen(&self, q: u32) -> f64 {
        self.eigenvalues.iter().map(|l| l.powi(2 * q as i32)).sum()
    }
}

pub fn sort_spectrum(v: &mut [f64]) {
    v.sort_by(|a, b| b.abs().total_cmp(&a.abs()).then(b.total_cmp(a)));
}

/// Largest `|λ_i + λ_{N+1-i}|` over the ascending spectrum. An odd spectrum
/// must have its middle eigenvalue at zero.
pub fn pairing_defect(eigenvalues: &[f64]) -> Result<f64> {
    let mut v = eigenvalues.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return Ok(0.0);
    }
    let scale = v[0].abs().max(v[n - 1].abs());
    let mut worst: f64 = 0.0;
    for i in 0..n / 2 {
        worst = worst.max((v[i] + v[n - 1 - i]).abs());
    }
    if n % 2 == 1 {
        let mid = v[n / 2];
        if mid.abs() > PAIRING_RTOL * scale {
            return Err(Error::OddUnpairedEigenvalue(mid));
        }
        worst = worst.max(mid.abs());
    }
    Ok(worst)
}

pub fn symmetry_defect(report: &SpectrumReport) -> Result<f64> {
    pairing_defect(&report.eigenvalues)
}

/// Pairing tolerance for an operator: `1e-12` for chiral operators,
/// otherwise five times the symmetrisation defect, floored at the roundoff
/// level `64 ε ‖H‖_F` of a dense eigensolver.
pub fn pairing_tolerance(op: &OperatorMatrix) -> f64 {
    if op.is_chiral() {
        return 1e-12;
    }
    let floor = 64.0 * f64::EPSILON * op.dense().norm();
    5.0 * op.symmetrization_defect.max(floor)
}

fn hermitian_eigen(h: DMatrix<C64>) -> Result<SymmetricEigen<C64, nalgebra::Dyn>> {
    let n = h.nrows();
    SymmetricEigen::try_new(h, f64::EPSILON, 1000 * n.max(1))
        .ok_or_else(|| Error::EigensolverFailure(format!("no convergence for dimension {n}")))
}

fn singular_values(b: &DMatrix<f64>) -> Result<Vec<f64>> {
    if b.is_empty() {
        return Ok(vec![]);
    }
    let svd = SVD::try_new(b.clone(), false, false, f64::EPSILON, 0)
        .ok_or_else(|| Error::EigensolverFailure("singular value decomposition did not converge".into()))?;
    Ok(svd.singular_values.iter().copied().collect())
}

fn index_from_block(b: &DMatrix<f64>, sv: &[f64]) -> i64 {
    let (r, c) = b.shape();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > RANK_RTOL * top && s > 0.0).count();
    (c - rank) as i64 - (r - rank) as i64
}

/// Full spectrum with multiplicity. Chiral operators go through the
/// singular values of their off-diagonal block, giving an exactly
/// symmetric spectrum.
pub fn spectrum<O: HermitianOperator + ?Sized>(op: &O) -> Result<SpectrumReport> {
    if let Some(b) = op.real_chiral_block() {
        let sv = singular_values(b)?;
        let (r, c) = b.shape();
        let mut eig: Vec<f64> = sv.iter().flat_map(|&s| [s, -s]).collect();
        eig.resize(r + c, 0.0);
        return SpectrumReport::from_eigenvalues(eig, Some(index_from_block(b, &sv)));
    }
    spectrum_dense(op)
}

/// Spectrum of the assembled Hermitian matrix, bypassing the chiral path.
pub fn spectrum_dense<O: HermitianOperator + ?Sized>(op: &O) -> Result<SpectrumReport> {
    let eig = hermitian_eigen(op.dense())?;
    let index = op.real_chiral_block().map(|b| singular_values(b).map(|sv| index_from_block(b, &sv))).transpose()?;
    SpectrumReport::from_eigenvalues(eig.eigenvalues.iter().copied().collect(), index)
}

/// For a chiral operator, `Γ = diag(-1, 1)` maps each `λ`-eigenvector to a
/// `(-λ)`-eigenvector. Returns the largest residual `‖H Γ v + λ Γ v‖`.
pub fn gamma_eigenvector_defect(op: &OperatorMatrix) -> Result<f64> {
    let h = op.dense();
    let n = op.n();
    let eig = hermitian_eigen(h.clone())?;
    let mut worst: f64 = 0.0;
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        let mut g = eig.eigenvectors.column(k).clone_owned();
        for i in 0..n {
            g[i] = -g[i];
        }
        worst = worst.max((&h * &g + &g * C64::new(l, 0.0)).norm());
    }
    Ok(worst)
}

/// `tr S^{2q}` along two independent routes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePair {
    pub from_eigenvalues: f64,
    /// `‖H^q‖_F^2`.
    pub from_matrix: f64,
}

pub fn trace_power<O: HermitianOperator + ?Sized>(op: &O, q: u32) -> Result<TracePair> {
    if q == 0 {
        return Err(crate::error::invariant("trace power needs q >= 1"));
    }
    let report = spectrum(op)?;
    let from_matrix = if let Some(b) = op.real_chiral_block() {
        // H^2 = diag(B^T B, B B^T), so tr H^{2q} = 2 tr G^q for the smaller Gram matrix G
        let g = if b.nrows() <= b.ncols() { b * b.transpose() } else { b.transpose() * b };
        let mut p = g.clone();
        for _ in 1..q {
            p = &p * &g;
        }
        2.0 * p.trace()
    } else {
        let h = op.dense();
        let mut p = h.clone();
        for _ in 1..q {
            p = &p * &h;
        }
        p.norm_squared()
    };
    Ok(TracePair { from_eigenvalues: report.trace_eigen(q), from_matrix })
}

/// `tr S^p` for odd `p` from the matrix; vanishes for symmetric spectra.
pub fn odd_trace<O: HermitianOperator + ?Sized>(op: &O, p: u32) -> f64 {
    let h = op.dense();
    let mut m = h.clone();
    for _ in 1..p {
        m = &m * &h;
    }
    m.trace().re
}

/// `tr S_+`, from the report and as the nuclear norm of the chiral block
/// when there is one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositiveTrace {
    pub from_eigenvalues: f64,
    pub nuclear_norm: Option<f64>,
}

pub fn positive_trace<O: HermitianOperator + ?Sized>(op: &O) -> Result<PositiveTrace> {
    let report = spectrum_dense(op)?;
    let nuclear_norm = op.real_chiral_block().map(|b| singular_values(b).map(|s| s.iter().sum())).transpose()?;
    Ok(PositiveTrace { from_eigenvalues: report.positive_trace, nuclear_norm })
}

/// `dim ker S_L - dim ker S_R` with the relative rank threshold
/// [`RANK_RTOL`]. Dense operators are accepted when their diagonal
/// chirality blocks vanish; the first half of the indices is left-handed.
pub fn chiral_index<O: HermitianOperator + ?Sized>(op: &O) -> Result<i64> {
    if let Some(b) = op.real_chiral_block() {
        let sv = singular_values(b)?;
        return Ok(index_from_block(b, &sv));
    }
    let h = op.dense();
    let dim = h.nrows();
    if dim % 2 == 1 {
        return Err(Error::NotChiral("odd dimension".into()));
    }
    let n = dim / 2;
    let tol = 1e-12 * h.norm().max(f64::MIN_POSITIVE);
    let diag = h.view((0, 0), (n, n)).norm() + h.view((n, n), (n, n)).norm();
    if diag > tol {
        return Err(Error::NotChiral(format!("chirality-preserving blocks have norm {diag:e}")));
    }
    let b = h.view((n, 0), (n, n)).clone_owned();
    let sv: Vec<f64> = b.singular_values().iter().copied().collect();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > RANK_RTOL * top && s > 0.0).count();
    // square block: both kernels have dimension n - rank
    let (ker_l, ker_r) = (n - rank, n - rank);
    Ok(ker_l as i64 - ker_r as i64)
}

/// Eigenvalue decay check `|λ_n| <= c b / n` with
/// `c = (1 + m b)(1 + 4 Σ_± TV(T'_±))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub c: f64,
    pub b: f64,
    pub mass: f64,
    /// `c b / n - |λ_n|` for `n = 1, 2, ...`.
    pub margins: Vec<f64>,
    pub min_margin: f64,
    pub holds: bool,
}

pub fn decay_constant(d: &GraphDomain, m: f64) -> f64 {
    let tv = d.upper.derivative_variation() + d.lower.derivative_variation();
    (1.0 + m * d.b) * (1.0 + 4.0 * tv)
}

pub fn decay_bound_report(report: &SpectrumReport, d: &GraphDomain, m: f64, tol: f64) -> BoundReport {
    let c = decay_constant(d, m);
    let margins: Vec<f64> =
        report.eigenvalues.iter().enumerate().map(|(i, l)| c * d.b / (i + 1) as f64 - l.abs()).collect();
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    BoundReport { c, b: d.b, mass: m, holds: margins.iter().all(|&x| x >= -tol), margins, min_margin }
}
