//! Command-line front end: spec files, command dispatch and report files.

mod emit;
mod spec;

pub use emit::{emit_report, fmt_f64, spectrum_csv, spectrum_svg, density_svg, to_json, Format};
pub use spec::{
    parse_domain_spec, BoundarySpec, ConformalSpec, DomainSpec, DomainSpecFile, FactorSpec, FlatSpec, GraphSpec,
    SCHEMA_VERSION,
};

use crate::dirac::{group_property_defect, norm_drift, Grid, NormDrift};
use crate::error::{invariant, Error, Result};
use crate::geometry::{GraphDomain, ValidatedDomain};
use crate::inverse::{
    beam_volume, bound_spacelike, bound_timelike, cell_diagonal_curves, isospectral_pair, localized_hs_norm,
    reconstruct_volume_density, BoundCheck, IsospectralPair, ReconstructionAssessment, ReconstructionField,
};
use crate::quad::QuadratureSpec;
use crate::sigop::{build_conformal, build_flat_massless, build_massive_kernel, build_simple, OperatorMatrix};
use crate::spectral::{
    decay_bound_report, pairing_tolerance, spectrum, trace_power, trace_s2_massive_mc, trace_s4_curvature,
    trace_theta_mc, BoundReport, CurvatureRegion, MassiveTrace, SpectrumReport, ThetaTrace,
};
use clap::Parser;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ffi::OsString;
use std::path::PathBuf;

pub const TOOL: &str = "fermisig";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const DEFAULT_N: usize = 256;
const DEFAULT_VERIFY_N: usize = 512;
const DEFAULT_PROPAGATION_N: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Eigenvalues of the signature operator.
    Spectrum,
    /// Matrix traces against the Monte Carlo trace integrals.
    Traces,
    /// Run the invariant battery of a domain.
    Verify,
    /// Construct the isospectral pair of three-cell simple domains.
    Isospectral,
    /// Recover the volume density from localised norms.
    Reconstruct,
    /// Cauchy evolution checks for the massive Dirac equation.
    Cauchy,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Traces => "traces",
            Command::Verify => "verify",
            Command::Isospectral => "isospectral",
            Command::Reconstruct => "reconstruct",
            Command::Cauchy => "cauchy",
        }
    }

    fn needs_spec(self) -> bool {
        !matches!(self, Command::Isospectral | Command::Cauchy)
    }
}

fn parse_interval(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected A,B")?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v}: {e}"));
    Ok((p(a)?, p(b)?))
}

/// Numerical options shared by all commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, clap::Args)]
pub struct RunOptions {
    /// Grid size; simple domains use the exact finite-rank operator when absent.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub mass: f64,
    /// Monte Carlo samples.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Trace power: `tr S^{2q}`.
    #[arg(long, default_value_t = 2)]
    pub q: u32,
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    pub interval_left: Option<(f64, f64)>,
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    pub interval_right: Option<(f64, f64)>,
    /// Reconstruction window in grid cells.
    #[arg(long, default_value_t = 8)]
    pub window: usize,
    /// Parameter of the isospectral family.
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            n: None,
            mass: 0.0,
            samples: 100_000,
            seed: 1,
            q: 2,
            interval_left: None,
            interval_right: None,
            window: 8,
            delta: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub spec: Option<DomainSpecFile>,
    pub options: RunOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorSummary {
    /// `simple`, `flat_massless`, `conformal` or `massive_kernel`.
    pub kind: String,
    pub dimension: usize,
    pub grid: Option<usize>,
    pub mass: f64,
    pub symmetrization_defect: f64,
    pub pairing_tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceValue {
    pub name: String,
    pub value: f64,
    pub std_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedBound {
    pub name: String,
    pub check: BoundCheck,
}

/// One pass/fail item. `name` states the property under test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

impl Check {
    fn at_most(name: &str, value: f64, limit: f64, detail: impl Into<String>) -> Check {
        Check { name: name.into(), passed: value <= limit, value, limit, detail: detail.into() }
    }

    fn at_least(name: &str, value: f64, limit: f64, detail: impl Into<String>) -> Check {
        Check { name: name.into(), passed: value >= limit, value, limit, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub field: ReconstructionField,
    pub assessment: ReconstructionAssessment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Propagation {
    pub mass: f64,
    pub b: f64,
    pub times: (f64, f64),
    /// `(grid n, defect)` with Simpson panels `2n`.
    pub group_defects: Vec<(usize, f64)>,
    pub refinement_orders: Vec<f64>,
    pub norm: NormDrift,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub inputs: Inputs,
    pub seeds: Vec<u64>,
    pub operator: Option<OperatorSummary>,
    pub spectrum: Option<SpectrumReport>,
    pub traces: Vec<TraceValue>,
    pub theta: Option<ThetaTrace>,
    pub massive_trace: Option<MassiveTrace>,
    pub bounds: Vec<NamedBound>,
    pub decay: Option<BoundReport>,
    pub isospectral: Option<IsospectralPair>,
    pub reconstruction: Option<Reconstruction>,
    pub propagation: Option<Propagation>,
    pub checks: Vec<Check>,
}

impl ReportDocument {
    fn new(command: Command, spec: Option<&DomainSpecFile>, options: &RunOptions) -> ReportDocument {
        ReportDocument {
            tool: TOOL.into(),
            version: VERSION.into(),
            command,
            inputs: Inputs { spec: spec.cloned(), options: options.clone() },
            seeds: Vec::new(),
            operator: None,
            spectrum: None,
            traces: Vec::new(),
            theta: None,
            massive_trace: None,
            bounds: Vec::new(),
            decay: None,
            isospectral: None,
            reconstruction: None,
            propagation: None,
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// The operator a command works on.
enum Built {
    Simple(crate::sigop::SimpleOperator),
    Grid(OperatorMatrix),
}

impl Built {
    fn spectrum(&self) -> Result<SpectrumReport> {
        match self {
            Built::Simple(s) => spectrum(s),
            Built::Grid(g) => spectrum(g),
        }
    }

    fn grid(&self) -> Option<&OperatorMatrix> {
        match self {
            Built::Grid(g) => Some(g),
            Built::Simple(_) => None,
        }
    }
}

fn massive_quadrature() -> QuadratureSpec {
    QuadratureSpec::gauss(8, 4)
}

fn build(d: &ValidatedDomain, o: &RunOptions, default_n: Option<usize>) -> Result<(Built, OperatorSummary)> {
    if !(o.mass >= 0.0 && o.mass.is_finite()) {
        return Err(invariant("mass must be non-negative"));
    }
    let n = o.n.or(default_n);
    let summary = |kind: &str, dimension, grid, sym, tol| OperatorSummary {
        kind: kind.into(),
        dimension,
        grid,
        mass: o.mass,
        symmetrization_defect: sym,
        pairing_tolerance: tol,
    };
    let grid_op = |op: OperatorMatrix, kind: &str| {
        let s = summary(kind, 2 * op.n(), Some(op.n()), op.symmetrization_defect, pairing_tolerance(&op));
        (Built::Grid(op), s)
    };
    if o.mass > 0.0 {
        let n = n.unwrap_or(DEFAULT_N);
        return Ok(grid_op(build_massive_kernel(d, o.mass, n, &massive_quadrature())?, "massive_kernel"));
    }
    match (d.as_simple(), n) {
        (Some(_), None) => {
            let s = build_simple(d)?;
            let sum = summary("simple", 2 * s.cells(), None, 0.0, 1e-12);
            Ok((Built::Simple(s), sum))
        }
        _ if d.is_conformal() => Ok(grid_op(build_conformal(d, n.unwrap_or(DEFAULT_N))?, "conformal")),
        _ => Ok(grid_op(build_flat_massless(d, n.unwrap_or(DEFAULT_N))?, "flat_massless")),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

/// `|λ_n|` inside `b/(8π^2) · [4/(n+3), 4/(n-4)]` for `5 <= n <= 40`, with at
/// most two exceptions within 3% of the violated bound.
pub fn triangle_window_check(report: &SpectrumReport, b: f64) -> Check {
    let c = b / (8.0 * PI * PI);
    let (mut exceptions, mut worst) = (0usize, 0.0f64);
    let mut hard = false;
    for n in 5..=40usize {
        let Some(l) = report.eigenvalues.get(n - 1).map(|v| v.abs()) else {
            hard = true;
            break;
        };
        let (lo, hi) = (c * 4.0 / (n as f64 + 3.0), c * 4.0 / (n as f64 - 4.0));
        let miss = if l < lo { (lo - l) / lo } else if l > hi { (l - hi) / hi } else { 0.0 };
        if miss > 0.0 {
            exceptions += 1;
            worst = worst.max(miss);
            hard |= miss > 0.03;
        }
    }
    Check {
        name: "triangle eigenvalue window".into(),
        passed: !hard && exceptions <= 2,
        value: exceptions as f64,
        limit: 2.0,
        detail: format!("{exceptions} eigenvalues outside the window, worst relative miss {worst:.3e}"),
    }
}

fn default_intervals(b: f64, o: &RunOptions) -> ((f64, f64), (f64, f64)) {
    (o.interval_left.unwrap_or((0.25 * b, 0.75 * b)), o.interval_right.unwrap_or((0.25 * b, 0.75 * b)))
}

fn run_spectrum(doc: &mut ReportDocument, d: &ValidatedDomain, o: &RunOptions) -> Result<()> {
    let (op, summary) = build(d, o, None)?;
    let r = op.spectrum()?;
    doc.checks.push(Check::at_most(
        "spectral pairing symmetry",
        r.pairing_defect,
        summary.pairing_tolerance,
        "largest |λ_i + λ_{N+1-i}| in ascending order",
    ));
    if let Some(g) = d.as_graph() {
        doc.decay = Some(decay_bound_report(&r, g, o.mass, 0.0));
    }
    doc.operator = Some(summary);
    doc.spectrum = Some(r);
    Ok(())
}

fn run_traces(doc: &mut ReportDocument, d: &ValidatedDomain, o: &RunOptions) -> Result<()> {
    let (op, summary) = build(d, o, None)?;
    let q = o.q;
    let tp = match &op {
        Built::Simple(s) => trace_power(s, q)?,
        Built::Grid(g) => trace_power(g, q)?,
    };
    doc.traces.push(TraceValue { name: format!("tr S^{} eigenvalues", 2 * q), value: tp.from_eigenvalues, std_error: None });
    doc.traces.push(TraceValue { name: format!("tr S^{} matrix power", 2 * q), value: tp.from_matrix, std_error: None });
    doc.seeds.push(o.seed);
    if o.mass > 0.0 {
        if q != 1 {
            return Err(invariant("massive traces are available for q = 1"));
        }
        let mt = trace_s2_massive_mc(d, o.mass, o.samples, o.seed)?;
        let tol = (3.0 * mt.std_error).max(0.02 * tp.from_eigenvalues);
        doc.checks.push(Check::at_most(
            "massive Hilbert-Schmidt norm",
            (mt.value - tp.from_eigenvalues).abs(),
            tol,
            "Bessel-kernel Monte Carlo against the kernel matrix, max(3σ, 2%)",
        ));
        doc.massive_trace = Some(mt);
    } else {
        let th = trace_theta_mc(d, q, o.samples, o.seed)?;
        doc.traces.push(TraceValue { name: format!("tr S^{} theta Monte Carlo", 2 * q), value: th.value, std_error: Some(th.std_error) });
        if q == 1 {
            let exact = d.total_volume()? / (4.0 * PI * PI);
            doc.traces.push(TraceValue { name: "volume / 4 pi^2".into(), value: exact, std_error: None });
            doc.checks.push(Check::at_most(
                "volume trace identity",
                (th.value - exact).abs(),
                3.0 * th.std_error + 1e-12 * exact,
                "theta Monte Carlo against μ/4π², 3σ",
            ));
        }
        if q == 2 {
            if d.is_conformal() {
                let c = trace_s4_curvature(d, o.samples, o.seed, CurvatureRegion::ThetaRectangle)?;
                doc.traces.push(TraceValue { name: "tr S^4 curvature form".into(), value: c.value, std_error: Some(c.std_error) });
            }
            for v in &th.variants {
                doc.traces.push(TraceValue { name: format!("tr S^4 {}", v.label), value: v.value, std_error: Some(v.std_error) });
            }
        }
        doc.theta = Some(th);
    }
    doc.operator = Some(summary);
    Ok(())
}

fn verify_length_bounds(doc: &mut ReportDocument, d: &ValidatedDomain, r: &SpectrumReport) -> Result<()> {
    let Some(s) = d.as_simple() else { return Ok(()) };
    let (tl, sl) = cell_diagonal_curves(s);
    let mut worst = (f64::INFINITY, f64::INFINITY);
    for c in &tl {
        let b = bound_timelike(r, d, c)?;
        worst.0 = worst.0.min(b.margin);
        doc.bounds.push(NamedBound { name: "timelike".into(), check: b });
    }
    for c in &sl {
        let b = bound_spacelike(r, d, c)?;
        worst.1 = worst.1.min(b.margin);
        doc.bounds.push(NamedBound { name: "spacelike".into(), check: b });
    }
    doc.checks.push(Check::at_least("timelike length bound", worst.0, -1e-9, "min over cell diagonals of λ_1 - ℓ/4π"));
    doc.checks.push(Check::at_least("spacelike length bound", worst.1, -1e-9, "min over cell diagonals of tr S_+ - ℓ/4π"));
    Ok(())
}

fn verify_localization(doc: &mut ReportDocument, d: &ValidatedDomain, op: &OperatorMatrix, o: &RunOptions) -> Result<()> {
    let (i, j) = default_intervals(d.b(), o);
    let hs = localized_hs_norm(op, i, j)?;
    let target = beam_volume(d, i, j) / (8.0 * PI * PI);
    let full = localized_hs_norm(op, (0.0, d.b()), (0.0, d.b()))?;
    let (value, limit) = if target > 0.0 { (rel(hs, target), 0.02) } else { (hs / full, 1e-3) };
    doc.traces.push(TraceValue { name: "localized HS norm".into(), value: hs, std_error: None });
    doc.traces.push(TraceValue { name: "beam volume / 8 pi^2".into(), value: target, std_error: None });
    doc.checks.push(Check::at_most(
        "localization identity",
        value,
        limit,
        format!("I = [{}, {}), J = [{}, {})", i.0, i.1, j.0, j.1),
    ));
    Ok(())
}

fn run_verify(doc: &mut ReportDocument, d: &ValidatedDomain, o: &RunOptions) -> Result<()> {
    let default_n = if d.as_simple().is_some() && o.mass == 0.0 { None } else { Some(DEFAULT_VERIFY_N) };
    let (op, summary) = build(d, o, default_n)?;
    let r = op.spectrum()?;
    doc.checks.push(Check::at_most(
        "spectral pairing symmetry",
        r.pairing_defect,
        summary.pairing_tolerance,
        "largest |λ_i + λ_{N+1-i}| in ascending order",
    ));
    doc.seeds.push(o.seed);
    if o.mass == 0.0 {
        let vol = d.total_volume()? / (4.0 * PI * PI);
        let tr2 = r.trace_eigen(1);
        doc.checks.push(Check::at_most("volume trace identity", rel(tr2, vol), 0.01, "tr S^2 against μ/4π², 1%"));
        let th = trace_theta_mc(d, 1, o.samples, o.seed)?;
        doc.checks.push(Check::at_most(
            "theta trace integral",
            (th.value - vol).abs(),
            3.0 * th.std_error + 1e-12 * vol,
            "q = 1 Monte Carlo against μ/4π², 3σ",
        ));
        if let Built::Simple(s) = &op {
            let tp = trace_power(s, 2)?;
            let th2 = trace_theta_mc(d, 2, o.samples, o.seed)?;
            doc.checks.push(Check::at_most(
                "fourth-power trace integral",
                (th2.value - tp.from_matrix).abs(),
                3.0 * th2.std_error + 1e-12 * tp.from_matrix,
                "q = 2 Monte Carlo against the matrix power, 3σ",
            ));
            doc.theta = Some(th2);
        }
        verify_length_bounds(doc, d, &r)?;
        if let Some(g) = op.grid() {
            verify_localization(doc, d, g, o)?;
        }
    } else {
        let mt = trace_s2_massive_mc(d, o.mass, o.samples, o.seed)?;
        let tr2 = r.trace_eigen(1);
        doc.checks.push(Check::at_most(
            "massive Hilbert-Schmidt norm",
            (mt.value - tr2).abs(),
            (3.0 * mt.std_error).max(0.02 * tr2),
            "Bessel-kernel Monte Carlo against the kernel matrix, max(3σ, 2%)",
        ));
        doc.massive_trace = Some(mt);
    }
    if let Some(g) = d.as_graph() {
        let rep = decay_bound_report(&r, g, o.mass, 0.0);
        doc.checks.push(Check::at_least("eigenvalue decay bound", rep.min_margin, 0.0, format!("c = {}", rep.c)));
        doc.decay = Some(rep);
        if o.mass == 0.0 && *g == GraphDomain::triangle(g.b) {
            doc.checks.push(triangle_window_check(&r, g.b));
        }
    }
    doc.operator = Some(summary);
    doc.spectrum = Some(r);
    Ok(())
}

fn run_isospectral(doc: &mut ReportDocument, o: &RunOptions) -> Result<()> {
    let p = isospectral_pair(o.delta)?;
    let asym = (5.0 * o.delta / 8.0).sqrt();
    doc.checks.push(Check::at_most("isospectral spectra", p.spectrum_difference, 1e-10, "eigenvalues of T*T and T~*T~"));
    doc.checks.push(Check::at_most(
        "leading-order parameter",
        (p.params_t.0 - p.a_asymptote).abs(),
        1e-3,
        "|a - (1 + sqrt(5δ/8))|",
    ));
    doc.checks.push(Check::at_least(
        "spacelike length separation",
        (p.spacelike_length_t - p.spacelike_length_ttilde).abs(),
        0.5 * asym,
        "difference of the Cauchy line lengths against 0.5 sqrt(5δ/8)",
    ));
    // T and T~ share the spectrum; report the one of T
    let d = crate::geometry::validate_domain(crate::geometry::Domain::Simple(p.domain_t.clone()))?;
    doc.spectrum = Some(spectrum(&build_simple(&d)?)?);
    doc.isospectral = Some(p);
    Ok(())
}

fn run_reconstruct(doc: &mut ReportDocument, d: &ValidatedDomain, o: &RunOptions) -> Result<()> {
    if o.mass != 0.0 {
        return Err(Error::NotChiral("reconstruction needs a massless operator".into()));
    }
    let n = o.n.unwrap_or(DEFAULT_VERIFY_N);
    let op = if d.is_conformal() { build_conformal(d, n)? } else { build_flat_massless(d, n)? };
    let field = reconstruct_volume_density(&op, o.window)?;
    let assessment = field.assess(d)?;
    if d.is_conformal() {
        doc.checks.push(Check::at_most(
            "density recovery",
            assessment.sup_relative_error,
            0.05,
            "sup |value - f^2| / f^2 over interior windows",
        ));
    } else {
        doc.checks.push(Check::at_least(
            "indicator recovery",
            assessment.indicator_agreement,
            0.98,
            "fraction of windows where value > 1/2 matches coverage > 1/2",
        ));
    }
    doc.operator = Some(OperatorSummary {
        kind: if d.is_conformal() { "conformal" } else { "flat_massless" }.into(),
        dimension: 2 * n,
        grid: Some(n),
        mass: 0.0,
        symmetrization_defect: 0.0,
        pairing_tolerance: pairing_tolerance(&op),
    });
    doc.reconstruction = Some(Reconstruction { field, assessment });
    Ok(())
}

fn run_cauchy(doc: &mut ReportDocument, d: Option<&ValidatedDomain>, o: &RunOptions) -> Result<()> {
    let b = d.map_or(1.0, |d| d.b());
    let m = if o.mass > 0.0 { o.mass } else { 1.0 / b };
    let n0 = o.n.unwrap_or(DEFAULT_PROPAGATION_N);
    // shifts on grid points, so transport adds no interpolation error
    let times = (0.125 * b, 0.125 * b);
    let mut defects = Vec::new();
    for n in [n0, 2 * n0, 4 * n0] {
        let g = Grid::new(n, b);
        defects.push((n, group_property_defect(m, times.0, times.1, g, &QuadratureSpec::simpson(2 * n))?));
    }
    let orders: Vec<f64> = defects.windows(2).map(|w| (w[0].1 / w[1].1).log2()).collect();
    let norm = norm_drift(m, times.0 + times.1, Grid::new(n0, b), &QuadratureSpec::simpson(2 * n0))?;
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    doc.checks.push(Check::at_least("group property refinement order", min_order, 1.8, "Simpson, grid and panels doubled together"));
    doc.checks.push(Check::at_most(
        "norm conservation",
        norm.drift,
        5.0 * norm.quadrature_error,
        "slice norm drift against 5x the refinement error estimate",
    ));
    doc.propagation = Some(Propagation { mass: m, b, times, group_defects: defects, refinement_orders: orders, norm });
    Ok(())
}

/// Run one command. Errors carry the command name.
pub fn run_command(cmd: Command, spec: Option<&DomainSpecFile>, options: &RunOptions) -> Result<ReportDocument> {
    let mut doc = ReportDocument::new(cmd, spec, options);
    let d = spec.map(DomainSpecFile::validated).transpose()?;
    let need = || {
        d.as_ref().ok_or_else(|| Error::SchemaError(format!("command `{}` needs a domain spec (--spec FILE)", cmd.name())))
    };
    let r = match cmd {
        Command::Spectrum => run_spectrum(&mut doc, need()?, options),
        Command::Traces => run_traces(&mut doc, need()?, options),
        Command::Verify => run_verify(&mut doc, need()?, options),
        Command::Reconstruct => run_reconstruct(&mut doc, need()?, options),
        Command::Isospectral => run_isospectral(&mut doc, options),
        Command::Cauchy => run_cauchy(&mut doc, d.as_ref(), options),
    };
    r.map_err(|e| with_context(e, cmd))?;
    Ok(doc)
}

fn with_context(e: Error, cmd: Command) -> Error {
    let ctx = |m: String| format!("{}: {m}", cmd.name());
    match e {
        Error::InvariantViolation(m) => Error::InvariantViolation(ctx(m)),
        Error::SchemaError(m) => Error::SchemaError(ctx(m)),
        Error::EigensolverFailure(m) => Error::EigensolverFailure(ctx(m)),
        Error::RootNotFound(m) => Error::RootNotFound(ctx(m)),
        Error::NotChiral(m) => Error::NotChiral(ctx(m)),
        Error::QuadratureTooCoarse(m) => Error::QuadratureTooCoarse(ctx(m)),
        other => other,
    }
}

/// Errors caused by the user's input rather than by a computation.
pub fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvariantViolation(_)
            | Error::SyntaxError { .. }
            | Error::SchemaError(_)
            | Error::UnknownFunction(_)
            | Error::EvaluationError(_)
            | Error::Io(_)
            | Error::WindowTooSmall(_)
            | Error::EmptyInterval(..)
            | Error::NotChiral(_)
            | Error::QuadratureTooCoarse(_)
            | Error::IndexOutOfRange(_)
    )
}

#[derive(Debug, Parser)]
#[command(name = "fermisig", version, about = "Fermionic signature operators on two-dimensional domains")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Domain spec file (JSON).
    #[arg(long, conflicts_with_all = ["simple", "graph", "conformal"])]
    pub spec: Option<PathBuf>,
    /// Spec file that must describe a simple domain.
    #[arg(long)]
    pub simple: Option<PathBuf>,
    /// Spec file that must describe a graph domain.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Spec file that must describe a conformal domain.
    #[arg(long)]
    pub conformal: Option<PathBuf>,
    #[command(flatten)]
    pub options: RunOptions,
    #[arg(long, default_value = "fermisig-out")]
    pub out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "json,csv,svg")]
    pub format: Vec<Format>,
}

impl Cli {
    fn load_spec(&self) -> Result<Option<DomainSpecFile>> {
        let given: Vec<(&PathBuf, Option<&str>)> = [
            (&self.spec, None),
            (&self.simple, Some("simple")),
            (&self.graph, Some("graph")),
            (&self.conformal, Some("conformal")),
        ]
        .into_iter()
        .filter_map(|(p, k)| p.as_ref().map(|p| (p, k)))
        .collect();
        if given.len() > 1 {
            return Err(Error::SchemaError("give at most one spec file".into()));
        }
        let Some((path, kind)) = given.first() else { return Ok(None) };
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let spec = parse_domain_spec(&text)?;
        if let Some(k) = kind {
            if spec.kind() != *k {
                return Err(Error::SchemaError(format!("expected a {k} spec, found {}", spec.kind())));
            }
        }
        Ok(Some(spec))
    }
}

/// Entry point of the binary. Returns the process exit code: 0 on success,
/// 1 when a check fails or a computation breaks down, 2 on bad input.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = cli.load_spec().and_then(|spec| {
        if cli.command.needs_spec() && spec.is_none() {
            return Err(Error::SchemaError(format!("command `{}` needs --spec FILE", cli.command.name())));
        }
        let doc = run_command(cli.command, spec.as_ref(), &cli.options)?;
        let files = emit_report(&doc, &cli.format, &cli.out)?;
        Ok((doc, files))
    });
    match result {
        Ok((doc, files)) => {
            for c in &doc.checks {
                println!("{} {}: {:.6e} (limit {:.6e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.limit);
            }
            for f in files {
                println!("wrote {}", f.display());
            }
            if doc.passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if is_input_error(&e) {
                2
            } else {
                1
            }
        }
    }
}
