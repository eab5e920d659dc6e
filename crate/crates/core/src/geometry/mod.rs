//! Globally hyperbolic domains in two-dimensional Minkowski space and their
//! conformal deformations.
//!
//! Points are `(t, x)`. Light-cone coordinates are `u = x + t` and
//! `w = x - t`; the Cauchy segment is `{0} x (0, b)` and every domain lies in
//! the diamond `0 < u, w < b`.

mod domains;
pub mod region;

pub use domains::{ConformalDomain, ConformalFactor, FlatDomain, GraphDomain, Polyline, SampledField, SimpleDomain};

use crate::error::{invariant, Error, Result};
use crate::rng;
use rand::Rng;
use region::{Rect, Trap};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub t: f64,
    pub x: f64,
}

impl Point {
    pub const fn new(t: f64, x: f64) -> Point {
        Point { t, x }
    }

    pub fn from_uw(u: f64, w: f64) -> Point {
        Point { t: 0.5 * (u - w), x: 0.5 * (u + w) }
    }

    #[inline]
    pub fn u(&self) -> f64 {
        self.x + self.t
    }

    #[inline]
    pub fn w(&self) -> f64 {
        self.x - self.t
    }

    /// Minkowski square `dt^2 - dx^2` of the separation.
    pub fn interval(&self, o: &Point) -> f64 {
        let (dt, dx) = (self.t - o.t, self.x - o.x);
        dt * dt - dx * dx
    }

    /// Causally related (including lightlike and equal).
    pub fn causal(&self, o: &Point) -> bool {
        (self.u() - o.u()) * (self.w() - o.w()) <= 0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Simple(SimpleDomain),
    Graph(GraphDomain),
    Conformal(ConformalDomain),
}

/// A domain that passed validation. Everything downstream takes this type.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidatedDomain {
    domain: Domain,
    base: FlatDomain,
    traps: Vec<Trap>,
}

pub fn validate_domain(d: Domain) -> Result<ValidatedDomain> {
    let base = match &d {
        Domain::Simple(s) => FlatDomain::Simple(s.clone()),
        Domain::Graph(g) => FlatDomain::Graph(g.clone()),
        Domain::Conformal(c) => c.base.clone(),
    };
    base.validate()?;
    if let Domain::Conformal(c) = &d {
        c.factor.validate(&base)?;
    }
    let traps = base.traps();
    Ok(ValidatedDomain { domain: d, base, traps })
}

impl TryFrom<Domain> for ValidatedDomain {
    type Error = Error;
    fn try_from(d: Domain) -> Result<Self> {
        validate_domain(d)
    }
}

impl ValidatedDomain {
    pub fn diamond(b: f64) -> ValidatedDomain {
        validate_domain(Domain::Simple(SimpleDomain::diamond(b))).expect("diamond is valid")
    }

    pub fn triangle(b: f64) -> ValidatedDomain {
        validate_domain(Domain::Graph(GraphDomain::triangle(b))).expect("triangle is valid")
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn base(&self) -> &FlatDomain {
        &self.base
    }

    pub fn b(&self) -> f64 {
        self.base.b()
    }

    pub fn traps(&self) -> &[Trap] {
        &self.traps
    }

    pub fn is_conformal(&self) -> bool {
        matches!(self.domain, Domain::Conformal(_))
    }

    pub fn as_simple(&self) -> Option<&SimpleDomain> {
        match &self.domain {
            Domain::Simple(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_graph(&self) -> Option<&GraphDomain> {
        match &self.domain {
            Domain::Graph(g) => Some(g),
            _ => None,
        }
    }

    pub fn factor(&self) -> Option<&ConformalFactor> {
        match &self.domain {
            Domain::Conformal(c) => Some(&c.factor),
            _ => None,
        }
    }

    /// Strict interior test; boundary points are outside.
    pub fn contains(&self, p: Point) -> bool {
        self.base.contains(p)
    }

    /// Conformal factor, 1 for flat domains. Positivity was checked at
    /// validation, so evaluation errors inside the domain are not expected.
    #[inline]
    pub fn f(&self, p: Point) -> f64 {
        match self.factor() {
            None => 1.0,
            Some(c) => c.eval(p).unwrap_or(f64::NAN),
        }
    }

    /// Volume of the whole domain.
    pub fn total_volume(&self) -> Result<f64> {
        match self.factor() {
            None => Ok(region::area(&self.traps)),
            Some(_) => Ok(region::TrapIntegrator::new(10, 8).integrate(&self.traps, 0.0, |t, x| {
                let f = self.f(Point::new(t, x));
                f * f
            })),
        }
    }
}

/// Subsets of a domain whose volume can be requested.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionSelector {
    Whole,
    /// Causal future and past of a point.
    CausalSet { point: Point },
    /// `{x + t in left} ∩ {x - t in right}`.
    Beam { left: (f64, f64), right: (f64, f64) },
    /// Causal diamond spanned by two points; empty if they are spacelike.
    Diamond { p: Point, q: Point },
}

impl RegionSelector {
    pub fn rects(&self, b: f64) -> Vec<Rect> {
        match *self {
            RegionSelector::Whole => vec![Rect::new(0.0, b, 0.0, b)],
            RegionSelector::CausalSet { point } => {
                let (u, w) = (point.u(), point.w());
                vec![Rect::new(u, b, 0.0, w), Rect::new(0.0, u, w, b)]
            }
            RegionSelector::Beam { left, right } => vec![Rect::new(left.0, left.1, right.0, right.1)],
            RegionSelector::Diamond { p, q } => {
                if !p.causal(&q) {
                    return vec![];
                }
                vec![Rect::new(p.u().min(q.u()), p.u().max(q.u()), p.w().min(q.w()), p.w().max(q.w()))]
            }
        }
    }

    pub fn contains(&self, p: Point, b: f64) -> bool {
        self.rects(b).iter().any(|r| p.u() >= r.u0 && p.u() <= r.u1 && p.w() >= r.w0 && p.w() <= r.w1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VolumeMethod {
    Exact,
    /// Cell-centred `n x n` lattice in light-cone coordinates.
    Grid { n: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

/// Volume with an uncertainty (zero for deterministic methods).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

pub fn volume(d: &ValidatedDomain, region: &RegionSelector, method: VolumeMethod) -> Result<f64> {
    volume_estimate(d, region, method).map(|e| e.value)
}

pub fn volume_estimate(d: &ValidatedDomain, region: &RegionSelector, method: VolumeMethod) -> Result<Estimate> {
    let b = d.b();
    match method {
        VolumeMethod::Exact => {
            if d.is_conformal() {
                return Err(Error::UnsupportedExact);
            }
            let clipped = region::clip_all(d.traps(), &region.rects(b));
            Ok(Estimate { value: region::area(&clipped), std_error: 0.0 })
        }
        VolumeMethod::Grid { n } => {
            if n == 0 {
                return Err(invariant("grid needs at least one cell"));
            }
            let h = b / n as f64;
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let p = Point::from_uw((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                    if d.contains(p) && region.contains(p, b) {
                        let f = d.f(p);
                        s += f * f;
                    }
                }
            }
            Ok(Estimate { value: s * 0.5 * h * h, std_error: 0.0 })
        }
        VolumeMethod::MonteCarlo { samples, seed } => {
            let m = rng::parallel_moments(samples, seed, 1, |r, count, acc| {
                for _ in 0..count {
                    let (a, c) = rng::unit2(r);
                    let p = Point::from_uw(a * b, c * b);
                    let v = if d.contains(p) && region.contains(p, b) {
                        let f = d.f(p);
                        f * f
                    } else {
                        0.0
                    };
                    acc[0].push(v);
                }
            });
            let box_area = 0.5 * b * b;
            Ok(Estimate { value: box_area * m[0].mean(), std_error: box_area * m[0].std_error() })
        }
    }
}

/// Polygonal curve, vertices in `(t, x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub points: Vec<Point>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalType {
    Timelike,
    Spacelike,
    Lightlike,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveLength {
    pub length: f64,
    pub kind: CausalType,
}

impl CurveSample {
    pub fn new(points: Vec<Point>) -> CurveSample {
        CurveSample { points }
    }

    pub fn segment(a: Point, c: Point) -> CurveSample {
        CurveSample { points: vec![a, c] }
    }

    pub fn causal_type(&self) -> Result<CausalType> {
        let mut kind = CausalType::Lightlike;
        for s in self.points.windows(2) {
            let q = s[1].interval(&s[0]);
            let k = if q > 0.0 {
                CausalType::Timelike
            } else if q < 0.0 {
                CausalType::Spacelike
            } else {
                continue;
            };
            if kind != CausalType::Lightlike && kind != k {
                return Err(Error::MixedCausalType);
            }
            kind = k;
        }
        Ok(kind)
    }

    /// Points strictly inside every segment, used for containment checks
    /// that tolerate endpoints on the boundary.
    pub fn interior_samples(&self, per_segment: usize) -> Vec<Point> {
        let mut out = Vec::new();
        for s in self.points.windows(2) {
            for i in 0..per_segment {
                let a = (i as f64 + 0.5) / per_segment as f64;
                out.push(Point::new(s[0].t + a * (s[1].t - s[0].t), s[0].x + a * (s[1].x - s[0].x)));
            }
        }
        out
    }
}

/// Flat Lorentzian length of a curve that is entirely timelike or spacelike.
pub fn curve_length(c: &CurveSample) -> Result<CurveLength> {
    let kind = c.causal_type()?;
    let length = c.points.windows(2).map(|s| s[1].interval(&s[0]).abs().sqrt()).sum();
    Ok(CurveLength { length, kind })
}

/// Length in the metric `f^2 (dt^2 - dx^2)`.
pub fn conformal_curve_length(d: &ValidatedDomain, c: &CurveSample) -> Result<CurveLength> {
    let kind = c.causal_type()?;
    let (nodes, weights) = crate::quad::gauss_legendre(8);
    let mut length = 0.0;
    for s in c.points.windows(2) {
        let flat = s[1].interval(&s[0]).abs().sqrt();
        let panels = 8;
        for p in 0..panels {
            for (z, wt) in nodes.iter().zip(&weights) {
                let a = (p as f64 + 0.5 * (z + 1.0)) / panels as f64;
                let q = Point::new(s[0].t + a * (s[1].t - s[0].t), s[0].x + a * (s[1].x - s[0].x));
                length += d.f(q) * flat * 0.5 * wt / panels as f64;
            }
        }
    }
    Ok(CurveLength { length, kind })
}

/// Volume of cell `(k, l)` (0-based); zero when the cell is not in the domain.
pub fn cell_area(d: &ValidatedDomain, k: usize, l: usize) -> Result<f64> {
    let s = d.as_simple().ok_or_else(|| invariant("cell areas exist only for simple domains"))?;
    let n = s.cells();
    if k >= n || l >= n {
        return Err(Error::IndexOutOfRange(format!("cell ({k}, {l}) with K = {n}")));
    }
    Ok(if s.incidence[k][l] { 0.5 * s.width(k) * s.width(l) } else { 0.0 })
}

/// Scalar curvature `R = -(2 / f^2) (d_t^2 - d_x^2) log f`.
pub fn scalar_curvature(d: &ValidatedDomain, p: Point) -> Result<f64> {
    let Some(factor) = d.factor() else {
        return Ok(0.0);
    };
    let [f, ft, fx, ftt, fxx] = factor.jet(p)?;
    let box_log = (ftt - fxx) / f - (ft * ft - fx * fx) / (f * f);
    Ok(-2.0 / (f * f) * box_log)
}

/// Integral of `R dμ` over the lightlike rectangle with opposite corners
/// `p`, `q`, evaluated from the values of `log f` at its four corners.
pub fn diamond_curvature_integral(d: &ValidatedDomain, p: Point, q: Point) -> Result<f64> {
    let eta = Point::from_uw(p.u(), q.w());
    let eta2 = Point::from_uw(q.u(), p.w());
    for c in [p, q, eta, eta2] {
        if !d.contains(c) {
            return Err(Error::CornerOutsideDomain);
        }
    }
    let Some(factor) = d.factor() else {
        return Ok(0.0);
    };
    let lf = |c: Point| factor.eval(c).map(f64::ln);
    Ok(-4.0 * (lf(p)? + lf(q)? - lf(eta)? - lf(eta2)?))
}

/// Random causally convex simple domain: `k` cells with widths drawn from
/// `[0.5, 1.5]` (then scaled to total width `b`), diagonal plus up to three
/// random cells, closed under causal convexity.
pub fn random_simple_domain(seed: u64, stream: u64, max_cells: usize, b: f64) -> SimpleDomain {
    let mut r = rng::stream(seed, stream);
    let k = r.random_range(1..=max_cells.max(1));
    let raw: Vec<f64> = (0..k).map(|_| 0.5 + r.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let widths: Vec<f64> = raw.iter().map(|w| w * b / total).collect();
    let extra = if k > 1 { r.random_range(0..=3) } else { 0 };
    let cells: Vec<(usize, usize)> = (0..extra).map(|_| (r.random_range(0..k), r.random_range(0..k))).collect();
    let mut d = SimpleDomain::from_widths(&widths, &cells);
    // the last breakpoint must equal b exactly
    *d.breakpoints.last_mut().unwrap() = b;
    d.causal_closure();
    d
}
