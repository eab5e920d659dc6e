use super::region::{Rect, Trap};
use super::Point;
use crate::error::{invariant, Result};
use crate::expr::{Expression, Var};
use serde::{Deserialize, Serialize};

/// Slope tolerance when checking that graph boundaries are non-timelike.
const SLOPE_TOL: f64 = 1e-12;

/// Union of lightlike rectangles over a partition `0 = x_0 < ... < x_K = b`.
///
/// Cell `(k, l)` (0-based) is the set of points with `x - t` in the `k`-th
/// interval and `x + t` in the `l`-th interval; `l > k` lies in the future of
/// the Cauchy segment and `l < k` in its past.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimpleDomain {
    pub breakpoints: Vec<f64>,
    /// `incidence[k][l]` is true when cell `(k, l)` belongs to the domain.
    pub incidence: Vec<Vec<bool>>,
}

/// Domain between two piecewise-linear graphs `T_-(x) < t < T_+(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDomain {
    pub b: f64,
    pub upper: Polyline,
    pub lower: Polyline,
}

/// Piecewise-linear function given by its vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlatDomain {
    Simple(SimpleDomain),
    Graph(GraphDomain),
}

/// Metric `f^2 (dt^2 - dx^2)` on a flat base domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalDomain {
    pub base: FlatDomain,
    pub factor: ConformalFactor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConformalFactor {
    Expression { expr: Expression },
    Grid(SampledField),
}

/// Samples on a uniform `(t, x)` lattice, evaluated by bilinear interpolation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledField {
    pub t_range: (f64, f64),
    pub x_range: (f64, f64),
    pub nt: usize,
    pub nx: usize,
    /// Row-major, `values[i * nx + j]` at `t_i`, `x_j`.
    pub values: Vec<f64>,
}

impl Polyline {
    pub fn new(xs: Vec<f64>, ts: Vec<f64>) -> Polyline {
        Polyline { xs, ts }
    }

    pub fn zero(b: f64) -> Polyline {
        Polyline { xs: vec![0.0, b], ts: vec![0.0, 0.0] }
    }

    /// `sign * min(x, b - x)`: the boundary of the full diamond.
    pub fn tent(b: f64, sign: f64) -> Polyline {
        Polyline { xs: vec![0.0, 0.5 * b, b], ts: vec![0.0, sign * 0.5 * b, 0.0] }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.xs.partition_point(|&v| v <= x);
        if i == 0 {
            return self.ts[0];
        }
        if i == self.xs.len() {
            return *self.ts.last().unwrap();
        }
        let (x0, x1, t0, t1) = (self.xs[i - 1], self.xs[i], self.ts[i - 1], self.ts[i]);
        t0 + (t1 - t0) * (x - x0) / (x1 - x0)
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.xs
            .windows(2)
            .zip(self.ts.windows(2))
            .map(|(x, t)| (t[1] - t[0]) / (x[1] - x[0]))
            .collect()
    }

    /// Total variation of the derivative, counting the jumps from slope 0
    /// outside `[0, b]` at both endpoints.
    pub fn derivative_variation(&self) -> f64 {
        let s = self.slopes();
        let mut tv = s[0].abs() + s[s.len() - 1].abs();
        for w in s.windows(2) {
            tv += (w[1] - w[0]).abs();
        }
        tv
    }

    fn validate(&self, b: f64, name: &str) -> Result<()> {
        let n = self.xs.len();
        if n < 2 || self.ts.len() != n {
            return Err(invariant(format!("{name}: need at least two vertices with matching lengths")));
        }
        if self.xs[0] != 0.0 || (self.xs[n - 1] - b).abs() > 1e-12 * b.max(1.0) {
            return Err(invariant(format!("{name}: vertices must span [0, b]")));
        }
        if self.ts[0] != 0.0 || self.ts[n - 1] != 0.0 {
            return Err(invariant(format!("{name}: must vanish at both endpoints")));
        }
        if self.xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invariant(format!("{name}: x vertices must increase strictly")));
        }
        if self.ts.iter().chain(&self.xs).any(|v| !v.is_finite()) {
            return Err(invariant(format!("{name}: non-finite vertex")));
        }
        if self.slopes().iter().any(|s| s.abs() > 1.0 + SLOPE_TOL) {
            return Err(invariant(format!("{name}: slope exceeds 1 in absolute value")));
        }
        Ok(())
    }
}

impl SimpleDomain {
    pub fn new(breakpoints: Vec<f64>, incidence: Vec<Vec<bool>>) -> SimpleDomain {
        SimpleDomain { breakpoints, incidence }
    }

    /// The single diamond over `(0, b)`.
    pub fn diamond(b: f64) -> SimpleDomain {
        SimpleDomain { breakpoints: vec![0.0, b], incidence: vec![vec![true]] }
    }

    /// Cells with widths `widths`, keeping the diagonal plus the listed
    /// off-diagonal cells.
    pub fn from_widths(widths: &[f64], cells: &[(usize, usize)]) -> SimpleDomain {
        let k = widths.len();
        let mut bp = vec![0.0];
        for w in widths {
            bp.push(bp.last().unwrap() + w);
        }
        let mut inc = vec![vec![false; k]; k];
        for (i, row) in inc.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, c) in cells {
            inc[a][c] = true;
        }
        SimpleDomain { breakpoints: bp, incidence: inc }
    }

    pub fn cells(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn b(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn width(&self, k: usize) -> f64 {
        self.breakpoints[k + 1] - self.breakpoints[k]
    }

    pub fn widths(&self) -> Vec<f64> {
        (0..self.cells()).map(|k| self.width(k)).collect()
    }

    /// `(k, l)` precedes `(k2, l2)` in the causal order of cells.
    pub fn precedes(a: (usize, usize), c: (usize, usize)) -> bool {
        c.0 <= a.0 && a.1 <= c.1
    }

    /// Cells forced into the domain by causal convexity, iterated to a
    /// fixed point. Used to turn arbitrary cell sets into valid domains.
    pub fn causal_closure(&mut self) {
        let k = self.cells();
        loop {
            let mut changed = false;
            let cells: Vec<(usize, usize)> = (0..k)
                .flat_map(|a| (0..k).map(move |c| (a, c)))
                .filter(|&(a, c)| self.incidence[a][c])
                .collect();
            for &p in &cells {
                for &q in &cells {
                    if Self::precedes(p, q) {
                        for a in q.0..=p.0 {
                            for c in p.1..=q.1 {
                                if !self.incidence[a][c] {
                                    self.incidence[a][c] = true;
                                    changed = true;
                                }
                            }
                        }
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let k = self.cells();
        if self.breakpoints.len() < 2 {
            return Err(invariant("simple domain needs at least one cell"));
        }
        if self.breakpoints[0] != 0.0 {
            return Err(invariant("first breakpoint must be 0"));
        }
        if self.breakpoints.iter().any(|v| !v.is_finite()) || self.breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invariant("breakpoints must increase strictly"));
        }
        if self.incidence.len() != k || self.incidence.iter().any(|r| r.len() != k) {
            return Err(invariant("incidence must be K x K"));
        }
        if (0..k).any(|i| !self.incidence[i][i]) {
            return Err(invariant("every diagonal cell must be present"));
        }
        for a in 0..k {
            for c in 0..k {
                if !self.incidence[a][c] {
                    continue;
                }
                for a2 in 0..k {
                    for c2 in 0..k {
                        if !self.incidence[a2][c2] || !Self::precedes((a, c), (a2, c2)) {
                            continue;
                        }
                        for a3 in a2..=a {
                            for c3 in c..=c2 {
                                if !self.incidence[a3][c3] {
                                    return Err(invariant(format!(
                                        "not causally convex: cell ({a3}, {c3}) lies between ({a}, {c}) and ({a2}, {c2})"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Interval indices touched by `v`; `None` when `v` is on or outside the
    /// outer boundary.
    fn touching(&self, v: f64) -> Option<(usize, usize)> {
        let bp = &self.breakpoints;
        let k = self.cells();
        if v <= 0.0 || v >= bp[k] {
            return None;
        }
        let i = bp.partition_point(|&p| p < v); // bp[i-1] < v <= bp[i]
        if bp[i] == v {
            Some((i - 1, i))
        } else {
            Some((i - 1, i - 1))
        }
    }

    pub fn contains_uw(&self, u: f64, w: f64) -> bool {
        let (Some((l0, l1)), Some((k0, k1))) = (self.touching(u), self.touching(w)) else {
            return false;
        };
        (k0..=k1).all(|k| (l0..=l1).all(|l| self.incidence[k][l]))
    }

    /// `T[k][l] = sqrt(area of cell (k, l))`: rows run over `x - t`
    /// intervals, columns over `x + t` intervals.
    pub fn t_matrix(&self) -> Vec<Vec<f64>> {
        let k = self.cells();
        (0..k)
            .map(|kk| {
                (0..k)
                    .map(|l| if self.incidence[kk][l] { (0.5 * self.width(kk) * self.width(l)).sqrt() } else { 0.0 })
                    .collect()
            })
            .collect()
    }

    fn traps(&self) -> Vec<Trap> {
        let k = self.cells();
        let mut out = Vec::new();
        for l in 0..k {
            // merge consecutive w-intervals in this u-column
            let mut kk = 0;
            while kk < k {
                if !self.incidence[kk][l] {
                    kk += 1;
                    continue;
                }
                let start = kk;
                while kk < k && self.incidence[kk][l] {
                    kk += 1;
                }
                out.push(Trap::rect(Rect::new(
                    self.breakpoints[l],
                    self.breakpoints[l + 1],
                    self.breakpoints[start],
                    self.breakpoints[kk],
                )));
            }
        }
        out
    }
}

impl GraphDomain {
    pub fn new(b: f64, upper: Polyline, lower: Polyline) -> GraphDomain {
        GraphDomain { b, upper, lower }
    }

    pub fn diamond(b: f64) -> GraphDomain {
        GraphDomain { b, upper: Polyline::tent(b, 1.0), lower: Polyline::tent(b, -1.0) }
    }

    /// Future half of the diamond: `0 < t < min(x, b - x)`.
    pub fn triangle(b: f64) -> GraphDomain {
        GraphDomain { b, upper: Polyline::tent(b, 1.0), lower: Polyline::zero(b) }
    }

    fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(invariant("b must be positive"));
        }
        self.upper.validate(self.b, "upper boundary")?;
        self.lower.validate(self.b, "lower boundary")?;
        let mut xs: Vec<f64> = self.upper.xs.iter().chain(&self.lower.xs).copied().collect();
        xs.sort_by(f64::total_cmp);
        for x in xs {
            if self.upper.eval(x) < 0.0 || self.lower.eval(x) > 0.0 {
                return Err(invariant("need lower <= 0 <= upper"));
            }
        }
        if super::region::area(&self.traps()) <= 0.0 {
            return Err(invariant("graph domain has zero volume"));
        }
        Ok(())
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x > 0.0 && p.x < self.b && p.t < self.upper.eval(p.x) && p.t > self.lower.eval(p.x)
    }

    /// `g(z) = z + T(z)`, nondecreasing because slopes are at least -1.
    fn g_vertices(poly: &Polyline) -> Vec<(f64, f64)> {
        poly.xs.iter().zip(&poly.ts).map(|(&z, &t)| (z, z + t)).collect()
    }

    /// `sup { z : g(z) <= u }`
    fn sup_below(g: &[(f64, f64)], u: f64) -> f64 {
        let i = g.partition_point(|&(_, gv)| gv <= u);
        if i == 0 {
            return g[0].0;
        }
        if i == g.len() {
            return g[g.len() - 1].0;
        }
        let ((z0, g0), (z1, g1)) = (g[i - 1], g[i]);
        z0 + (u - g0) / (g1 - g0) * (z1 - z0)
    }

    /// `inf { z : g(z) >= u }`
    fn inf_above(g: &[(f64, f64)], u: f64) -> f64 {
        let i = g.partition_point(|&(_, gv)| gv < u);
        if i == 0 {
            return g[0].0;
        }
        if i == g.len() {
            return g[g.len() - 1].0;
        }
        let ((z0, g0), (z1, g1)) = (g[i - 1], g[i]);
        z0 + (u - g0) / (g1 - g0) * (z1 - z0)
    }

    fn traps(&self) -> Vec<Trap> {
        let gp = Self::g_vertices(&self.upper);
        let gm = Self::g_vertices(&self.lower);
        let mut breaks: Vec<f64> = gp.iter().chain(&gm).map(|v| v.1.clamp(0.0, self.b)).collect();
        breaks.push(0.0);
        breaks.push(self.b);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let lo = |u: f64| 2.0 * Self::sup_below(&gp, u) - u;
        let hi = |u: f64| 2.0 * Self::inf_above(&gm, u) - u;
        let mut out = Vec::new();
        for c in breaks.windows(2) {
            let (a, b) = (c[0], c[1]);
            if b <= a {
                continue;
            }
            // both bounds are linear on (a, b); recover end values from interior samples
            let (s1, s2) = (a + 0.25 * (b - a), a + 0.75 * (b - a));
            let ext = |f: &dyn Fn(f64) -> f64| {
                let (f1, f2) = (f(s1), f(s2));
                let slope = (f2 - f1) / (s2 - s1);
                (f1 - slope * (s1 - a), f2 + slope * (b - s2))
            };
            let (lo0, lo1) = ext(&lo);
            let (hi0, hi1) = ext(&hi);
            if hi0 - lo0 <= 0.0 && hi1 - lo1 <= 0.0 {
                continue;
            }
            out.push(Trap { u0: a, u1: b, lo0, lo1, hi0, hi1 });
        }
        out
    }
}

impl FlatDomain {
    pub fn b(&self) -> f64 {
        match self {
            FlatDomain::Simple(s) => s.b(),
            FlatDomain::Graph(g) => g.b,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match self {
            FlatDomain::Simple(s) => s.contains_uw(p.u(), p.w()),
            FlatDomain::Graph(g) => g.contains(p),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            FlatDomain::Simple(s) => s.validate(),
            FlatDomain::Graph(g) => g.validate(),
        }
    }

    /// Exact decomposition into light-cone trapezoids.
    pub fn traps(&self) -> Vec<Trap> {
        match self {
            FlatDomain::Simple(s) => s.traps(),
            FlatDomain::Graph(g) => g.traps(),
        }
    }

    /// Vertices of the boundary polygon(s) in `(t, x)`, counter-clockwise in
    /// the `(x, t)` plane.
    pub fn polygons(&self) -> Vec<Vec<Point>> {
        match self {
            FlatDomain::Simple(s) => {
                let k = s.cells();
                let mut polys = Vec::new();
                for kk in 0..k {
                    for l in 0..k {
                        if !s.incidence[kk][l] {
                            continue;
                        }
                        let (w0, w1) = (s.breakpoints[kk], s.breakpoints[kk + 1]);
                        let (u0, u1) = (s.breakpoints[l], s.breakpoints[l + 1]);
                        polys.push(vec![
                            Point::from_uw(u0, w0),
                            Point::from_uw(u0, w1),
                            Point::from_uw(u1, w1),
                            Point::from_uw(u1, w0),
                        ]);
                    }
                }
                polys
            }
            FlatDomain::Graph(g) => {
                let mut poly: Vec<Point> = g.lower.xs.iter().zip(&g.lower.ts).map(|(&x, &t)| Point::new(t, x)).collect();
                let n = g.upper.xs.len();
                for i in (1..n - 1).rev() {
                    poly.push(Point::new(g.upper.ts[i], g.upper.xs[i]));
                }
                vec![poly]
            }
        }
    }
}

impl SampledField {
    pub fn spacing(&self) -> (f64, f64) {
        (
            (self.t_range.1 - self.t_range.0) / (self.nt - 1) as f64,
            (self.x_range.1 - self.x_range.0) / (self.nx - 1) as f64,
        )
    }

    pub fn in_range(&self, t: f64, x: f64) -> bool {
        t >= self.t_range.0 && t <= self.t_range.1 && x >= self.x_range.0 && x <= self.x_range.1
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let (ht, hx) = self.spacing();
        let ft = ((t - self.t_range.0) / ht).clamp(0.0, (self.nt - 1) as f64);
        let fx = ((x - self.x_range.0) / hx).clamp(0.0, (self.nx - 1) as f64);
        let i = (ft.floor() as usize).min(self.nt - 2);
        let j = (fx.floor() as usize).min(self.nx - 2);
        let (a, c) = (ft - i as f64, fx - j as f64);
        let v = |i: usize, j: usize| self.values[i * self.nx + j];
        (1.0 - a) * ((1.0 - c) * v(i, j) + c * v(i, j + 1)) + a * ((1.0 - c) * v(i + 1, j) + c * v(i + 1, j + 1))
    }

    fn validate(&self) -> Result<()> {
        if self.nt < 2 || self.nx < 2 || self.values.len() != self.nt * self.nx {
            return Err(invariant("sampled field needs at least 2 x 2 values"));
        }
        if !(self.t_range.1 > self.t_range.0 && self.x_range.1 > self.x_range.0) {
            return Err(invariant("sampled field ranges must be increasing"));
        }
        Ok(())
    }
}

impl ConformalFactor {
    pub fn expression(src: &str) -> Result<ConformalFactor> {
        Ok(ConformalFactor::Expression { expr: Expression::parse(src)? })
    }

    pub fn eval(&self, p: Point) -> Result<f64> {
        match self {
            ConformalFactor::Expression { expr } => expr.eval(p.t, p.x),
            ConformalFactor::Grid(g) => Ok(g.eval(p.t, p.x)),
        }
    }

    /// `(f, f_t, f_x, f_tt, f_xx)` at `p`.
    pub(crate) fn jet(&self, p: Point) -> Result<[f64; 5]> {
        match self {
            ConformalFactor::Expression { expr } => {
                let ft = expr.derivative(Var::T);
                let fx = expr.derivative(Var::X);
                Ok([
                    expr.eval(p.t, p.x)?,
                    ft.eval(p.t, p.x)?,
                    fx.eval(p.t, p.x)?,
                    ft.derivative(Var::T).eval(p.t, p.x)?,
                    fx.derivative(Var::X).eval(p.t, p.x)?,
                ])
            }
            ConformalFactor::Grid(g) => {
                let (ht, hx) = g.spacing();
                for (dt, dx) in [(ht, 0.0), (-ht, 0.0), (0.0, hx), (0.0, -hx)] {
                    if !g.in_range(p.t + dt, p.x + dx) {
                        return Err(crate::error::Error::BoundaryTooClose);
                    }
                }
                let f = |dt: f64, dx: f64| g.eval(p.t + dt, p.x + dx);
                let f0 = f(0.0, 0.0);
                Ok([
                    f0,
                    (f(ht, 0.0) - f(-ht, 0.0)) / (2.0 * ht),
                    (f(0.0, hx) - f(0.0, -hx)) / (2.0 * hx),
                    (f(ht, 0.0) - 2.0 * f0 + f(-ht, 0.0)) / (ht * ht),
                    (f(0.0, hx) - 2.0 * f0 + f(0.0, -hx)) / (hx * hx),
                ])
            }
        }
    }

    pub(crate) fn validate(&self, base: &FlatDomain) -> Result<()> {
        if let ConformalFactor::Grid(g) = self {
            g.validate()?;
        }
        // positivity on a lattice covering the closed domain
        let b = base.b();
        let n = 64;
        for i in 0..=n {
            for j in 0..=n {
                let p = Point::from_uw(b * i as f64 / n as f64, b * j as f64 / n as f64);
                let inside = base.contains(p) || i == 0 || j == 0 || i == n || j == n;
                if !inside {
                    continue;
                }
                let v = self.eval(p)?;
                if !(v > 0.0 && v.is_finite()) {
                    return Err(invariant(format!("conformal factor {v} is not positive at (t, x) = ({}, {})", p.t, p.x)));
                }
            }
        }
        Ok(())
    }
}
