//! One-dimensional quadrature rules.

use serde::{Deserialize, Serialize};

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// How a one-dimensional integral is discretised. `panels` counts panels per
/// full Cauchy interval (0, b); sub-intervals get a proportional share.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: QuadRule,
    pub panels: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadRule {
    Simpson,
    GaussLegendre(usize),
}

impl QuadratureSpec {
    pub fn simpson(panels: usize) -> Self {
        QuadratureSpec { rule: QuadRule::Simpson, panels }
    }

    pub fn gauss(order: usize, panels: usize) -> Self {
        QuadratureSpec { rule: QuadRule::GaussLegendre(order), panels }
    }

    /// Sample points per full interval; used to judge coarseness.
    pub fn resolution(&self) -> usize {
        match self.rule {
            QuadRule::Simpson => 2 * self.panels,
            QuadRule::GaussLegendre(k) => k * self.panels,
        }
    }

    /// Same rule with twice the panels.
    pub fn refined(&self) -> Self {
        QuadratureSpec { rule: self.rule, panels: 2 * self.panels }
    }
}

/// A reusable rule: nodes/weights for one panel on [0, 1].
#[derive(Clone, Debug)]
pub struct PanelRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panels_per_unit: f64,
}

impl PanelRule {
    pub fn new(spec: &QuadratureSpec, full_length: f64) -> Self {
        let (nodes, weights) = match spec.rule {
            QuadRule::Simpson => (vec![0.0, 0.5, 1.0], vec![1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0]),
            QuadRule::GaussLegendre(k) => {
                let (x, w) = gauss_legendre(k);
                (
                    x.iter().map(|v| 0.5 * (v + 1.0)).collect(),
                    w.iter().map(|v| 0.5 * v).collect(),
                )
            }
        };
        PanelRule { nodes, weights, panels_per_unit: spec.panels as f64 / full_length }
    }

    /// Visit `(point, weight)` pairs covering [a, b].
    pub fn for_each(&self, a: f64, b: f64, mut f: impl FnMut(f64, f64)) {
        if b <= a {
            return;
        }
        let panels = ((b - a) * self.panels_per_unit).ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let left = a + p as f64 * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                f(left + x * h, w * h);
            }
        }
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut s = 0.0;
        self.for_each(a, b, |x, w| s += w * f(x));
        s
    }
}
