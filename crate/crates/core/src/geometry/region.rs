//! Regions in light-cone coordinates `u = x + t`, `w = x - t`.
//!
//! A flat domain is stored as a list of trapezoids whose `w`-bounds are
//! linear in `u`. Clipping against axis-parallel rectangles keeps that form,
//! so areas are exact and smooth integrands can be integrated per piece with
//! tensor Gauss–Legendre rules.

use crate::quad::gauss_legendre;

/// `{u0 <= u <= u1, lo(u) <= w <= hi(u)}` with `lo`, `hi` linear.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Trap {
    pub u0: f64,
    pub u1: f64,
    pub lo0: f64,
    pub lo1: f64,
    pub hi0: f64,
    pub hi1: f64,
}

/// Axis-parallel rectangle `[u0, u1] x [w0, w1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub u0: f64,
    pub u1: f64,
    pub w0: f64,
    pub w1: f64,
}

impl Rect {
    pub fn new(u0: f64, u1: f64, w0: f64, w1: f64) -> Rect {
        Rect { u0, u1, w0, w1 }
    }

    pub fn is_empty(&self) -> bool {
        self.u1 <= self.u0 || self.w1 <= self.w0
    }
}

impl Trap {
    pub fn rect(r: Rect) -> Trap {
        Trap { u0: r.u0, u1: r.u1, lo0: r.w0, lo1: r.w0, hi0: r.w1, hi1: r.w1 }
    }

    fn lerp(a: f64, b: f64, s: f64) -> f64 {
        a + (b - a) * s
    }

    pub fn lo(&self, u: f64) -> f64 {
        Self::lerp(self.lo0, self.lo1, (u - self.u0) / (self.u1 - self.u0))
    }

    pub fn hi(&self, u: f64) -> f64 {
        Self::lerp(self.hi0, self.hi1, (u - self.u0) / (self.u1 - self.u0))
    }

    /// Area in `(u, w)`; spacetime area is half of it.
    pub fn uw_area(&self) -> f64 {
        let l0 = (self.hi0 - self.lo0).max(0.0);
        let l1 = (self.hi1 - self.lo1).max(0.0);
        0.5 * (self.u1 - self.u0) * (l0 + l1)
    }

    /// Intersection with a rectangle, split so every piece is again a trapezoid.
    pub fn clip(&self, r: &Rect, out: &mut Vec<Trap>) {
        let a = self.u0.max(r.u0);
        let b = self.u1.min(r.u1);
        if b <= a {
            return;
        }
        let mut cuts = vec![a, b];
        for (p0, p1) in [(self.lo0, self.lo1), (self.hi0, self.hi1)] {
            for level in [r.w0, r.w1] {
                if p1 != p0 {
                    let s = (level - p0) / (p1 - p0);
                    let u = self.u0 + s * (self.u1 - self.u0);
                    if u > a && u < b {
                        cuts.push(u);
                    }
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        for c in cuts.windows(2) {
            let (ua, ub) = (c[0], c[1]);
            if ub - ua <= 0.0 {
                continue;
            }
            let lo0 = self.lo(ua).max(r.w0);
            let lo1 = self.lo(ub).max(r.w0);
            let hi0 = self.hi(ua).min(r.w1);
            let hi1 = self.hi(ub).min(r.w1);
            // after cutting at every crossing the width has one sign per piece
            if hi0 - lo0 <= 0.0 && hi1 - lo1 <= 0.0 {
                continue;
            }
            out.push(Trap { u0: ua, u1: ub, lo0, lo1, hi0: hi0.max(lo0), hi1: hi1.max(lo1) });
        }
    }
}

pub fn clip_all(traps: &[Trap], rects: &[Rect]) -> Vec<Trap> {
    let mut out = Vec::new();
    for r in rects.iter().filter(|r| !r.is_empty()) {
        for t in traps {
            t.clip(r, &mut out);
        }
    }
    out
}

/// Spacetime area (`dt dx = du dw / 2`).
pub fn area(traps: &[Trap]) -> f64 {
    0.5 * traps.iter().map(Trap::uw_area).sum::<f64>()
}

/// Tensor Gauss–Legendre integration of `g(t, x)` over the trapezoids with
/// respect to `dt dx`. Each trapezoid is split into `panels x panels` pieces.
pub struct TrapIntegrator {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panels: usize,
}

impl TrapIntegrator {
    pub fn new(order: usize, panels: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        TrapIntegrator {
            nodes: x.iter().map(|v| 0.5 * (v + 1.0)).collect(),
            weights: w.iter().map(|v| 0.5 * v).collect(),
            panels: panels.max(1),
        }
    }

    pub fn integrate<T, F>(&self, traps: &[Trap], zero: T, mut g: F) -> T
    where
        T: std::ops::AddAssign + std::ops::Mul<f64, Output = T> + Copy,
        F: FnMut(f64, f64) -> T,
    {
        let mut acc = zero;
        let p = self.panels as f64;
        for tr in traps {
            let du = (tr.u1 - tr.u0) / p;
            for pu in 0..self.panels {
                for (su, wu) in self.nodes.iter().zip(&self.weights) {
                    let u = tr.u0 + (pu as f64 + su) * du;
                    let (lo, hi) = (tr.lo(u), tr.hi(u));
                    if hi <= lo {
                        continue;
                    }
                    let dw = (hi - lo) / p;
                    for pw in 0..self.panels {
                        for (sw, ww) in self.nodes.iter().zip(&self.weights) {
                            let w = lo + (pw as f64 + sw) * dw;
                            let (t, x) = ((u - w) * 0.5, (u + w) * 0.5);
                            // du dw / 2 = dt dx
                            acc += g(t, x) * (0.5 * wu * du * ww * dw);
                        }
                    }
                }
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clipping_a_triangle() {
        // triangle w in [0, u], u in [0, 1]
        let tri = Trap { u0: 0.0, u1: 1.0, lo0: 0.0, lo1: 0.0, hi0: 0.0, hi1: 1.0 };
        assert!((area(&[tri]) - 0.25).abs() < 1e-15);
        let r = Rect::new(0.0, 1.0, 0.5, 1.0);
        let c = clip_all(&[tri], &[r]);
        // portion with w >= 0.5: triangle with legs 0.5 -> uw area 0.125
        assert!((2.0 * area(&c) - 0.125).abs() < 1e-15, "{c:?}");
    }

    #[test]
    fn integrator_is_exact_for_polynomials() {
        let tri = Trap { u0: 0.0, u1: 1.0, lo0: 0.0, lo1: 0.0, hi0: 0.0, hi1: 1.0 };
        let ig = TrapIntegrator::new(4, 1);
        let a = ig.integrate(&[tri], 0.0, |_, _| 1.0);
        assert!((a - 0.25).abs() < 1e-15);
        // integral of t over {0 <= w <= u <= 1} with t = (u - w)/2:
        // (1/2) * (1/2) * int_0^1 int_0^u (u - w) dw du = (1/4) * (1/6)
        let m = ig.integrate(&[tri], 0.0, |t, _| t);
        assert!((m - 1.0 / 24.0).abs() < 1e-15);
    }
}
