//! Certified enclosure of the fiber densities
//! `rho_q(x) = int_{Z_q} dy / (1 + x y)^2`.
//!
//! The fiber sets satisfy `Z_q' = [q' = S] [0, c] u U_{q -a-> q'} N_a Z_q`
//! with almost disjoint pieces, so the densities solve
//!
//! `rho_q'(x) = [q' = S] c/(1 + c x) + sum (x + d_a)^-2 rho_q(eps_a / (x + d_a))`.
//!
//! Starting from `0` and from `1/(1+x)` (fiber `[0,1]`), the iteration gives
//! lower and upper bounds at every step. Between grid nodes, upper values are
//! interpolated by chords (every `rho_q` is convex) and lower values by chords
//! divided by `1 + 3 t (1-t) h^2 A^2`, `A = 1/(1 + x_j)`, which bounds any
//! mixture of `(1 + x y)^-2`, `0 <= y <= 1`, from below.
//!
//! All sums have positive terms, so floating rounding is absorbed by a
//! relative slack applied at every update and to the final integrals.

use crate::automaton::{LanguageAutomaton, S};
use crate::error::{Error, Result};

/// Relative slack per update, far above the rounding error of the few
/// positive-term operations involved.
pub const SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
struct Edge {
    from: usize,
    eps: f64,
    d: f64,
}

#[derive(Clone, Debug)]
pub struct DensityEnclosure {
    pub x0: f64,
    pub h: f64,
    pub n: usize,
    pub lower: Vec<Vec<f64>>,
    pub upper: Vec<Vec<f64>>,
    pub iterations: usize,
    c: f64,
    nodes: Vec<f64>,
    /// `1 / (1 + 3/4 h^2 A_j^2)` per cell.
    cell_factor: Vec<f64>,
    a2: Vec<f64>,
}

impl DensityEnclosure {
    /// Grid over `[x_lo, x_hi]` with spacing at most `h`. The interval must
    /// contain `[alpha-1, alpha]` and be mapped into itself by all branches;
    /// [`domain_for`] gives the smallest such interval.
    pub fn new(aut: &LanguageAutomaton, x_lo: f64, x_hi: f64, h: f64) -> Result<Self> {
        if !(x_lo > -1.0) || !(x_hi > x_lo) || !(h > 0.0) {
            return Err(Error::Domain(format!("bad density grid [{}, {}] step {}", x_lo, x_hi, h)));
        }
        let cells = ((x_hi - x_lo) / h).ceil() as usize;
        if cells > 50_000_000 {
            return Err(Error::BudgetExceeded(format!("density grid of {} cells", cells)));
        }
        let cells = cells.max(1);
        let h = (x_hi - x_lo) / cells as f64;
        let n = cells + 1;
        let nodes: Vec<f64> = (0..n).map(|i| x_lo + i as f64 * h).collect();
        let a2: Vec<f64> = nodes.iter().map(|&x| 1.0 / ((1.0 + x) * (1.0 + x))).collect();
        let cell_factor = a2.iter().map(|&a2| 1.0 / (1.0 + 0.75 * h * h * a2)).collect();
        let upper = vec![nodes.iter().map(|&x| 1.0 / (1.0 + x)).collect::<Vec<f64>>(); aut.len()];
        let lower = vec![vec![0.0; n]; aut.len()];
        let c = 1.0 / (aut.d as f64 + 1.0);
        Ok(DensityEnclosure { x0: x_lo, h, n, lower, upper, iterations: 0, c, nodes, cell_factor, a2 })
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let t = (x - self.x0) / self.h;
        let j = (t.floor().max(0.0) as usize).min(self.n - 2);
        let theta = (t - j as f64).clamp(0.0, 1.0);
        (j, theta)
    }

    /// Upper bound on `rho_q(x)`. Left of the grid, `rho_q(x) <= rho_q(x0)
    /// ((1 + x0)/(1 + x))^2` since the ratio of the kernels is largest at
    /// `y = 1`; right of it, `rho_q` is decreasing.
    pub fn eval_upper(&self, q: usize, x: f64) -> f64 {
        let u = &self.upper[q];
        if x < self.x0 {
            let r = (1.0 + self.x0) / (1.0 + x);
            return u[0] * r * r * (1.0 + SLACK);
        }
        let (j, t) = self.locate(x);
        (1.0 - t) * u[j] + t * u[j + 1]
    }

    /// Lower bound on `rho_q(x)`, by the mirror arguments outside the grid.
    pub fn eval_lower(&self, q: usize, x: f64) -> f64 {
        let l = &self.lower[q];
        let x_end = self.nodes[self.n - 1];
        if x < self.x0 {
            return l[0];
        }
        if x > x_end {
            let r = (1.0 + x_end) / (1.0 + x);
            return l[self.n - 1] * r * r * (1.0 - SLACK);
        }
        let (j, t) = self.locate(x);
        let chord = (1.0 - t) * l[j] + t * l[j + 1];
        chord / (1.0 + 3.0 * t * (1.0 - t) * self.h * self.h * self.a2[j])
    }

    /// One Gauss-Seidel sweep over all states and nodes.
    fn sweep(&mut self, pred: &[Vec<Edge>]) {
        let c = self.c;
        for (q, edges) in pred.iter().enumerate() {
            for i in 0..self.n {
                let x = self.nodes[i];
                let src = if q == S { c / (1.0 + c * x) } else { 0.0 };
                let mut up = src;
                let mut lo = src;
                for e in edges {
                    let s = x + e.d;
                    let w = 1.0 / (s * s);
                    let z = e.eps / s;
                    up += w * self.eval_upper(e.from, z);
                    lo += w * self.eval_lower(e.from, z);
                }
                let up = up * (1.0 + SLACK);
                let lo = lo * (1.0 - SLACK);
                if up < self.upper[q][i] {
                    self.upper[q][i] = up;
                }
                if lo > self.lower[q][i] {
                    self.lower[q][i] = lo;
                }
            }
        }
        self.iterations += 1;
    }

    /// Certified `(lo, hi)` for `int_a^b rho_q`, with `x0 <= a <= b <= x_n`
    /// (the caller rounds `a`, `b` outward for `hi` and inward for `lo`).
    pub fn integral(&self, q: usize, a: f64, b: f64) -> (f64, f64) {
        if b <= a {
            return (0.0, 0.0);
        }
        let (ja, ta) = self.locate(a);
        let (jb, tb) = self.locate(b);
        let (l, u) = (&self.lower[q], &self.upper[q]);
        let chord = |v: &[f64], j: usize, t: f64| (1.0 - t) * v[j] + t * v[j + 1];
        let mut lo = 0.0;
        let mut hi = 0.0;
        if ja == jb {
            let w = b - a;
            hi += w * 0.5 * (chord(u, ja, ta) + chord(u, ja, tb));
            lo += w * 0.5 * (chord(l, ja, ta) + chord(l, ja, tb)) * self.cell_factor[ja];
        } else {
            let w = self.nodes[ja + 1] - a;
            hi += w * 0.5 * (chord(u, ja, ta) + u[ja + 1]);
            lo += w * 0.5 * (chord(l, ja, ta) + l[ja + 1]) * self.cell_factor[ja];
            for j in ja + 1..jb {
                hi += self.h * 0.5 * (u[j] + u[j + 1]);
                lo += self.h * 0.5 * (l[j] + l[j + 1]) * self.cell_factor[j];
            }
            let w = b - self.nodes[jb];
            hi += w * 0.5 * (u[jb] + chord(u, jb, tb));
            lo += w * 0.5 * (l[jb] + chord(l, jb, tb)) * self.cell_factor[jb];
        }
        (lo * (1.0 - SLACK), hi * (1.0 + SLACK))
    }
}

fn edges(aut: &LanguageAutomaton) -> Vec<Vec<Edge>> {
    aut.predecessors()
        .into_iter()
        .map(|ps| ps.into_iter().map(|(from, a)| Edge { from, eps: a.eps as f64, d: a.d as f64 }).collect())
        .collect()
}

/// Interval `[lo, hi]` containing `[x_lo, alpha]` and every point on which
/// the densities there depend: per state, the ranges grow by the preimages
/// `eps/(x + d)` of the ranges of the successors until they are stable.
/// Points outside the grid are still handled soundly by extrapolation.
pub fn domain_for(aut: &LanguageAutomaton, x_lo: f64) -> (f64, f64) {
    let alpha = aut.alpha.to_f64();
    let mut r: Vec<(f64, f64)> = aut.states.iter().map(|s| (s.point.to_f64().min(alpha), alpha)).collect();
    r[S].0 = r[S].0.min(x_lo).min(alpha - 1.0);
    let pred = edges(aut);
    for _ in 0..200 {
        let mut changed = false;
        for (t, es) in pred.iter().enumerate() {
            let (l, u) = r[t];
            for e in es {
                let (a, b) = if e.eps < 0.0 { (-1.0 / (l + e.d), -1.0 / (u + e.d)) } else { (1.0 / (u + e.d), 1.0 / (l + e.d)) };
                let cur = &mut r[e.from];
                if a < cur.0 - 1e-15 || b > cur.1 + 1e-15 {
                    changed = true;
                }
                cur.0 = cur.0.min(a).max(-0.99);
                cur.1 = cur.1.max(b);
            }
        }
        if !changed {
            break;
        }
    }
    let lo = r.iter().map(|x| x.0).fold(f64::INFINITY, f64::min);
    let hi = r.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
    (lo.next_down(), hi.next_up().next_up())
}

/// Interval endpoint pairs `[a_q, b_q]` to integrate per state, in f64
/// rounded outward (`outer`) and inward (`inner`).
#[derive(Clone, Debug)]
pub struct Ranges {
    pub inner: Vec<(usize, f64, f64)>,
    pub outer: Vec<(usize, f64, f64)>,
}

impl Ranges {
    /// `J_q = [point_q, alpha]` for every state.
    pub fn omega(aut: &LanguageAutomaton) -> Ranges {
        let alpha = crate::hiprec::from_exact(&aut.alpha, 80);
        let (a_lo, a_hi) = (crate::hiprec::to_f64_down(&alpha), crate::hiprec::to_f64_up(&alpha));
        let mut inner = Vec::new();
        let mut outer = Vec::new();
        for (q, s) in aut.states.iter().enumerate() {
            let p = crate::hiprec::from_exact(&s.point, 80);
            let (p_lo, p_hi) = (crate::hiprec::to_f64_down(&p), crate::hiprec::to_f64_up(&p));
            inner.push((q, p_hi, a_lo));
            outer.push((q, p_lo, a_hi));
        }
        Ranges { inner, outer }
    }
}

/// Result of a density computation.
#[derive(Clone, Debug)]
pub struct DensityBracket {
    pub lo: f64,
    pub hi: f64,
    pub h: f64,
    pub iterations: usize,
}

/// Iterates until the bracket of `sum int rho_q` over `ranges` is narrower
/// than `tol`, stalls, or `max_iter` sweeps pass.
pub fn solve(enc: &mut DensityEnclosure, aut: &LanguageAutomaton, ranges: &Ranges, tol: f64, max_iter: usize) -> DensityBracket {
    let pred = edges(aut);
    let measure = |enc: &DensityEnclosure| {
        let lo: f64 = ranges.inner.iter().map(|&(q, a, b)| enc.integral(q, a, b).0).sum();
        let hi: f64 = ranges.outer.iter().map(|&(q, a, b)| enc.integral(q, a, b).1).sum();
        (lo * (1.0 - SLACK), hi * (1.0 + SLACK))
    };
    let mut best = (0.0f64, f64::INFINITY);
    let mut stall = 0;
    for _ in 0..max_iter {
        enc.sweep(&pred);
        let (lo, hi) = measure(enc);
        let improved = (best.1 - best.0) - (hi - lo) > 1e-4 * (hi - lo);
        best = (best.0.max(lo), best.1.min(hi));
        if best.1 - best.0 <= tol {
            break;
        }
        stall = if improved { 0 } else { stall + 1 };
        if stall >= 3 {
            break;
        }
    }
    DensityBracket { lo: best.0, hi: best.1, h: enc.h, iterations: enc.iterations }
}

/// Certified bracket of `sum_q int_{ranges} rho_q`, refining the grid until
/// the width is at most `tol` or the grid budget is exhausted.
pub fn bracket(aut: &LanguageAutomaton, x_lo: f64, ranges: &Ranges, tol: f64) -> Result<DensityBracket> {
    let (lo, hi) = domain_for(aut, x_lo);
    let a2 = 1.0 / ((1.0 + lo) * (1.0 + lo));
    // discretization width is about h^2 A^2 times the mass
    let mut h = (tol / (2.0 * a2)).sqrt().min(2e-3);
    let max_nodes = 40_000_000 / aut.len().max(1);
    let mut last = None;
    for _ in 0..8 {
        if (hi - lo) / h > max_nodes as f64 {
            h = (hi - lo) / max_nodes as f64;
        }
        let mut enc = DensityEnclosure::new(aut, lo, hi, h)?;
        let b = solve(&mut enc, aut, ranges, tol, 5000);
        let width = b.hi - b.lo;
        if width <= tol {
            return Ok(b);
        }
        let at_cap = (hi - lo) / h >= max_nodes as f64 * 0.999;
        last = Some(b);
        if at_cap {
            break;
        }
        h *= (0.5 * tol / width).sqrt().clamp(0.1, 0.7);
    }
    let b = last.expect("at least one attempt");
    Err(Error::BudgetExceeded(format!("density bracket [{}, {}] wider than {}", b.lo, b.hi, tol)))
}
