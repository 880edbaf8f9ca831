//! The natural extension: fiber sets, the rectangle decomposition of
//! `Omega_alpha`, certified brackets of `mu(Omega_alpha)` and the entropy.
//!
//! Fibers are enumerated by suffix. A node for the word `s` and target
//! state `q` stands for all words `u s` reaching `q`; they give the set
//! `N_s (U_{p in dom(s)} Z_p)`, where `dom(s)` are the states from which `s`
//! leads to `q`. The node contributes its own interval `N_s [0, c]` when
//! `S` is in `dom(s)` and is bounded by `N_s` applied to the hull of the
//! `Z_p`, which covers every longer word ending in `s`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use astro_float::{BigFloat, RoundingMode};
use num_rational::BigRational;

use crate::automaton::{build_automaton, LanguageAutomaton, S};
use crate::density::{self, Ranges};
use crate::dynamics::{digit, synchronize, SyncResult, SyncStatus, MAX_ITER};
use crate::error::{Error, Result};
use crate::exact::{ExactNumber, Mobius, Rect};
use crate::hiprec::{self, PRECISION};
use crate::words::{hat, interval_data, is_in_f, Letter, Word};

/// Orbit depth used when synchronization is undecided.
pub const DEFAULT_DEPTH: usize = 64;

/// A piece `N_w [0, c]` of a fiber set.
#[derive(Clone, Debug)]
pub struct Piece {
    pub lo: ExactNumber,
    pub hi: ExactNumber,
    pub word: Word,
}

/// Enumerated part of a fiber set plus an outer bound on the rest.
#[derive(Clone, Debug, Default)]
pub struct IntervalSet {
    /// Pieces, sorted by left endpoint, pairwise disjoint up to endpoints.
    pub pieces: Vec<Piece>,
    /// Intervals (outward rounded) covering the un-enumerated part.
    pub frontier: Vec<(f64, f64)>,
}

impl IntervalSet {
    /// Lebesgue measure of the enumerated pieces (lower bound).
    pub fn inner_measure(&self) -> f64 {
        self.pieces.iter().map(|p| (&p.hi - &p.lo).to_f64()).sum()
    }

    /// Upper bound on the Lebesgue measure of the un-enumerated tail.
    pub fn tail_bound(&self) -> f64 {
        self.frontier.iter().map(|(a, b)| b - a).sum::<f64>() * (1.0 + 1e-12)
    }

    /// Merged closed intervals of the enumerated pieces, in f64.
    pub fn merged(&self) -> Vec<(f64, f64)> {
        merge(self.pieces.iter().map(|p| (p.lo.to_f64(), p.hi.to_f64())).collect(), 1e-15)
    }

    /// Merged intervals of pieces and frontier: an outer approximation.
    pub fn outer(&self) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> = self.pieces.iter().map(|p| (p.lo.to_f64(), p.hi.to_f64())).collect();
        v.extend(self.frontier.iter().cloned());
        merge(v, 1e-15)
    }

    /// Whether any two pieces overlap in more than an endpoint (exact).
    pub fn overlapping_pair(&self) -> Option<(Word, Word)> {
        let mut idx: Vec<usize> = (0..self.pieces.len()).collect();
        idx.sort_by(|&a, &b| self.pieces[a].lo.cmp(&self.pieces[b].lo));
        let mut reach: Option<usize> = None;
        for &i in &idx {
            if let Some(r) = reach {
                if self.pieces[i].lo < self.pieces[r].hi {
                    return Some((self.pieces[r].word.clone(), self.pieces[i].word.clone()));
                }
                if self.pieces[i].hi > self.pieces[r].hi {
                    reach = Some(i);
                }
            } else {
                reach = Some(i);
            }
        }
        None
    }

    pub fn union(sets: &[&IntervalSet]) -> IntervalSet {
        let mut out = IntervalSet::default();
        for s in sets {
            out.pieces.extend(s.pieces.iter().cloned());
            out.frontier.extend(s.frontier.iter().cloned());
        }
        out.pieces.sort_by(|a, b| a.lo.cmp(&b.lo));
        out
    }
}

/// Merges sorted-or-not intervals that overlap or are within `gap`.
pub fn merge(mut v: Vec<(f64, f64)>, gap: f64) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 + gap => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Lebesgue measure of a union of intervals.
pub fn union_measure(v: &[(f64, f64)]) -> f64 {
    merge(v.to_vec(), 0.0).iter().map(|(a, b)| b - a).sum()
}

fn round_out(lo: f64, hi: f64) -> (f64, f64) {
    (lo.next_down().max(0.0), hi.next_up().min(1.0))
}

/// `N_a` on an interval of `[0,1]`, rounded outward.
fn n_interval(a: Letter, lo: f64, hi: f64) -> (f64, f64) {
    let d = a.d as f64;
    let (x, y) = if a.eps > 0 { (1.0 / (d + hi), 1.0 / (d + lo)) } else { (1.0 / (d - lo), 1.0 / (d - hi)) };
    round_out(x, y)
}

/// Outer hulls `H_q` of the fiber sets `Z_q`, from the fixed-point iteration
/// of the hull map started at `[0, 1]`.
pub fn fiber_hulls(aut: &LanguageAutomaton) -> Vec<(f64, f64)> {
    let c = 1.0 / (aut.d as f64 + 1.0);
    let pred = aut.predecessors();
    let mut h = vec![(0.0, 1.0); aut.len()];
    for _ in 0..400 {
        let mut changed = false;
        for q in 0..aut.len() {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            if q == S {
                lo = 0.0;
                hi = c.next_up();
            }
            for &(p, a) in &pred[q] {
                let (x, y) = n_interval(a, h[p].0, h[p].1);
                lo = lo.min(x);
                hi = hi.max(y);
            }
            let new = (lo.max(h[q].0), hi.min(h[q].1));
            if new != h[q] {
                changed = true;
                h[q] = new;
            }
        }
        if !changed {
            break;
        }
    }
    h
}

fn exact_f64(x: f64) -> ExactNumber {
    ExactNumber::from_rational(BigRational::from_float(x).expect("finite"))
}

fn to_f64_out(lo: &ExactNumber, hi: &ExactNumber) -> (f64, f64) {
    let l = hiprec::to_f64_down(&hiprec::from_exact(lo, 80));
    let h = hiprec::to_f64_up(&hiprec::from_exact(hi, 80));
    (l, h)
}

#[derive(Clone, Debug)]
struct Node {
    target: usize,
    word: Vec<Letter>,
    dom: Vec<bool>,
    m: Mobius,
    hull: (f64, f64),
    priority: f64,
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.priority == o.priority
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    fn cmp(&self, o: &Self) -> Ordering {
        self.priority.partial_cmp(&o.priority).unwrap_or(Ordering::Equal)
    }
}

/// How enumeration prioritizes frontier nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Priority {
    /// Lebesgue length of the hull.
    Length,
    /// `mu(J_q x hull)`.
    Mass,
}

/// Result of enumerating several fiber sets at once.
#[derive(Clone, Debug)]
pub struct FiberEnumeration {
    pub sets: Vec<IntervalSet>,
    pub nodes: usize,
    pub exhausted: bool,
    /// Sum of the frontier priorities (length or mass) when stopping.
    pub gap: f64,
}

/// Best-first suffix enumeration of `Z_q` for the given targets, stopping
/// when the total frontier priority is at most `tol` or after `budget`
/// expanded nodes.
pub fn enumerate_fibers(
    aut: &LanguageAutomaton,
    targets: &[usize],
    tol: f64,
    budget: usize,
    priority: Priority,
) -> Result<FiberEnumeration> {
    let hulls = fiber_hulls(aut);
    let alphabet = aut.alphabet();
    let c = aut.c();
    let zero = ExactNumber::zero();
    let alpha_f = aut.alpha.to_f64();
    let weight = |q: usize, hull: (f64, f64)| match priority {
        Priority::Length => hull.1 - hull.0,
        Priority::Mass => {
            let x1 = aut.states[q].point.to_f64();
            hiprec::mu_rect_f64(x1, alpha_f, hull.0, hull.1).max(0.0)
        }
    };
    let make = |target: usize, word: Vec<Letter>, dom: Vec<bool>, m: Mobius| -> Result<Node> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (p, &inside) in dom.iter().enumerate() {
            if inside {
                lo = lo.min(hulls[p].0);
                hi = hi.max(hulls[p].1);
            }
        }
        let (a, b) = m.apply_interval(&exact_f64(lo), &exact_f64(hi))?;
        let hull = to_f64_out(&a, &b);
        let priority = weight(target, hull);
        Ok(Node { target, word, dom, m, hull, priority })
    };
    let mut heap = BinaryHeap::new();
    let mut gap = 0.0;
    let mut sets = vec![IntervalSet::default(); aut.len()];
    for &q in targets {
        let mut dom = vec![false; aut.len()];
        dom[q] = true;
        let node = make(q, Vec::new(), dom, Mobius::identity())?;
        gap += node.priority;
        heap.push(node);
    }
    let mut nodes = 0;
    while gap > tol && nodes < budget {
        let Some(node) = heap.pop() else { break };
        gap -= node.priority;
        nodes += 1;
        if node.dom[S] {
            let (lo, hi) = node.m.apply_interval(&zero, &c)?;
            let mut w = node.word.clone();
            w.reverse();
            sets[node.target].pieces.push(Piece { lo, hi, word: Word(w) });
        }
        for &a in &alphabet {
            let dom: Vec<bool> = (0..aut.len()).map(|p| aut.step(p, a).map(|t| node.dom[t]).unwrap_or(false)).collect();
            if !dom.iter().any(|&b| b) {
                continue;
            }
            let mut word = node.word.clone();
            word.push(a);
            let child = make(node.target, word, dom, node.m.mul(&a.n()))?;
            gap += child.priority;
            heap.push(child);
        }
    }
    gap = 0.0;
    let exhausted = !heap.is_empty() && nodes >= budget;
    for node in heap.into_vec() {
        gap += node.priority;
        sets[node.target].frontier.push(node.hull);
    }
    for s in sets.iter_mut() {
        s.pieces.sort_by(|a, b| a.lo.cmp(&b.lo));
    }
    Ok(FiberEnumeration { sets, nodes, exhausted, gap: gap.max(0.0) })
}

/// `Psi_alpha` (fiber of `S`) and `Psi'_alpha` (union of all fibers),
/// each enumerated until its tail bound is below `tol`.
pub fn psi_sets(aut: &LanguageAutomaton, tol: f64, budget: usize) -> Result<(IntervalSet, IntervalSet)> {
    let psi = enumerate_fibers(aut, &[S], tol, budget, Priority::Length)?;
    let all: Vec<usize> = (0..aut.len()).collect();
    let prime = enumerate_fibers(aut, &all, tol, budget, Priority::Length)?;
    if psi.gap > tol || prime.gap > tol {
        return Err(Error::BudgetExceeded(format!(
            "fiber enumeration stopped with tail bounds {:.3e} and {:.3e} above {:.3e}",
            psi.gap, prime.gap, tol
        )));
    }
    let psi_set = psi.sets[S].clone();
    let refs: Vec<&IntervalSet> = prime.sets.iter().collect();
    Ok((psi_set, IntervalSet::union(&refs)))
}

/// One rectangle `[x1, x2] x [y1, y2]` of the decomposition.
#[derive(Clone, Debug)]
pub struct DomainRect {
    pub x1: ExactNumber,
    pub x2: ExactNumber,
    pub y1: ExactNumber,
    pub y2: ExactNumber,
    pub word: Word,
    pub state: String,
}

#[derive(Clone, Debug)]
pub struct DomainApprox {
    pub alpha: ExactNumber,
    /// Rectangles contained in `Omega_alpha`, pairwise almost disjoint.
    pub rectangles: Vec<DomainRect>,
    /// Boxes covering the rest of `Omega_alpha` (outward rounded).
    pub frontier: Vec<(f64, f64, f64, f64)>,
    pub mu_lo: BigFloat,
    pub mu_hi: BigFloat,
    pub nodes: usize,
    pub converged: bool,
    pub certified: bool,
}

/// Rectangle decomposition `U_q [point_q, alpha] x Z_q`, refined by mass
/// until the frontier mass is at most `tol` or `budget` nodes are used.
pub fn omega_decomposition(aut: &LanguageAutomaton, tol: f64, budget: usize) -> Result<DomainApprox> {
    let all: Vec<usize> = (0..aut.len()).collect();
    let en = enumerate_fibers(aut, &all, tol, budget, Priority::Mass)?;
    let mut rectangles = Vec::new();
    let mut frontier = Vec::new();
    let wp = PRECISION;
    let mut lo = hiprec::zero(wp);
    let mut hi_extra = 0.0f64;
    let mut count = 0usize;
    for (q, set) in en.sets.iter().enumerate() {
        let st = &aut.states[q];
        let x1 = st.point.clone();
        let x2 = aut.alpha.clone();
        for p in &set.pieces {
            if x1 >= x2 || p.lo >= p.hi {
                continue;
            }
            let r = Rect::new(x1.clone(), x2.clone(), p.lo.clone(), p.hi.clone())?;
            lo = lo.add(&hiprec::mu_rect(&r, wp)?, wp, RoundingMode::Down);
            count += 1;
            rectangles.push(DomainRect {
                x1: x1.clone(),
                x2: x2.clone(),
                y1: p.lo.clone(),
                y2: p.hi.clone(),
                word: p.word.clone(),
                state: st.kind.to_string(),
            });
        }
        let (fx1, fx2) = to_f64_out(&x1, &x2);
        for &(y1, y2) in &set.frontier {
            if fx1 < fx2 {
                hi_extra += hiprec::mu_rect_f64(fx1, fx2, y1, y2).max(0.0);
                frontier.push((fx1, fx2, y1, y2));
            }
        }
    }
    // each logarithm is accurate to about 2^-PRECISION
    let eps = hiprec::from_f64((count as f64 + 1.0) * 2f64.powi(-(PRECISION as i32) + 8), 64);
    let mu_lo = lo.sub(&eps, wp, RoundingMode::Down);
    let extra = hiprec::from_f64(hi_extra * (1.0 + 1e-9) + 1e-300, 64);
    let mu_hi = lo.add(&eps, wp, RoundingMode::Up).add(&extra, wp, RoundingMode::Up);
    let converged = hi_extra * (1.0 + 1e-9) <= tol;
    Ok(DomainApprox {
        alpha: aut.alpha.clone(),
        rectangles,
        frontier,
        mu_lo,
        mu_hi,
        nodes: en.nodes,
        converged,
        certified: aut.certified,
    })
}

/// Bracket of `mu(Omega_alpha)` with the entropy `h = pi^2 / (6 mu)`.
#[derive(Clone, Debug)]
pub struct MeasureBracket {
    pub alpha: ExactNumber,
    pub lo: BigFloat,
    pub hi: BigFloat,
    pub h_lo: BigFloat,
    pub h_hi: BigFloat,
    pub certified: bool,
    /// Orbit depth of the automaton (number of states).
    pub depth: usize,
    /// Bracket from the density enclosure.
    pub density: (f64, f64),
    /// Bracket from the rectangle enumeration.
    pub rectangles: (f64, f64),
    /// Partial word sum and tail bound, when that form applies.
    pub word_sum: Option<WordSum>,
}

impl MeasureBracket {
    pub fn lo_f64(&self) -> f64 {
        hiprec::to_f64_down(&self.lo)
    }
    pub fn hi_f64(&self) -> f64 {
        hiprec::to_f64_up(&self.hi)
    }
    pub fn width(&self) -> f64 {
        self.hi_f64() - self.lo_f64()
    }
    pub fn contains(&self, x: f64) -> bool {
        self.lo_f64() <= x && x <= self.hi_f64()
    }
}

/// Entropy bracket from a measure bracket.
pub fn entropy_bracket(lo: &BigFloat, hi: &BigFloat) -> (BigFloat, BigFloat) {
    let wp = PRECISION;
    let pi = hiprec::pi(wp + 32);
    let pi2_6 = pi.mul(&pi, wp + 32, RoundingMode::None).div(&BigFloat::from_word(6, wp), wp + 32, RoundingMode::None);
    let h_lo = pi2_6.div(hi, wp, RoundingMode::Down);
    let h_hi = pi2_6.div(lo, wp, RoundingMode::Up);
    (h_lo, h_hi)
}

/// Builds the automaton for `alpha`, failing on undecided orbits.
pub fn automaton_for(alpha: &ExactNumber) -> Result<(SyncResult, LanguageAutomaton)> {
    let sync = synchronize(alpha, MAX_ITER)?;
    if let SyncStatus::Undecided { depth } = sync.status {
        return Err(Error::BudgetExceeded(format!("synchronization of {} undecided after {} steps", alpha, depth)));
    }
    let aut = build_automaton(alpha, &sync, DEFAULT_DEPTH)?;
    Ok((sync, aut))
}

/// Certified bracket of `mu(Omega_alpha)` of width at most `tol`.
///
/// The density enclosure gives the bracket; a rectangle enumeration gives an
/// independent coarser one, and both must overlap. For `alpha = chi_v` and
/// for `alpha` outside every synchronizing interval, the partial word sum
/// with its exponential tail bound is checked against the result as well.
pub fn measure_bracket(alpha: &ExactNumber, tol: f64) -> Result<MeasureBracket> {
    let (sync, aut) = automaton_for(alpha)?;
    measure_bracket_with(&sync, &aut, tol)
}

pub fn measure_bracket_with(sync: &SyncResult, aut: &LanguageAutomaton, tol: f64) -> Result<MeasureBracket> {
    let alpha = &aut.alpha;
    let ranges = Ranges::omega(aut);
    let dens = density::bracket(aut, alpha.to_f64() - 1.0, &ranges, tol)?;
    let rect = omega_decomposition(aut, tol, 400)?;
    let (r_lo, r_hi) = (hiprec::to_f64_down(&rect.mu_lo), hiprec::to_f64_up(&rect.mu_hi));
    if r_lo > dens.hi || dens.lo > r_hi {
        return Err(Error::Domain(format!(
            "inconsistent brackets for {}: density [{}, {}], rectangles [{}, {}]",
            alpha, dens.lo, dens.hi, r_lo, r_hi
        )));
    }
    let word_sum_applies = match &sync.status {
        SyncStatus::Synchronizing { data, .. } => data.chi == *alpha,
        _ => true,
    };
    let word_sum = if word_sum_applies {
        let ws = word_sum_bracket(aut, 200_000)?;
        let slack = 1e-9;
        if ws.lo > dens.hi + slack || dens.lo > ws.hi + slack {
            return Err(Error::Domain(format!(
                "word sum [{}, {}] misses the density bracket [{}, {}] for {}",
                ws.lo, ws.hi, dens.lo, dens.hi, alpha
            )));
        }
        Some(ws)
    } else {
        None
    };
    let lo = dens.lo.max(r_lo);
    let hi = dens.hi.min(r_hi);
    let (lo_b, hi_b) = (hiprec::from_f64(lo, 64), hiprec::from_f64(hi, 64));
    let (h_lo, h_hi) = entropy_bracket(&lo_b, &hi_b);
    Ok(MeasureBracket {
        alpha: alpha.clone(),
        lo: lo_b,
        hi: hi_b,
        h_lo,
        h_hi,
        certified: aut.certified,
        depth: aut.len(),
        density: (dens.lo, dens.hi),
        rectangles: (r_lo, r_hi),
        word_sum,
    })
}

/// Partial sum over `w in L'` with `|w| < n` of `mu(J_w x N_w [0, c])`, and
/// the bound `(d/(d+alpha))^n log(1 + 1/alpha)` on the remainder.
#[derive(Clone, Debug)]
pub struct WordSum {
    pub n: usize,
    pub words: usize,
    pub partial: f64,
    pub tail: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Breadth-first partial word sum, stopping before a level would exceed
/// `budget` words (floating point; used as a validation).
pub fn word_sum_bracket(aut: &LanguageAutomaton, budget: usize) -> Result<WordSum> {
    let alpha = aut.alpha.to_f64();
    let c = 1.0 / (aut.d as f64 + 1.0);
    let xs: Vec<f64> = aut.states.iter().map(|s| s.point.to_f64()).collect();
    // (state, matrix [p q; r s]) for N_w
    let mut level: Vec<(usize, [f64; 4])> = vec![(S, [1.0, 0.0, 0.0, 1.0])];
    let mut partial = 0.0;
    let mut n = 0;
    let mut words = 0;
    let alphabet = aut.alphabet();
    loop {
        for (q, m) in &level {
            let f = |y: f64| (m[0] * y + m[1]) / (m[2] * y + m[3]);
            let (a, b) = (f(0.0), f(c));
            let (y1, y2) = if a < b { (a, b) } else { (b, a) };
            if xs[*q] < alpha {
                partial += hiprec::mu_rect_f64(xs[*q], alpha, y1, y2);
            }
        }
        words += level.len();
        n += 1;
        let mut next = Vec::new();
        for (q, m) in &level {
            for &a in &alphabet {
                if let Some(t) = aut.step(*q, a) {
                    let (e, d) = (a.eps as f64, a.d as f64);
                    // N_a = [0 -e; -1 -e d], N_{wa} = N_a N_w
                    next.push((t, [-e * m[2], -e * m[3], -m[0] - e * d * m[2], -m[1] - e * d * m[3]]));
                }
            }
        }
        if next.is_empty() || words + next.len() > budget || n >= 400 {
            if next.is_empty() {
                let tail = 0.0;
                return Ok(WordSum { n, words, partial, tail, lo: partial, hi: partial });
            }
            break;
        }
        level = next;
    }
    let d = aut.d as f64;
    let tail = (d / (d + alpha)).powi(n as i32) * (1.0 + 1.0 / alpha).ln();
    Ok(WordSum { n, words, partial, tail, lo: partial, hi: partial + tail })
}

/// `mu(Omega_alpha)` for `alpha` in `[zeta_v, eta_v]` from
/// `mu(Omega_zeta) + (|v^| - |v|) mu([zeta-1, alpha-1] x Psi_v)`.
/// Returns a certified `(lo, hi)`.
pub fn mu_along_interval(v: &Word, alpha: &ExactNumber, tol: f64) -> Result<(f64, f64)> {
    if !is_in_f(v)? {
        return Err(Error::NotInF(v.to_string()));
    }
    let data = interval_data(v)?;
    if *alpha < data.zeta || *alpha > data.eta {
        return Err(Error::Domain(format!("alpha = {} outside [zeta_v, eta_v] for v = {}", alpha, v)));
    }
    let base = measure_bracket(&data.zeta, tol / 3.0)?;
    let diff = hat(v)?.len() as i64 - v.len() as i64;
    if diff == 0 || *alpha == data.zeta {
        return Ok((base.lo_f64(), base.hi_f64()));
    }
    // Psi_v is the fiber of S for any parameter in Gamma_v, e.g. chi_v
    let (_, aut) = automaton_for(&data.chi)?;
    let zeta_m1 = &data.zeta - &ExactNumber::one();
    let alpha_m1 = alpha - &ExactNumber::one();
    let (z_lo, z_hi) = to_f64_out(&zeta_m1, &zeta_m1);
    let (a_lo, a_hi) = to_f64_out(&alpha_m1, &alpha_m1);
    let ranges = Ranges { inner: vec![(S, z_hi, a_lo)], outer: vec![(S, z_lo, a_hi)] };
    let part = density::bracket(&aut, z_lo, &ranges, tol / (3.0 * diff.unsigned_abs() as f64))?;
    let k = diff as f64;
    let (p_lo, p_hi) = if k > 0.0 { (k * part.lo, k * part.hi) } else { (k * part.hi, k * part.lo) };
    let lo = (base.lo_f64() + p_lo) * (1.0 - 1e-15);
    let hi = (base.hi_f64() + p_hi) * (1.0 + 1e-15);
    Ok((lo, hi))
}

/// One step of the natural extension, `(T x, 1/(d + eps y))`.
pub fn natext_step(alpha: &ExactNumber, x: &ExactNumber, y: &ExactNumber) -> Result<(ExactNumber, ExactNumber)> {
    if x.is_zero() {
        return Err(Error::ZeroDigit);
    }
    let s = digit(alpha, x)?;
    let y2 = s.letter.n().apply(y)?;
    Ok((s.next, y2))
}

/// Floating point version of [`natext_step`]; `None` at `x = 0`.
pub fn natext_step_f64(alpha: f64, x: f64, y: f64) -> Option<(f64, f64)> {
    if x == 0.0 {
        return None;
    }
    let eps = if x > 0.0 { 1.0 } else { -1.0 };
    let r = (1.0 / x).abs();
    let d = (r + 1.0 - alpha).floor();
    Some((r - d, 1.0 / (d + eps * y)))
}

/// Fiber of `Omega_alpha` above `x`: the union of the enumerated fibers of
/// all states whose x-interval contains `x`.
pub fn fiber_at(aut: &LanguageAutomaton, sets: &[IntervalSet], x: f64) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let alpha = aut.alpha.to_f64();
    let mut inner = Vec::new();
    let mut outer = Vec::new();
    for (q, st) in aut.states.iter().enumerate() {
        if st.point.to_f64() <= x && x <= alpha {
            inner.extend(sets[q].merged());
            outer.extend(sets[q].outer());
        }
    }
    (merge(inner, 1e-15), merge(outer, 1e-15))
}
