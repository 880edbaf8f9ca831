//! The maps `T_alpha`, digits and orbits, by-excess and regular expansions,
//! the rewriting into regular continued fractions, and detection of the
//! synchronization interval containing a given `alpha`.

use std::collections::HashMap;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exact::ExactNumber;
use crate::words::{
    alt_leq, apply_shift, apply_w, char_seq, hat, interval_data, is_in_f, word_from_char_seq, Letter, SyncWordData,
    Word, INF,
};

/// Default number of orbit steps before giving up.
pub const MAX_ITER: usize = 10_000;

/// One application of `T_alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitStep {
    pub letter: Letter,
    pub next: ExactNumber,
}

fn step_unchecked(alpha: &ExactNumber, x: &ExactNumber) -> Result<DigitStep> {
    if x.is_zero() {
        return Ok(DigitStep { letter: Letter::ZERO, next: ExactNumber::zero() });
    }
    let eps: i8 = if x.signum() > 0 { 1 } else { -1 };
    let r = x.recip()?.abs();
    let d = (&(&r + &ExactNumber::one()) - alpha).floor();
    let du = d.to_u64().filter(|&d| d >= 1).ok_or_else(|| Error::Domain(format!("digit {} out of range", d)))?;
    let letter = Letter::new(eps, du)?;
    let next = &r - &ExactNumber::from_bigint(d);
    Ok(DigitStep { letter, next })
}

/// One step of `T_alpha` on `[alpha-1, alpha]`: `eps = sign(x)`,
/// `d = floor(|1/x| + 1 - alpha)`, `next = |1/x| - d`.
pub fn digit(alpha: &ExactNumber, x: &ExactNumber) -> Result<DigitStep> {
    check_alpha(alpha)?;
    let lo = alpha - &ExactNumber::one();
    alpha.common_field(x)?;
    if *x < lo || x > alpha {
        return Err(Error::Domain(format!("x = {} outside [{}, {}]", x, lo, alpha)));
    }
    step_unchecked(alpha, x)
}

fn check_alpha(alpha: &ExactNumber) -> Result<()> {
    if alpha.signum() <= 0 || *alpha > ExactNumber::one() {
        return Err(Error::Domain(format!("alpha = {} not in (0,1]", alpha)));
    }
    Ok(())
}

/// Up to `n` steps of `T_alpha`, stopping after the step that reaches 0.
pub fn orbit(alpha: &ExactNumber, x: &ExactNumber, n: usize) -> Result<Vec<DigitStep>> {
    let mut out = Vec::with_capacity(n);
    if x.is_zero() {
        digit(alpha, x)?;
        return Ok(vec![DigitStep { letter: Letter::ZERO, next: ExactNumber::zero() }]);
    }
    let mut cur = x.clone();
    for _ in 0..n {
        let s = digit(alpha, &cur)?;
        cur = s.next.clone();
        out.push(s);
        if cur.is_zero() {
            break;
        }
    }
    Ok(out)
}

/// Letters of the steps, as a word (the `(+1:inf)` of `x = 0` is kept).
pub fn letters(steps: &[DigitStep]) -> Word {
    Word(steps.iter().map(|s| s.letter).collect())
}

/// `T_alpha^n(x)` (stays at 0 once reached).
pub fn iterate(alpha: &ExactNumber, x: &ExactNumber, n: usize) -> Result<ExactNumber> {
    let mut cur = x.clone();
    for _ in 0..n {
        if cur.is_zero() {
            break;
        }
        cur = digit(alpha, &cur)?.next;
    }
    Ok(cur)
}

/// An eventually periodic sequence `pre period period ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Periodic<T> {
    pub pre: Vec<T>,
    pub period: Vec<T>,
}

impl<T: Clone> Periodic<T> {
    pub fn get(&self, i: usize) -> T {
        if i < self.pre.len() {
            self.pre[i].clone()
        } else {
            self.period[(i - self.pre.len()) % self.period.len()].clone()
        }
    }
    pub fn prefix(&self, n: usize) -> Vec<T> {
        (0..n).map(|i| self.get(i)).collect()
    }
}

pub type PeriodicWord = Periodic<Letter>;
pub type PeriodicSeq = Periodic<u64>;

/// By-excess expansion (the map `T_0`) of `x` in `[-1, 0)`, found by exact
/// cycle detection on the orbit.
pub fn by_excess_expansion(x: &ExactNumber, cap: usize) -> Result<PeriodicWord> {
    let minus_one = -ExactNumber::one();
    if *x < minus_one || x.signum() >= 0 {
        return Err(Error::Domain(format!("x = {} outside [-1, 0)", x)));
    }
    let zero = ExactNumber::zero();
    let mut seen: HashMap<ExactNumber, usize> = HashMap::new();
    let mut word = Vec::new();
    let mut cur = x.clone();
    for i in 0..cap {
        if let Some(&j) = seen.get(&cur) {
            return Ok(Periodic { pre: word[..j].to_vec(), period: word[j..i].to_vec() });
        }
        seen.insert(cur.clone(), i);
        let s = step_unchecked(&zero, &cur)?;
        word.push(s.letter);
        cur = s.next;
    }
    Err(Error::IterationLimit(format!("by-excess expansion of {} has no period within {} steps", x, cap)))
}

/// Characteristic sequence of an eventually periodic word over `A-`.
/// Words ending in `(-1:2)^omega` give the period `[INF]`.
pub fn periodic_char_seq(w: &PeriodicWord) -> Result<PeriodicSeq> {
    let check = |l: &Letter| {
        if l.eps < 0 && l.is_finite() {
            Ok(())
        } else {
            Err(Error::Alphabet(format!("{} is not in A-", l)))
        }
    };
    w.pre.iter().chain(&w.period).try_for_each(check)?;
    if w.period.is_empty() {
        return Err(Error::Domain("empty period".into()));
    }
    let nontrivial = w.period.iter().filter(|l| l.d != 2).count();
    // pairs (run + 1, d - 2) produced at each letter different from (-1:2)
    let pairs = |letters: &mut dyn Iterator<Item = &Letter>, limit: usize| {
        let mut out = Vec::new();
        let mut run = 1u64;
        for l in letters {
            if out.len() >= limit {
                break;
            }
            if l.d == 2 {
                run += 1;
            } else {
                out.push(run);
                out.push(l.d - 2);
                run = 1;
            }
        }
        out
    };
    if nontrivial == 0 {
        let mut pre = pairs(&mut w.pre.iter(), usize::MAX);
        if pre.is_empty() && w.pre.is_empty() {
            pre.clear();
        }
        return Ok(Periodic { pre, period: vec![INF] });
    }
    let pre_pairs = w.pre.iter().filter(|l| l.d != 2).count();
    let pre_len = 2 * pre_pairs + 2;
    let per_len = 2 * nontrivial;
    let mut it = w.pre.iter().chain(w.period.iter().cycle());
    let seq = pairs(&mut it, pre_len + 2 * per_len);
    debug_assert_eq!(seq[pre_len..pre_len + per_len], seq[pre_len + per_len..pre_len + 2 * per_len]);
    Ok(Periodic { pre: seq[..pre_len].to_vec(), period: seq[pre_len..pre_len + per_len].to_vec() })
}

/// Regular continued fraction digits of `x` in `(0, 1]`, at most `n` of them.
pub fn rcf_digits(x: &ExactNumber, n: usize) -> Result<Vec<u64>> {
    let one = ExactNumber::one();
    let steps = orbit(&one, x, n)?;
    Ok(steps.iter().filter(|s| s.letter.is_finite()).map(|s| s.letter.d).collect())
}

/// RCF digits `[0; a_1, a_2, ...]` of `alpha` read off the characteristic
/// sequence of `alpha - 1`; a rational ends at the first infinite entry.
pub fn char_to_rcf(a: &PeriodicSeq) -> PeriodicSeq {
    if a.period == [INF] {
        let mut pre = a.pre.clone();
        while pre.last() == Some(&INF) {
            pre.pop();
        }
        return Periodic { pre, period: Vec::new() };
    }
    a.clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pending {
    None,
    Pos(u64),
}

/// Rewrites an alpha-expansion of `x` in `(0, alpha]` into its regular
/// continued fraction expansion by the three replacement rules
/// `(+1:d)(-1:2)^{n-1}(-1:d') -> (+1:d-1)(+1:n)(+1:d'-1)`,
/// `(+1:d)(-1:2)^n(+1:d') -> (+1:d-1)(+1:n)(+1:1)(+1:d')` and
/// `(+1:d)(-1:2)^{n-1}(+1:inf) -> (+1:d-1)(+1:n)(+1:inf)`.
///
/// When `complete` is false the input is a prefix that is known to be
/// followed by a positive letter, so a trailing positive letter is final.
pub fn rcf_rewrite_with(input: &[Letter], complete: bool) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    let mut pending = Pending::None;
    let mut i = 0;
    while i < input.len() {
        let l = input[i];
        if l.eps > 0 {
            if let Pending::Pos(d) = pending {
                out.push(Letter::pos(d));
            }
            if l.is_finite() {
                pending = Pending::Pos(l.d);
            } else {
                out.push(l);
                pending = Pending::None;
            }
            i += 1;
            continue;
        }
        let d = match pending {
            Pending::Pos(d) => d,
            Pending::None => return Err(Error::Rule(format!("negative letter {} without a positive predecessor", l))),
        };
        if d < 2 {
            return Err(Error::Rule(format!("pattern (+1:1){} does not occur in alpha-expansions", l)));
        }
        let mut run = 0u64;
        while i < input.len() && input[i] == Letter::neg(2) {
            run += 1;
            i += 1;
        }
        if i == input.len() {
            // the run is not terminated inside the given prefix
            out.push(Letter::pos(d));
            return Ok(out);
        }
        let next = input[i];
        if next.eps < 0 {
            // rule 1 with n = run + 1
            out.push(Letter::pos(d - 1));
            out.push(Letter::pos(run + 1));
            pending = Pending::Pos(next.d - 1);
        } else if next.is_finite() {
            // rule 2 with n = run >= 1
            out.push(Letter::pos(d - 1));
            out.push(Letter::pos(run));
            out.push(Letter::pos(1));
            pending = Pending::Pos(next.d);
        } else {
            // rule 3 with n = run + 1 >= 2
            out.push(Letter::pos(d - 1));
            out.push(Letter::pos(run + 1));
            out.push(next);
            pending = Pending::None;
        }
        i += 1;
    }
    if let Pending::Pos(d) = pending {
        if !complete {
            out.push(Letter::pos(d));
        }
    }
    Ok(out)
}

/// [`rcf_rewrite_with`] for a full expansion (ending in `(+1:inf)` for
/// rationals); a trailing unresolved letter is dropped.
pub fn rcf_rewrite(input: &[Letter]) -> Result<Vec<Letter>> {
    let done = input.last().map(|l| !l.is_finite()).unwrap_or(false);
    let mut out = rcf_rewrite_with(input, true)?;
    if done {
        return Ok(out);
    }
    // a pending letter may still change; keep only the settled part
    if let Some(l) = out.last() {
        if l.eps > 0 && l.is_finite() && input.last().map(|x| x.eps > 0).unwrap_or(false) {
            out.pop();
        }
    }
    Ok(out)
}

/// Status of the synchronization test.
#[derive(Clone, Debug)]
pub enum SyncStatus {
    /// `alpha` lies in `Gamma_v` (or `(g,1]` for the empty word), with
    /// `T^k(alpha-1) = T^{k'}(alpha)`, `k = |v|+1`, `k' = |v^|+1`.
    Synchronizing { v: Word, k: usize, k_prime: usize, data: SyncWordData },
    /// Both orbits stay negative forever; `certificate` is the eventually
    /// periodic characteristic sequence of `alpha - 1`. `right_endpoint_of`
    /// names `v` when `alpha = eta_v`.
    NonSynchronizing { certificate: PeriodicSeq, right_endpoint_of: Option<Word> },
    Undecided { depth: usize },
}

#[derive(Clone, Debug)]
pub struct SyncResult {
    pub alpha: ExactNumber,
    pub status: SyncStatus,
    /// Orbit of `alpha - 1`: points `T^j(alpha-1)` for `j = 0, 1, ...`
    /// (one period when the orbit is eventually periodic).
    pub lower_orbit: OrbitScan,
    /// Orbit of `alpha` from `j = 0`.
    pub upper_orbit: OrbitScan,
}

impl SyncResult {
    pub fn is_synchronizing(&self) -> bool {
        matches!(self.status, SyncStatus::Synchronizing { .. })
    }
    pub fn status_name(&self) -> &'static str {
        match self.status {
            SyncStatus::Synchronizing { .. } => "synchronizing",
            SyncStatus::NonSynchronizing { .. } => "non_synchronizing",
            SyncStatus::Undecided { .. } => "undecided",
        }
    }
}

/// How an orbit scan ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScanEnd {
    /// The point with this index is nonnegative.
    Nonnegative(usize),
    /// Point `i` equals point `j < i`; all points before are negative.
    Cycle { start: usize, len: usize },
    Limit,
}

#[derive(Clone, Debug)]
pub struct OrbitScan {
    pub points: Vec<ExactNumber>,
    pub letters: Vec<Letter>,
    pub end: ScanEnd,
}

/// Follows the orbit of `x` until a point with index `>= from` is
/// nonnegative, the orbit cycles, or `cap` steps pass. `points[i] = T^i(x)`
/// and `letters[i]` is the digit of `points[i]`.
fn scan_orbit(alpha: &ExactNumber, x: &ExactNumber, from: usize, cap: usize) -> Result<OrbitScan> {
    let mut points = vec![x.clone()];
    let mut letters = Vec::new();
    let mut seen: HashMap<ExactNumber, usize> = HashMap::new();
    seen.insert(x.clone(), 0);
    for i in 0..cap {
        let s = digit(alpha, &points[i])?;
        letters.push(s.letter);
        let p = s.next;
        let idx = i + 1;
        if idx >= from && p.signum() >= 0 {
            points.push(p);
            return Ok(OrbitScan { points, letters, end: ScanEnd::Nonnegative(idx) });
        }
        if let Some(&j) = seen.get(&p) {
            points.push(p);
            if j >= 1 || from <= 1 {
                return Ok(OrbitScan { points, letters, end: ScanEnd::Cycle { start: j, len: idx - j } });
            }
            // the start point may repeat before `from`; keep going
            continue;
        }
        seen.insert(p.clone(), idx);
        points.push(p);
    }
    Ok(OrbitScan { points, letters, end: ScanEnd::Limit })
}

/// Finds the synchronization interval of `alpha`.
///
/// If `T(alpha) >= 0` then `v = (-1:2)^{d-1}` with `d = d_alpha(alpha)`.
/// Otherwise `m` and `m'` are read from the first nonnegative points of the
/// two orbits. If `m <= m'` then `v` is the orbit word of `alpha - 1` up to
/// that point; else `v` has characteristic sequence `(d-1)` followed by the
/// upper orbit sequence. This is the case analysis on the characteristic
/// sequence `a` of `alpha - 1`, read off the orbits so that rational `alpha`
/// (whose orbits stop at 0) are covered as well.
/// Every answer is verified: `v` in F, `zeta_v < alpha < eta_v`, the orbit
/// prefixes, and the exact coincidence of the two orbits.
pub fn synchronize(alpha: &ExactNumber, max_iter: usize) -> Result<SyncResult> {
    check_alpha(alpha)?;
    let one = ExactNumber::one();
    let lower = alpha - &one;
    let first = digit(alpha, alpha)?;
    let d = first.letter.d;
    let lower_scan = scan_orbit(alpha, &lower, 1, max_iter)?;
    let upper_scan = scan_orbit(alpha, alpha, 2, max_iter)?;
    let v = if first.next.signum() >= 0 {
        Some(Word::repeat(Letter::neg(2), (d - 1) as usize))
    } else {
        // characteristic sequences of the orbit words up to the first
        // nonnegative point, with the last letter shifted up
        let lower_cs = match lower_scan.end {
            ScanEnd::Nonnegative(n) => Some(char_seq(&apply_shift(&Word(lower_scan.letters[..n].to_vec()), 1)?)?),
            ScanEnd::Cycle { .. } => None,
            ScanEnd::Limit => return undecided(alpha, max_iter, lower_scan, upper_scan),
        };
        let upper_cs = match upper_scan.end {
            ScanEnd::Nonnegative(n) => Some(char_seq(&apply_shift(&Word(upper_scan.letters[1..n].to_vec()), 1)?)?),
            ScanEnd::Cycle { .. } => None,
            ScanEnd::Limit => return undecided(alpha, max_iter, lower_scan, upper_scan),
        };
        let m = lower_cs.as_ref().map(|c| (c.len() - 1) / 2);
        let m_prime = upper_cs.as_ref().map(|c| (c.len() - 1) / 2);
        match (m, m_prime) {
            (None, None) => {
                let a = periodic_char_seq(&by_excess_expansion(&lower, max_iter)?)?;
                return non_synchronizing(alpha, a, lower_scan, upper_scan);
            }
            // v is the lower orbit word itself
            (Some(m), mp) if mp.map(|mp| m <= mp).unwrap_or(true) => {
                let ScanEnd::Nonnegative(n) = lower_scan.end else { unreachable!() };
                Some(Word(lower_scan.letters[..n].to_vec()))
            }
            // a_1 = d - 1, followed by the upper sequence without its final 1.
            // For irrational alpha this is a_[1, 2m'+1]; for rational alpha the
            // upper orbit reaches 0 and its by-excess tail differs from a_[2, inf)
            (_, Some(mp)) => {
                let mut cs = vec![d - 1];
                cs.extend_from_slice(&upper_cs.as_ref().expect("upper sequence")[..2 * mp]);
                Some(word_from_char_seq(&cs)?)
            }
            (Some(_), None) => unreachable!(),
        }
    };
    let v = v.expect("word constructed");
    verify_sync(alpha, v, lower_scan, upper_scan)
}

fn undecided(alpha: &ExactNumber, depth: usize, lower: OrbitScan, upper: OrbitScan) -> Result<SyncResult> {
    Ok(SyncResult { alpha: alpha.clone(), status: SyncStatus::Undecided { depth }, lower_orbit: lower, upper_orbit: upper })
}

fn verify_sync(alpha: &ExactNumber, v: Word, lower: OrbitScan, upper: OrbitScan) -> Result<SyncResult> {
    let fail = |what: &str| Error::Domain(format!("synchronization check failed for alpha = {}: {}", alpha, what));
    if !is_in_f(&v)? {
        return Err(fail(&format!("{} is not in F", v)));
    }
    let data = interval_data(&v)?;
    if !data.contains(alpha) {
        return Err(fail("alpha outside (zeta_v, eta_v)"));
    }
    let k = v.len() + 1;
    let vhat = hat(&v)?;
    let k_prime = vhat.len() + 1;
    let b = orbit(alpha, &(alpha - &ExactNumber::one()), k)?;
    if letters(&b).0.get(..v.len()) != Some(v.letters()) {
        return Err(fail("orbit of alpha-1 does not start with v"));
    }
    let vprime = apply_w(&apply_shift(&vhat, -1)?)?;
    let bb = orbit(alpha, alpha, k_prime)?;
    if letters(&bb).0.get(..vprime.len()) != Some(vprime.letters()) {
        return Err(fail("orbit of alpha does not start with W(v^)^(-1)"));
    }
    let x = iterate(alpha, &(alpha - &ExactNumber::one()), k)?;
    let y = iterate(alpha, alpha, k_prime)?;
    if x != y {
        return Err(fail("orbits do not meet"));
    }
    Ok(SyncResult {
        alpha: alpha.clone(),
        status: SyncStatus::Synchronizing { v, k, k_prime, data },
        lower_orbit: lower,
        upper_orbit: upper,
    })
}

fn non_synchronizing(alpha: &ExactNumber, a: PeriodicSeq, lower: OrbitScan, upper: OrbitScan) -> Result<SyncResult> {
    // a_[n,inf) <=alt a_[1,inf) for all n >= 2, and alpha <= g
    if *alpha > ExactNumber::g() {
        return Err(Error::Domain(format!("alpha = {} > g has no negative orbit pair", alpha)));
    }
    let horizon = 2 * (a.pre.len() + a.period.len()) + 2;
    for n in 1..=(a.pre.len() + a.period.len()) {
        let shifted: Vec<u64> = (0..horizon).map(|i| a.get(n + i)).collect();
        let base = a.prefix(horizon);
        if !alt_leq(&shifted, &base) {
            return Err(Error::Domain(format!(
                "alpha = {}: orbits never turn nonnegative but the shift criterion fails at n = {}",
                alpha,
                n + 1
            )));
        }
    }
    let right_endpoint_of = right_endpoint_word(alpha)?;
    Ok(SyncResult {
        alpha: alpha.clone(),
        status: SyncStatus::NonSynchronizing { certificate: a, right_endpoint_of },
        lower_orbit: lower,
        upper_orbit: upper,
    })
}

/// `v` with `alpha = eta_v`, detected from a purely periodic by-excess
/// expansion `(v^(+1))^omega` of `alpha - 1`.
fn right_endpoint_word(alpha: &ExactNumber) -> Result<Option<Word>> {
    let w = by_excess_expansion(&(alpha - &ExactNumber::one()), MAX_ITER)?;
    if !w.pre.is_empty() {
        return Ok(None);
    }
    for reps in 1..=3 {
        let p = Word(w.period.repeat(reps));
        let Ok(v) = apply_shift(&p, -1) else { continue };
        if !v.is_negative_word() || !is_in_f(&v)? {
            continue;
        }
        if interval_data(&v)?.eta == *alpha {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// Sorted, distinct points `T^j(alpha-1)` (`0 <= j < k`) and `T^j(alpha)`
/// (`1 <= j < k'`) where the fibers of the natural extension can change.
/// For non-synchronizing quadratic `alpha` all (finitely many) orbit points
/// are returned; undecided cases are truncated at `depth` points per orbit.
pub fn fiber_boundaries(alpha: &ExactNumber, max_iter: usize) -> Result<Vec<ExactNumber>> {
    let sync = synchronize(alpha, max_iter)?;
    Ok(boundaries_of(&sync, 64))
}

pub fn boundaries_of(sync: &SyncResult, depth: usize) -> Vec<ExactNumber> {
    let (kl, ku) = match &sync.status {
        SyncStatus::Synchronizing { k, k_prime, .. } => (*k, *k_prime),
        SyncStatus::NonSynchronizing { .. } => (sync.lower_orbit.points.len(), sync.upper_orbit.points.len()),
        SyncStatus::Undecided { .. } => (depth, depth),
    };
    let mut pts: Vec<ExactNumber> = Vec::new();
    pts.extend(sync.lower_orbit.points.iter().take(kl).cloned());
    pts.extend(sync.upper_orbit.points.iter().take(ku).skip(1).cloned());
    pts.retain(|p| p.signum() < 0 || *p <= sync.alpha);
    pts.sort();
    pts.dedup();
    pts
}
