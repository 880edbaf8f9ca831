//! The fiber languages as a deterministic automaton.
//!
//! States are `S` (words of `L`), `P_j` (words of `L b_[1,j]`) and `Q_i`
//! (words of `L' bbar_[1,i]`), where `b` and `bbar` are the expansions of
//! `alpha - 1` and `alpha`. Every state accepts `L'`; `S` alone accepts `L`.
//! The x-interval carrying the fiber of a state is `[point, alpha]`, with
//! `point = T^j(alpha-1)` for `P_j` and `T^i(alpha)` for `Q_i`.
//!
//! When both orbits are eventually periodic (non-synchronizing quadratic
//! `alpha`), states with equal orbit points have equal futures and are merged,
//! which keeps the automaton finite.

use std::collections::HashMap;
use std::fmt;

use crate::dynamics::{digit, SyncResult, SyncStatus};
use crate::error::{Error, Result};
use crate::exact::ExactNumber;
use crate::words::{Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateKind {
    S,
    P(usize),
    Q(usize),
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateKind::S => write!(f, "S"),
            StateKind::P(j) => write!(f, "P{}", j),
            StateKind::Q(i) => write!(f, "Q{}", i),
        }
    }
}

#[derive(Clone, Debug)]
pub struct State {
    pub kind: StateKind,
    /// Left end of the x-interval `J = [point, alpha]`.
    pub point: ExactNumber,
    /// Word read from `S` to first reach this state along the orbit chain
    /// (`b_[1,j]` or `bbar_[1,i]`).
    pub chain_word: Word,
}

#[derive(Clone, Debug)]
pub struct LanguageAutomaton {
    pub alpha: ExactNumber,
    /// `d_alpha(alpha)`.
    pub d: u64,
    pub states: Vec<State>,
    /// Outgoing transitions `(letter, target)` per state.
    pub trans: Vec<Vec<(Letter, usize)>>,
    /// False only for depth-truncated (undecided) orbits.
    pub certified: bool,
}

pub const S: usize = 0;

impl LanguageAutomaton {
    /// `{(-1:d'): 2 <= d' <= d+1} U {(+1:d)}`.
    pub fn alphabet(&self) -> Vec<Letter> {
        let mut a: Vec<Letter> = (2..=self.d + 1).map(Letter::neg).collect();
        a.push(Letter::pos(self.d));
        a
    }

    /// `1/(d+1)`, the top of the seed interval.
    pub fn c(&self) -> ExactNumber {
        ExactNumber::from_ratio(1, self.d as i64 + 1)
    }

    pub fn step(&self, q: usize, a: Letter) -> Option<usize> {
        self.trans[q].iter().find(|(l, _)| *l == a).map(|&(_, t)| t)
    }

    /// State reached from `S` by `w`, if `w` is a prefix of some word of `L'`.
    pub fn run(&self, w: &[Letter]) -> Option<usize> {
        w.iter().try_fold(S, |q, &a| self.step(q, a))
    }

    pub fn accepts_l(&self, w: &[Letter]) -> bool {
        self.run(w) == Some(S)
    }

    pub fn accepts_l_prime(&self, w: &[Letter]) -> bool {
        self.run(w).is_some()
    }

    /// Incoming transitions `(source, letter)` per state.
    pub fn predecessors(&self) -> Vec<Vec<(usize, Letter)>> {
        let mut pred = vec![Vec::new(); self.states.len()];
        for (q, out) in self.trans.iter().enumerate() {
            for &(a, t) in out {
                pred[t].push((q, a));
            }
        }
        pred
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

struct Builder<'a> {
    alpha: &'a ExactNumber,
    d: u64,
    states: Vec<State>,
    trans: Vec<Vec<(Letter, usize)>>,
    by_point: HashMap<ExactNumber, usize>,
    merge: bool,
}

impl Builder<'_> {
    fn add(&mut self, kind: StateKind, point: ExactNumber, chain_word: Word) -> usize {
        let id = self.states.len();
        if self.merge && kind != StateKind::S {
            self.by_point.insert(point.clone(), id);
        }
        self.states.push(State { kind, point, chain_word });
        self.trans.push(Vec::new());
        id
    }

    /// Walks an orbit chain starting at state `first` (whose point is the
    /// `start`-th orbit point), creating states up to index `limit - 1`.
    fn chain(&mut self, first: usize, start: usize, limit: usize, make: fn(usize) -> StateKind) -> Result<Vec<usize>> {
        let mut ids = vec![first];
        let mut j = start;
        let mut cur = first;
        while j + 1 < limit {
            let x = self.states[cur].point.clone();
            let l = digit(self.alpha, &x)?.letter;
            if !l.is_negative() {
                return Err(Error::Domain(format!("orbit letter {} at {} is not negative inside the chain", l, x)));
            }
            let next_point = digit(self.alpha, &x)?.next;
            let next = match self.by_point.get(&next_point) {
                Some(&id) if self.merge => {
                    self.trans[cur].push((l, id));
                    self.letters_to_s(cur, l);
                    return Ok(ids);
                }
                _ => {
                    let mut w = self.states[cur].chain_word.clone();
                    w.0.push(l);
                    self.add(make(j + 1), next_point, w)
                }
            };
            self.trans[cur].push((l, next));
            self.letters_to_s(cur, l);
            ids.push(next);
            cur = next;
            j += 1;
        }
        Ok(ids)
    }

    /// Letters `a` of `A-` with `l < a <= (-1:d+1)` return to `S`.
    fn letters_to_s(&mut self, q: usize, l: Letter) {
        for c in (l.d + 1)..=(self.d + 1) {
            self.trans[q].push((Letter::neg(c), S));
        }
    }
}

/// Builds the automaton for `alpha` from its synchronization result.
/// Undecided orbits are truncated at `depth` states per chain and the
/// automaton is flagged as not certified.
pub fn build_automaton(alpha: &ExactNumber, sync: &SyncResult, depth: usize) -> Result<LanguageAutomaton> {
    let one = ExactNumber::one();
    let first = digit(alpha, alpha)?;
    let d = first.letter.d;
    let (k, k_prime, merge, certified) = match &sync.status {
        SyncStatus::Synchronizing { k, k_prime, .. } => (*k, *k_prime, false, true),
        SyncStatus::NonSynchronizing { .. } => (usize::MAX, usize::MAX, true, true),
        SyncStatus::Undecided { .. } => (depth + 1, depth + 1, false, false),
    };
    let mut b = Builder { alpha, d, states: Vec::new(), trans: Vec::new(), by_point: HashMap::new(), merge };
    let s = b.add(StateKind::S, alpha - &one, Word::empty());
    b.chain(s, 0, k, StateKind::P)?;
    let q1_point = first.next.clone();
    let bbar1 = first.letter;
    let q1 = match b.by_point.get(&q1_point) {
        // the future of an existing state with the same point is already built
        Some(&id) if merge => id,
        _ => {
            let id = b.add(StateKind::Q(1), q1_point, Word(vec![bbar1]));
            b.chain(id, 1, k_prime, StateKind::Q)?;
            id
        }
    };
    for q in 0..b.states.len() {
        b.trans[q].push((bbar1, q1));
        b.trans[q].sort_by(|x, y| x.0.cmp(&y.0));
        b.trans[q].dedup();
    }
    Ok(LanguageAutomaton { alpha: alpha.clone(), d, states: b.states, trans: b.trans, certified })
}

/// Reference membership test straight from the definitions
/// `L = (U3 u U1 U2* U4)*` and `L' = L U1 U2*`, by dynamic programming over
/// factorizations. `b` and `bbar` are the orbit words of `alpha - 1` and
/// `alpha` (at least `k`, `k'` letters), used for small test words.
pub fn reference_membership(w: &[Letter], b: &[Letter], bbar: &[Letter], k: usize, k_prime: usize, d: u64) -> (bool, bool) {
    let top = Letter::neg(d + 1);
    let n = w.len();
    let u1 = |i: usize, j: usize| j - i < k && w[i..j] == b[..j - i];
    let u2 = |i: usize, j: usize| j > i && j - i < k_prime && w[i..j] == bbar[..j - i];
    let u3 = |i: usize, j: usize| {
        let len = j - i;
        len >= 1 && len < k && w[i..j - 1] == b[..len - 1] && {
            let a = w[j - 1];
            a.is_negative() && b[len - 1] < a && a <= top
        }
    };
    let u4 = |i: usize, j: usize| {
        let len = j - i;
        len >= 2 && len < k_prime && w[i..j - 1] == bbar[..len - 1] && {
            let a = w[j - 1];
            a.is_negative() && bbar[len - 1] < a && a <= top
        }
    };
    // u2star[i][j]: w[i..j] in U2*
    let mut u2star = vec![vec![false; n + 1]; n + 1];
    for i in (0..=n).rev() {
        u2star[i][i] = true;
        for j in i + 1..=n {
            u2star[i][j] = (i + 1..=j).any(|m| u2(i, m) && u2star[m][j]);
        }
    }
    // block[i][j]: w[i..j] in U3 u U1 U2* U4
    let block = |i: usize, j: usize| {
        u3(i, j) || (i..=j).any(|m1| u1(i, m1) && (m1..=j).any(|m2| u2star[m1][m2] && u4(m2, j)))
    };
    let mut in_l = vec![false; n + 1];
    in_l[0] = true;
    for j in 1..=n {
        in_l[j] = (0..j).any(|i| in_l[i] && block(i, j));
    }
    let in_l_prime = (0..=n).any(|i| in_l[i] && (i..=n).any(|m| u1(i, m) && u2star[m][n]));
    (in_l[n], in_l_prime)
}
