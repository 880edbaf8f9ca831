//! Letters `(eps:d)`, words, characteristic sequences, the hat and W/shift
//! operators, membership in F, the interval data of synchronizing words,
//! the folding map and its limit tau.

use std::cmp::Ordering;
use std::fmt;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{ExactNumber, Mobius};
use crate::hiprec;

/// Marker for the infinite digit of `x = 0`.
pub const INF: u64 = u64::MAX;

/// A digit `(eps:d)`; `d == INF` encodes `(+1:inf)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub eps: i8,
    pub d: u64,
}

impl Letter {
    pub const ZERO: Letter = Letter { eps: 1, d: INF };

    /// `(-1:d)` with `d >= 2` or `(+1:d)` with `d >= 1`.
    pub fn new(eps: i8, d: u64) -> Result<Letter> {
        let ok = match eps {
            -1 => d >= 2 && d != INF,
            1 => d >= 1,
            _ => false,
        };
        if ok {
            Ok(Letter { eps, d })
        } else {
            Err(Error::Alphabet(format!("({}:{})", eps, d)))
        }
    }
    pub fn neg(d: u64) -> Letter {
        Letter::new(-1, d).expect("negative letter needs d >= 2")
    }
    pub fn pos(d: u64) -> Letter {
        Letter::new(1, d).expect("positive letter needs d >= 1")
    }
    pub fn is_finite(&self) -> bool {
        self.d != INF
    }
    pub fn is_negative(&self) -> bool {
        self.eps < 0
    }

    /// `M = (-1)[[-d, eps],[1, 0]]` acting as `x -> eps/x - d`.
    pub fn m(&self) -> Mobius {
        assert!(self.is_finite(), "(+1:inf) has no matrix");
        let d = self.d as i64;
        let e = self.eps as i64;
        Mobius::new(d, -e, -1, 0).unwrap()
    }

    /// `N = (-eps)[[0, 1],[eps, d]] = tM^-1`, acting as `y -> 1/(d + eps y)`.
    pub fn n(&self) -> Mobius {
        assert!(self.is_finite(), "(+1:inf) has no matrix");
        let d = self.d as i64;
        let e = self.eps as i64;
        Mobius::new(0, -e, -1, -e * d).unwrap()
    }

    fn order_key(&self) -> (i8, i128) {
        let d = if self.d == INF { i128::MAX } else { self.d as i128 };
        if self.eps < 0 {
            (-1, d)
        } else {
            (1, -d)
        }
    }

    pub fn shifted(&self, s: i64) -> Result<Letter> {
        if self.d == INF {
            return Ok(*self);
        }
        let d = self.d as i64 + s;
        if d < 1 {
            return Err(Error::Alphabet(format!("({}:{})", self.eps, d)));
        }
        Letter::new(self.eps, d as u64)
    }
}

/// The digit order: `(-1:2) < (-1:3) < ... < (+1:inf) < ... < (+1:2) < (+1:1)`,
/// which is the order of the cylinders on the line.
impl Ord for Letter {
    fn cmp(&self, o: &Self) -> Ordering {
        self.order_key().cmp(&o.order_key())
    }
}
impl PartialOrd for Letter {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.eps < 0 { "-1" } else { "+1" };
        if self.d == INF {
            write!(f, "({}:inf)", s)
        } else {
            write!(f, "({}:{})", s, self.d)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }
    pub fn concat(&self, o: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Word(v)
    }
    pub fn repeat(l: Letter, n: usize) -> Word {
        Word(vec![l; n])
    }
    pub fn is_negative_word(&self) -> bool {
        self.0.iter().all(|l| l.eps < 0 && l.is_finite())
    }

    /// `M_v = M_{v_n} ... M_{v_1}`.
    pub fn m(&self) -> Mobius {
        self.0.iter().fold(Mobius::identity(), |acc, l| l.m().mul(&acc))
    }
    /// `N_v = N_{v_n} ... N_{v_1}`.
    pub fn n(&self) -> Mobius {
        self.0.iter().fold(Mobius::identity(), |acc, l| l.n().mul(&acc))
    }

    /// The number `[[v, x]] = M_v^-1 x` whose expansion starts with `v`
    /// and continues from `x`.
    pub fn value(&self, x: &ExactNumber) -> Result<ExactNumber> {
        self.m().inverse().apply(x)
    }

    /// Parses `"(-1:2)^3(-1:4)(+1:inf)"`; letters outside the alphabet are
    /// rejected.
    pub fn parse(s: &str) -> Result<Word> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let b = s.as_bytes();
        let mut i = 0;
        let mut out = Vec::new();
        let bad = |msg: &str| Error::Parse(format!("word '{}': {}", s, msg));
        while i < b.len() {
            if b[i] != b'(' {
                return Err(bad("expected '('"));
            }
            let close = s[i..].find(')').ok_or_else(|| bad("missing ')'"))? + i;
            let inner = &s[i + 1..close];
            let (e, d) = inner.split_once(':').ok_or_else(|| bad("expected ':'"))?;
            let eps: i8 = match e.trim_start_matches('+') {
                "1" => 1,
                "-1" => -1,
                _ => return Err(bad("sign must be +1 or -1")),
            };
            let d = match d {
                "inf" | "∞" => INF,
                _ => d.parse::<u64>().map_err(|_| bad("bad digit"))?,
            };
            let l = Letter::new(eps, d)?;
            i = close + 1;
            let mut rep = 1usize;
            if i < b.len() && b[i] == b'^' {
                let start = i + 1;
                let mut j = start;
                while j < b.len() && b[j].is_ascii_digit() {
                    j += 1;
                }
                rep = s[start..j].parse().map_err(|_| bad("bad exponent"))?;
                i = j;
            }
            out.extend(std::iter::repeat(l).take(rep));
        }
        Ok(Word(out))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l)?;
        }
        Ok(())
    }
}

fn check_negative(v: &Word) -> Result<()> {
    match v.0.iter().find(|l| !(l.eps < 0 && l.is_finite())) {
        Some(l) => Err(Error::Alphabet(format!("{} is not in A-", l))),
        None => Ok(()),
    }
}

/// Characteristic sequence `a_1 ... a_{2l+1}` of a word over `A-`.
pub fn char_seq(v: &Word) -> Result<Vec<u64>> {
    check_negative(v)?;
    let mut out = Vec::with_capacity(v.len() + 1);
    let mut run = 1u64;
    for l in &v.0 {
        if l.d == 2 {
            run += 1;
        } else {
            out.push(run);
            out.push(l.d - 2);
            run = 1;
        }
    }
    out.push(run);
    Ok(out)
}

/// Inverse of [`char_seq`]; the sequence must have odd length and positive
/// finite entries.
pub fn word_from_char_seq(a: &[u64]) -> Result<Word> {
    if a.len() % 2 == 0 || a.iter().any(|&x| x == 0 || x == INF) {
        return Err(Error::Domain(format!("{:?} is not a finite characteristic sequence", a)));
    }
    let two = Letter::neg(2);
    let mut out = Vec::new();
    for (i, &x) in a.iter().enumerate() {
        if i % 2 == 0 {
            out.extend(std::iter::repeat(two).take((x - 1) as usize));
        } else {
            out.push(Letter::neg(2 + x));
        }
    }
    Ok(Word(out))
}

/// `v^` : `(-1:2+a_1)(-1:2)^{a_2-1}(-1:2+a_3) ... (-1:2+a_{2l+1})`.
pub fn hat(v: &Word) -> Result<Word> {
    let a = char_seq(v)?;
    let two = Letter::neg(2);
    let mut out = Vec::new();
    for (i, &x) in a.iter().enumerate() {
        if i % 2 == 0 {
            out.push(Letter::neg(2 + x));
        } else {
            out.extend(std::iter::repeat(two).take((x - 1) as usize));
        }
    }
    Ok(Word(out))
}

/// Alternating order: at the first differing (0-based) index `j`, the sign
/// `(-1)^j` decides. Exhausting the shorter sequence without a difference is
/// incomparable unless the lengths agree.
pub fn alt_compare(a: &[u64], b: &[u64]) -> Option<Ordering> {
    for (j, (x, y)) in a.iter().zip(b).enumerate() {
        if x != y {
            let c = x.cmp(y);
            return Some(if j % 2 == 0 { c } else { c.reverse() });
        }
    }
    if a.len() == b.len() {
        Some(Ordering::Equal)
    } else {
        None
    }
}

pub fn alt_less(a: &[u64], b: &[u64]) -> bool {
    alt_compare(a, b) == Some(Ordering::Less)
}

pub fn alt_leq(a: &[u64], b: &[u64]) -> bool {
    matches!(alt_compare(a, b), Some(Ordering::Less | Ordering::Equal))
}

/// `^(W)v`: the first letter `(eps:d)` becomes `(-eps:d+eps)`.
pub fn apply_w(v: &Word) -> Result<Word> {
    let mut out = v.0.clone();
    let first = out.first_mut().ok_or_else(|| Error::Domain("W needs a nonempty word".into()))?;
    if first.is_finite() {
        let d = first.d as i64 + first.eps as i64;
        if d < 1 {
            return Err(Error::Alphabet(format!("({}:{})", -first.eps, d)));
        }
        *first = Letter::new(-first.eps, d as u64)?;
    }
    Ok(Word(out))
}

/// `v^(+-1)`: the last letter's digit moves by `s`.
pub fn apply_shift(v: &Word, s: i64) -> Result<Word> {
    let mut out = v.0.clone();
    let last = out.last_mut().ok_or_else(|| Error::Domain("shift needs a nonempty word".into()))?;
    *last = last.shifted(s)?;
    Ok(Word(out))
}

/// Both readings of the second F-condition: `(proof reading, statement
/// reading)`. The first compares `a_[2j+1,2l+1]` with `a_[1,2l-2j+1]`
/// (equal lengths), the second with `a_[1,2l-2j+2]`.
pub fn f_membership_readings(v: &Word) -> Result<(bool, bool)> {
    let a = char_seq(v)?;
    let l = (a.len() - 1) / 2;
    // 1-based slice a_[i, j]
    let s = |i: usize, j: usize| &a[i - 1..j];
    let mut proof = true;
    let mut statement = true;
    for j in 1..=l {
        let first = alt_less(s(2 * j, 2 * l + 1), s(1, 2 * l - 2 * j + 2));
        proof &= first && alt_leq(s(2 * j + 1, 2 * l + 1), s(1, 2 * l - 2 * j + 1));
        statement &= first && alt_leq(s(2 * j + 1, 2 * l + 1), s(1, 2 * l - 2 * j + 2));
    }
    Ok((proof, statement))
}

/// Membership in F. Follows the equal-length reading of the second
/// condition, the one under which all known synchronizing families qualify.
pub fn is_in_f(v: &Word) -> Result<bool> {
    Ok(f_membership_readings(v)?.0)
}

/// Endpoints and pseudocenter of the synchronization interval of `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct SyncWordData {
    pub v: Word,
    pub vhat: Word,
    pub zeta: ExactNumber,
    pub eta: ExactNumber,
    pub chi: ExactNumber,
    pub len_diff: i64,
}

impl SyncWordData {
    /// Whether `alpha` lies in the open interval (or in `(g, 1]` for the empty word).
    pub fn contains(&self, alpha: &ExactNumber) -> bool {
        if self.v.is_empty() {
            *alpha > self.zeta && *alpha <= self.eta
        } else {
            *alpha > self.zeta && *alpha < self.eta
        }
    }
}

/// The fixed points of a Mobius map lying in the open interval `(lo, hi)`.
pub fn fixed_points_in(m: &Mobius, lo: &ExactNumber, hi: &ExactNumber) -> Vec<ExactNumber> {
    // c z^2 + (d - a) z - b = 0
    let (a, b, c, d) = (&m.a, &m.b, &m.c, &m.d);
    let mut roots = Vec::new();
    if c.is_zero() {
        let den = d - a;
        if !den.is_zero() {
            roots.push(ExactNumber::from_rational(BigRational::new(b.clone(), den)));
        }
    } else {
        let disc: BigInt = (a - d) * (a - d) + BigInt::from(4) * b * c;
        if disc >= BigInt::zero() {
            let two_c = BigInt::from(2) * c;
            let base = BigRational::new(a - d, two_c.clone());
            let coef = BigRational::new(BigInt::one(), two_c);
            for s in [1i64, -1] {
                let b = &coef * BigRational::from_integer(s.into());
                roots.push(ExactNumber::surd_big(base.clone(), b, disc.clone()));
            }
        }
    }
    roots.retain(|r| r > lo && r < hi);
    roots.dedup();
    roots
}

/// `zeta_v`, `eta_v`, `chi_v` and `|v^| - |v|` for `v` in F.
pub fn interval_data(v: &Word) -> Result<SyncWordData> {
    if !is_in_f(v)? {
        return Err(Error::NotInF(v.to_string()));
    }
    let vhat = hat(v)?;
    let len_diff = vhat.len() as i64 - v.len() as i64;
    if v.is_empty() {
        return Ok(SyncWordData {
            v: v.clone(),
            vhat,
            zeta: ExactNumber::g(),
            eta: ExactNumber::one(),
            chi: ExactNumber::one(),
            len_diff,
        });
    }
    let one = ExactNumber::one();
    let chi = &v.value(&ExactNumber::zero())? + &one;
    let vprime = apply_w(&apply_shift(&vhat, -1)?)?;
    let zetas = fixed_points_in(&vprime.m(), &ExactNumber::zero(), &one);
    let vplus = apply_shift(v, 1)?;
    let etas = fixed_points_in(&vplus.m(), &-&one, &ExactNumber::zero());
    if zetas.len() != 1 || etas.len() != 1 {
        return Err(Error::Domain(format!("no unique fixed point for {}", v)));
    }
    let zeta = zetas[0].clone();
    let eta = &etas[0] + &one;
    Ok(SyncWordData { v: v.clone(), vhat, zeta, eta, chi, len_diff })
}

/// Folding: `Theta(v) = v v^^(-1)`.
pub fn theta(v: &Word) -> Result<Word> {
    if !is_in_f(v)? {
        return Err(Error::NotInF(v.to_string()));
    }
    Ok(v.concat(&apply_shift(&hat(v)?, -1)?))
}

/// Default cap on the word length reached while iterating Theta.
pub const THETA_WORD_CAP: usize = 1_000_000;

/// Result of iterating the folding map.
#[derive(Clone, Debug)]
pub struct TauValue {
    pub value: BigFloat,
    pub zeta: ExactNumber,
    pub witness: Word,
    pub iterations: usize,
}

/// `tau_v = lim zeta_{Theta^n(v)}`, iterated until consecutive values differ
/// by less than `tol`.
pub fn tau(v: &Word, tol: f64, cap: usize) -> Result<TauValue> {
    let mut w = v.clone();
    let mut z = interval_data(&w)?.zeta;
    let mut it = 0;
    loop {
        let next = theta(&w)?;
        if next.len() > cap {
            return Err(Error::IterationLimit(format!("Theta word length {} exceeds {}", next.len(), cap)));
        }
        let zn = interval_data(&next)?.zeta;
        // consecutive values usually live in different quadratic fields
        let p = hiprec::PRECISION;
        let diff = hiprec::to_f64(&hiprec::from_exact(&z, p).sub(&hiprec::from_exact(&zn, p), p, astro_float::RoundingMode::ToEven));
        it += 1;
        w = next;
        z = zn;
        if diff.abs() < tol {
            break;
        }
    }
    Ok(TauValue { value: hiprec::from_exact(&z, hiprec::PRECISION), zeta: z, witness: w, iterations: it })
}
