//! Exact numbers in Q or a single real quadratic field Q(sqrt d), integer
//! Mobius matrices acting on them, and rectangles of the plane.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A rational number or a quadratic surd `a + b*sqrt(d)`.
///
/// Values are kept normalized: a surd with `b = 0` collapses to a rational,
/// and `d` is not a square. Small square factors are pulled out of `d`; two
/// radicands whose product is a square are recognized as the same field.
#[derive(Clone, Debug)]
pub enum ExactNumber {
    Rational(BigRational),
    Surd(Surd),
}

#[derive(Clone, Debug)]
pub struct Surd {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

impl Surd {
    pub fn a(&self) -> &BigRational {
        &self.a
    }
    pub fn b(&self) -> &BigRational {
        &self.b
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Splits `n` into `s^2 * f`; returns `(s, f)`. Prime squares below 2^16 are
/// removed and a square cofactor is absorbed, so `f` is square-free whenever
/// `n < 2^32` and otherwise free of small square factors.
fn square_free_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut n = n.clone();
    let mut s = BigInt::one();
    let mut f = BigInt::one();
    let mut p = 2u32;
    while p < 65536 {
        let pb = BigInt::from(p);
        if &pb * &pb > n {
            break;
        }
        let pp = &pb * &pb;
        while (&n % &pp).is_zero() {
            n /= &pp;
            s *= &pb;
        }
        if (&n % &pb).is_zero() {
            n /= &pb;
            f *= &pb;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = n.sqrt();
    if &r * &r == n {
        s *= r;
    } else {
        f *= n;
    }
    (s, f)
}

/// `Some(s)` when `n = s^2`.
fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

impl ExactNumber {
    pub fn zero() -> Self {
        ExactNumber::Rational(BigRational::zero())
    }
    pub fn one() -> Self {
        ExactNumber::Rational(BigRational::one())
    }
    pub fn from_int(n: i64) -> Self {
        ExactNumber::Rational(BigRational::from_integer(BigInt::from(n)))
    }
    pub fn from_bigint(n: BigInt) -> Self {
        ExactNumber::Rational(BigRational::from_integer(n))
    }
    pub fn from_ratio(p: i64, q: i64) -> Self {
        ExactNumber::Rational(ratio(p, q))
    }
    pub fn from_rational(r: BigRational) -> Self {
        ExactNumber::Rational(r)
    }

    /// `a + b*sqrt(d)`, normalized.
    pub fn surd(a: BigRational, b: BigRational, d: u64) -> Self {
        Self::surd_big(a, b, BigInt::from(d))
    }

    pub fn surd_big(a: BigRational, b: BigRational, d: BigInt) -> Self {
        if b.is_zero() || d.is_zero() {
            return ExactNumber::Rational(a);
        }
        assert!(d.is_positive(), "negative radicand");
        let (s, f) = square_free_split(&d);
        let b = b * BigRational::from_integer(s);
        if f.is_one() {
            ExactNumber::Rational(a + b)
        } else {
            ExactNumber::Surd(Surd { a, b, d: f })
        }
    }

    fn surd_raw(a: BigRational, b: BigRational, d: &BigInt) -> Self {
        if b.is_zero() {
            ExactNumber::Rational(a)
        } else {
            ExactNumber::Surd(Surd { a, b, d: d.clone() })
        }
    }

    /// Golden ratio conjugate g = (sqrt5 - 1)/2.
    pub fn g() -> Self {
        Self::surd(ratio(-1, 2), ratio(1, 2), 5)
    }
    /// g^2 = (3 - sqrt5)/2.
    pub fn g2() -> Self {
        Self::surd(ratio(3, 2), ratio(-1, 2), 5)
    }
    pub fn sqrt2_minus_1() -> Self {
        Self::surd(ratio(-1, 1), ratio(1, 1), 2)
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ExactNumber::Rational(_))
    }
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactNumber::Rational(r) => Some(r),
            _ => None,
        }
    }
    /// Radicand of the field, `None` for rationals.
    pub fn field(&self) -> Option<&BigInt> {
        match self {
            ExactNumber::Rational(_) => None,
            ExactNumber::Surd(s) => Some(&s.d),
        }
    }
    pub fn is_zero(&self) -> bool {
        matches!(self, ExactNumber::Rational(r) if r.is_zero())
    }

    fn parts(&self) -> (BigRational, BigRational, Option<BigInt>) {
        match self {
            ExactNumber::Rational(r) => (r.clone(), BigRational::zero(), None),
            ExactNumber::Surd(s) => (s.a.clone(), s.b.clone(), Some(s.d.clone())),
        }
    }

    /// Parts of both operands over one radicand. Two radicands describe the
    /// same field exactly when their product is a square.
    #[allow(clippy::type_complexity)]
    fn unify(&self, o: &Self) -> Result<((BigRational, BigRational), (BigRational, BigRational), Option<BigInt>)> {
        let (a1, b1, d1) = self.parts();
        let (a2, b2, d2) = o.parts();
        match (d1, d2) {
            (Some(d1), Some(d2)) if d1 != d2 => {
                let s = exact_sqrt(&(&d1 * &d2)).ok_or_else(|| {
                    Error::MixedField(d1.to_string(), d2.to_string())
                })?;
                // sqrt(d2) = (s / d1) sqrt(d1)
                let b2 = b2 * BigRational::new(s, d1.clone());
                Ok(((a1, b1), (a2, b2), Some(d1)))
            }
            (d1, d2) => Ok(((a1, b1), (a2, b2), d1.or(d2))),
        }
    }

    /// Checks that two values can be combined without leaving one field.
    pub fn common_field(&self, other: &Self) -> Result<Option<BigInt>> {
        Ok(self.unify(other)?.2)
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        let ((a1, b1), (a2, b2), d) = self.unify(o)?;
        Ok(match d {
            None => ExactNumber::Rational(a1 + a2),
            Some(d) => Self::surd_raw(a1 + a2, b1 + b2, &d),
        })
    }
    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        self.checked_add(&-o)
    }
    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        let ((a1, b1), (a2, b2), d) = self.unify(o)?;
        match d {
            None => Ok(ExactNumber::Rational(a1 * a2)),
            Some(d) => {
                let dd = BigRational::from_integer(d.clone());
                let a = &a1 * &a2 + &b1 * &b2 * dd;
                let b = a1 * b2 + b1 * a2;
                Ok(Self::surd_raw(a, b, &d))
            }
        }
    }
    pub fn recip(&self) -> Result<Self> {
        match self {
            ExactNumber::Rational(r) => {
                if r.is_zero() {
                    Err(Error::Pole)
                } else {
                    Ok(ExactNumber::Rational(r.recip()))
                }
            }
            ExactNumber::Surd(s) => {
                // (a - b sqrt d) / (a^2 - b^2 d); the norm is nonzero for a surd
                let dd = BigRational::from_integer(s.d.clone());
                let norm = &s.a * &s.a - &s.b * &s.b * dd;
                Ok(Self::surd_raw(&s.a / &norm, -&s.b / &norm, &s.d))
            }
        }
    }
    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        self.checked_mul(&o.recip()?)
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        fn sg(r: &BigRational) -> i32 {
            if r.is_zero() {
                0
            } else if r.is_positive() {
                1
            } else {
                -1
            }
        }
        match self {
            ExactNumber::Rational(r) => sg(r),
            ExactNumber::Surd(s) => {
                let (sa, sb) = (sg(&s.a), sg(&s.b));
                if sa == sb || sa == 0 {
                    return sb;
                }
                let dd = BigRational::from_integer(s.d.clone());
                match (&s.a * &s.a).cmp(&(&s.b * &s.b * dd)) {
                    Ordering::Greater => sa,
                    _ => sb,
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Integer representation `(p + q*sqrt(d)) / r` with `r > 0`.
    fn integer_form(&self) -> (BigInt, BigInt, BigInt, BigInt) {
        let (a, b, d) = self.parts();
        let r = a.denom().lcm(b.denom());
        let p = a.numer() * (&r / a.denom());
        let q = b.numer() * (&r / b.denom());
        (p, q, d.unwrap_or_default(), r)
    }

    /// Exact floor via integer square-root bracketing.
    pub fn floor(&self) -> BigInt {
        match self {
            ExactNumber::Rational(r) => r.floor().to_integer(),
            ExactNumber::Surd(_) => {
                let (p, q, d, r) = self.integer_form();
                // sqrt(q^2 d) is irrational, so it lies strictly between s and s+1
                let s = (&q * &q * d).sqrt();
                let n = if q.is_positive() { p + s } else { p - s - 1 };
                n.div_floor(&r)
            }
        }
    }

    /// `floor(x * 2^k)`, the exact fixed-point truncation.
    pub fn floor_scaled(&self, k: u32) -> BigInt {
        (self * &ExactNumber::from_bigint(BigInt::one() << k)).floor()
    }

    /// Nearest f64 (error below one unit in the last place plus 2^-1100).
    pub fn to_f64(&self) -> f64 {
        match self {
            ExactNumber::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            ExactNumber::Surd(_) => {
                let approx = self.coarse_f64();
                let mag = if approx == 0.0 { -1100 } else { approx.abs().log2().floor() as i64 };
                let k = (120 - mag).clamp(60, 1200) as u32;
                let m = self.floor_scaled(k);
                BigRational::new(m, BigInt::one() << k).to_f64().unwrap_or(f64::NAN)
            }
        }
    }

    fn coarse_f64(&self) -> f64 {
        let (a, b, d) = self.parts();
        let d = d.and_then(|d| d.to_f64()).unwrap_or(0.0);
        a.to_f64().unwrap_or(0.0) + b.to_f64().unwrap_or(0.0) * d.sqrt()
    }

    /// Decimal expansion rounded to `digits` places after the point.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = BigInt::from(10u32).pow(digits as u32);
        let half = ExactNumber::from_rational(ratio(1, 2));
        let scaled = &(self * &ExactNumber::from_bigint(scale.clone())) + &half;
        let n = scaled.floor();
        let neg = n.is_negative();
        let n = n.abs();
        let (ip, fp) = n.div_rem(&scale);
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        s.push_str(&ip.to_string());
        if digits > 0 {
            s.push('.');
            s.push_str(&format!("{:0>width$}", fp.to_string(), width = digits));
        }
        s
    }

    /// Canonical exact string, e.g. `37/97`, `(3-sqrt5)/2`, `-1+sqrt2`.
    pub fn to_exact_string(&self) -> String {
        match self {
            ExactNumber::Rational(r) => {
                if r.is_integer() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            ExactNumber::Surd(_) => {
                let (p, q, d, r) = self.integer_form();
                let g = p.gcd(&q).gcd(&r);
                let (p, q, r) = (p / &g, q / &g, r / &g);
                let coef = |q: &BigInt| {
                    if q.abs().is_one() {
                        String::new()
                    } else {
                        format!("{}*", q.abs())
                    }
                };
                let body = if p.is_zero() {
                    format!("{}{}sqrt{}", if q.is_negative() { "-" } else { "" }, coef(&q), d)
                } else {
                    format!("{}{}{}sqrt{}", p, if q.is_negative() { "-" } else { "+" }, coef(&q), d)
                };
                if r.is_one() {
                    body
                } else {
                    format!("({})/{}", body, r)
                }
            }
        }
    }

    /// Parses an exact expression. Accepts integers, decimals (read as exact
    /// rationals), `p/q`, `sqrtN`, the tokens `g`, `g2`, `sqrt2-1`, the
    /// operators `+ - * /` and parentheses. The variable `a` (or `alpha`) is
    /// bound to `alpha` when given.
    pub fn parse_with(s: &str, alpha: Option<&ExactNumber>) -> Result<Self> {
        let mut p = ExprParser { s: s.as_bytes(), i: 0, alpha, src: s };
        let v = p.expr()?;
        p.skip_ws();
        if p.i != p.s.len() {
            return Err(p.err());
        }
        Ok(v)
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::parse_with(s, None)
    }
}

struct ExprParser<'a> {
    s: &'a [u8],
    i: usize,
    alpha: Option<&'a ExactNumber>,
    src: &'a str,
}

impl ExprParser<'_> {
    fn err(&self) -> Error {
        Error::Parse(format!("cannot parse number '{}' at position {}", self.src, self.i))
    }
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }
    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }
    fn expr(&mut self) -> Result<ExactNumber> {
        let mut v = self.term()?;
        while let Some(c) = self.peek() {
            if c == b'+' || c == b'-' {
                self.i += 1;
                let t = self.term()?;
                v = if c == b'+' { v.checked_add(&t)? } else { v.checked_sub(&t)? };
            } else {
                break;
            }
        }
        Ok(v)
    }
    fn term(&mut self) -> Result<ExactNumber> {
        let mut v = self.unary()?;
        while let Some(c) = self.peek() {
            if c == b'*' || c == b'/' {
                self.i += 1;
                let t = self.unary()?;
                v = if c == b'*' { v.checked_mul(&t)? } else { v.checked_div(&t)? };
            } else {
                break;
            }
        }
        Ok(v)
    }
    fn unary(&mut self) -> Result<ExactNumber> {
        match self.peek() {
            Some(b'-') => {
                self.i += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.i += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }
    fn atom(&mut self) -> Result<ExactNumber> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err());
                }
                self.i += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_alphanumeric() {
                    self.i += 1;
                }
                let word = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                match word {
                    "g" => Ok(ExactNumber::g()),
                    "g2" => Ok(ExactNumber::g2()),
                    "a" | "alpha" => self.alpha.cloned().ok_or_else(|| {
                        Error::Parse("the variable 'a' needs an alpha value".into())
                    }),
                    "sqrt" => {
                        let v = self.atom()?;
                        sqrt_of_rational(&v).ok_or_else(|| self.err())
                    }
                    w if w.starts_with("sqrt") => {
                        let n: u64 = w[4..].parse().map_err(|_| self.err())?;
                        Ok(ExactNumber::surd(BigRational::zero(), BigRational::one(), n))
                    }
                    _ => Err(self.err()),
                }
            }
            _ => Err(self.err()),
        }
    }
    fn number(&mut self) -> Result<ExactNumber> {
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.') {
            self.i += 1;
        }
        let mut exp: i64 = 0;
        if self.i < self.s.len() && (self.s[self.i] == b'e' || self.s[self.i] == b'E') {
            let save = self.i;
            self.i += 1;
            let es = self.i;
            if self.i < self.s.len() && (self.s[self.i] == b'-' || self.s[self.i] == b'+') {
                self.i += 1;
            }
            while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                self.i += 1;
            }
            match std::str::from_utf8(&self.s[es..self.i]).unwrap().parse::<i64>() {
                Ok(e) => exp = e,
                Err(_) => self.i = save,
            }
        }
        let text = std::str::from_utf8(&self.s[start..]).unwrap();
        let text = &text[..text.find(|c: char| !(c.is_ascii_digit() || c == '.')).unwrap_or(text.len())];
        let (ip, fp) = match text.split_once('.') {
            Some((a, b)) => (a, b),
            None => (text, ""),
        };
        if ip.is_empty() && fp.is_empty() || fp.contains('.') {
            return Err(self.err());
        }
        let digits = format!("{}{}", ip, fp);
        let n: BigInt = digits.parse().map_err(|_| self.err())?;
        let e = exp - fp.len() as i64;
        let ten = BigInt::from(10u32);
        let r = if e >= 0 {
            BigRational::from_integer(n * ten.pow(e as u32))
        } else {
            BigRational::new(n, ten.pow((-e) as u32))
        };
        Ok(ExactNumber::Rational(r))
    }
}

/// `sqrt(r)` for a nonnegative rational `r`, as an exact surd.
fn sqrt_of_rational(v: &ExactNumber) -> Option<ExactNumber> {
    let r = v.as_rational()?;
    if r.is_negative() {
        return None;
    }
    // sqrt(p/q) = sqrt(p q) / q
    let pq = r.numer() * r.denom();
    let coef = BigRational::new(BigInt::one(), r.denom().clone());
    Some(ExactNumber::surd_big(BigRational::zero(), coef, pq))
}

impl PartialEq for ExactNumber {
    fn eq(&self, o: &Self) -> bool {
        match (self, o) {
            (ExactNumber::Rational(a), ExactNumber::Rational(b)) => a == b,
            (ExactNumber::Surd(x), ExactNumber::Surd(y)) => {
                x.a == y.a && (x.d == y.d && x.b == y.b || x.d != y.d && self.checked_sub(o).map(|z| z.is_zero()).unwrap_or(false))
            }
            _ => false,
        }
    }
}
impl Eq for ExactNumber {}

/// Hashes only the rational part, which does not depend on how the radicand
/// is written, so equal values hash alike.
impl Hash for ExactNumber {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        match self {
            ExactNumber::Rational(r) => r.hash(h),
            ExactNumber::Surd(s) => s.a.hash(h),
        }
    }
}

impl PartialOrd for ExactNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactNumber {
    /// Exact comparison. Irrationals from different quadratic fields are never
    /// equal, so refining fixed-point truncations decides them.
    fn cmp(&self, other: &Self) -> Ordering {
        if let (ExactNumber::Rational(a), ExactNumber::Rational(b)) = (self, other) {
            return a.cmp(b);
        }
        match self.checked_sub(other) {
            Ok(diff) => diff.signum().cmp(&0),
            Err(_) => {
                let mut k = 64;
                loop {
                    let c = self.floor_scaled(k).cmp(&other.floor_scaled(k));
                    if c != Ordering::Equal {
                        return c;
                    }
                    k *= 2;
                }
            }
        }
    }
}

impl fmt::Display for ExactNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_exact_string())
    }
}

impl Neg for &ExactNumber {
    type Output = ExactNumber;
    fn neg(self) -> ExactNumber {
        match self {
            ExactNumber::Rational(r) => ExactNumber::Rational(-r),
            ExactNumber::Surd(s) => ExactNumber::Surd(Surd { a: -&s.a, b: -&s.b, d: s.d.clone() }),
        }
    }
}
impl Neg for ExactNumber {
    type Output = ExactNumber;
    fn neg(self) -> ExactNumber {
        -&self
    }
}

// Operator forms panic on mixed fields; the checked_* methods report it.
macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&ExactNumber> for &ExactNumber {
            type Output = ExactNumber;
            fn $m(self, o: &ExactNumber) -> ExactNumber {
                self.$checked(o).expect(concat!("ExactNumber::", stringify!($m)))
            }
        }
        impl $tr<ExactNumber> for ExactNumber {
            type Output = ExactNumber;
            fn $m(self, o: ExactNumber) -> ExactNumber {
                (&self).$m(&o)
            }
        }
    };
}
binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

/// A 2x2 integer matrix with determinant +1 or -1, acting by
/// `x -> (a x + b) / (c x + d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mobius {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mobius {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::from_big(a.into(), b.into(), c.into(), d.into())
    }
    pub fn from_big(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        let m = Mobius { a, b, c, d };
        let det = m.det();
        if det.abs().is_one() {
            Ok(m)
        } else {
            Err(Error::Domain(format!("determinant {} is not +-1", det)))
        }
    }
    pub fn identity() -> Self {
        Mobius::new(1, 0, 0, 1).unwrap()
    }
    /// W = [[1,0],[-1,-1]], an involution.
    pub fn w() -> Self {
        Mobius::new(1, 0, -1, -1).unwrap()
    }
    /// E = [[1,-1],[0,1]], acting as x -> x - 1.
    pub fn e() -> Self {
        Mobius::new(1, -1, 0, 1).unwrap()
    }
    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }
    pub fn mul(&self, o: &Mobius) -> Mobius {
        Mobius {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }
    pub fn inverse(&self) -> Mobius {
        let det = self.det();
        Mobius { a: &self.d * &det, b: -&self.b * &det, c: -&self.c * &det, d: &self.a * &det }
    }
    pub fn transpose(&self) -> Mobius {
        Mobius { a: self.a.clone(), b: self.c.clone(), c: self.b.clone(), d: self.d.clone() }
    }
    pub fn scaled(&self, s: i64) -> Mobius {
        let s = BigInt::from(s);
        Mobius { a: &self.a * &s, b: &self.b * &s, c: &self.c * &s, d: &self.d * &s }
    }
    /// Equality as projective maps, i.e. up to the scalar -1.
    pub fn eq_up_to_sign(&self, o: &Mobius) -> bool {
        self == o || *self == o.scaled(-1)
    }

    pub fn apply(&self, x: &ExactNumber) -> Result<ExactNumber> {
        let a = ExactNumber::from_bigint(self.a.clone());
        let b = ExactNumber::from_bigint(self.b.clone());
        let c = ExactNumber::from_bigint(self.c.clone());
        let d = ExactNumber::from_bigint(self.d.clone());
        let den = &(&c * x) + &d;
        if den.is_zero() {
            return Err(Error::Pole);
        }
        Ok(&(&(&a * x) + &b) / &den)
    }

    pub fn apply_f64(&self, x: f64) -> f64 {
        let f = |v: &BigInt| v.to_f64().unwrap_or(f64::NAN);
        (f(&self.a) * x + f(&self.b)) / (f(&self.c) * x + f(&self.d))
    }

    /// Image of the closed interval `[lo, hi]`, which must avoid the pole.
    pub fn apply_interval(&self, lo: &ExactNumber, hi: &ExactNumber) -> Result<(ExactNumber, ExactNumber)> {
        if !self.c.is_zero() {
            let pole = ExactNumber::from_rational(BigRational::new(-self.d.clone(), self.c.clone()));
            if pole >= *lo && pole <= *hi {
                return Err(Error::Pole);
            }
        }
        let u = self.apply(lo)?;
        let v = self.apply(hi)?;
        Ok(if u <= v { (u, v) } else { (v, u) })
    }
}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// A closed rectangle `[x1,x2] x [y1,y2]` with exact corners.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rect {
    pub x1: ExactNumber,
    pub x2: ExactNumber,
    pub y1: ExactNumber,
    pub y2: ExactNumber,
}

impl Rect {
    /// Validates the ordering, the unit bounds on y, and `1 + x*y > 0` at
    /// every corner.
    pub fn new(x1: ExactNumber, x2: ExactNumber, y1: ExactNumber, y2: ExactNumber) -> Result<Self> {
        if x1 > x2 || y1 > y2 || y1.signum() < 0 || y2 > ExactNumber::one() {
            return Err(Error::Domain(format!("malformed rectangle [{},{}]x[{},{}]", x1, x2, y1, y2)));
        }
        let r = Rect { x1, x2, y1, y2 };
        for (x, y) in [(&r.x1, &r.y1), (&r.x1, &r.y2), (&r.x2, &r.y1), (&r.x2, &r.y2)] {
            let w = &ExactNumber::one() + &x.checked_mul(y)?;
            if w.signum() <= 0 {
                return Err(Error::Domain(format!("1 + x*y <= 0 at corner ({}, {})", x, y)));
            }
        }
        Ok(r)
    }

    pub fn is_degenerate(&self) -> bool {
        self.x1 == self.x2 || self.y1 == self.y2
    }
}
