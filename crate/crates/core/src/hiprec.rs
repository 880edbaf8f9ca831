//! High-precision reals built on `astro_float`, and the invariant measure of
//! rectangles.

use std::cell::RefCell;
use std::cmp::Ordering;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::{ExactNumber, Rect};

/// Default working precision in bits.
pub const PRECISION: usize = 128;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

pub fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

pub fn zero(p: usize) -> BigFloat {
    BigFloat::from_word(0, p)
}

pub fn from_bigint(n: &BigInt, p: usize) -> BigFloat {
    let (sign, words) = n.to_u64_digits();
    if words.is_empty() {
        return zero(p);
    }
    let s = if sign == num_bigint::Sign::Minus { Sign::Neg } else { Sign::Pos };
    let mut x = BigFloat::from_words(&words, s, (64 * words.len()) as i32);
    let _ = x.set_precision(p, RM);
    x
}

/// Correctly signed approximation of an exact number with relative error
/// below `2^-(p+4)`.
pub fn from_exact(x: &ExactNumber, p: usize) -> BigFloat {
    match x {
        ExactNumber::Rational(r) => {
            let n = from_bigint(r.numer(), p + 64);
            let d = from_bigint(r.denom(), p + 64);
            n.div(&d, p, RM)
        }
        ExactNumber::Surd(_) => {
            if x.is_zero() {
                return zero(p);
            }
            let approx = x.to_f64();
            let mag = if approx == 0.0 { -1074 } else { approx.abs().log2().floor() as i64 };
            let k = (p as i64 + 16 - mag).max(0) as u32;
            let m = x.floor_scaled(k);
            let mut v = from_bigint(&m, p + 64);
            if let Some(e) = v.exponent() {
                v.set_exponent(e - k as i32);
            }
            let _ = v.set_precision(p, RM);
            v
        }
    }
}

pub fn from_f64(x: f64, p: usize) -> BigFloat {
    BigFloat::from_f64(x, p)
}

/// Nearest-ish f64 (truncated to 64 bits, then rounded).
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    match x.as_raw_parts() {
        Some((words, _, sign, e, _)) => {
            let top = *words.last().unwrap_or(&0) as f64;
            let mut v = top;
            let mut shift = e - 64;
            while shift > 0 {
                let s = shift.min(500);
                v *= 2f64.powi(s);
                shift -= s;
            }
            while shift < 0 {
                let s = (-shift).min(500);
                v /= 2f64.powi(s);
                shift += s;
            }
            if sign == Sign::Neg {
                -v
            } else {
                v
            }
        }
        None => f64::NAN,
    }
}

pub fn cmp(a: &BigFloat, b: &BigFloat) -> Ordering {
    match a.cmp(b) {
        Some(c) if c < 0 => Ordering::Less,
        Some(0) => Ordering::Equal,
        _ => Ordering::Greater,
    }
}

/// Largest f64 not above `x`.
pub fn to_f64_down(x: &BigFloat) -> f64 {
    let mut v = to_f64(x);
    while cmp(&from_f64(v, PRECISION + 64), x) == Ordering::Greater {
        v = v.next_down();
    }
    v
}

/// Smallest f64 not below `x`.
pub fn to_f64_up(x: &BigFloat) -> f64 {
    let mut v = to_f64(x);
    while cmp(&from_f64(v, PRECISION + 64), x) == Ordering::Less {
        v = v.next_up();
    }
    v
}

pub fn pi(p: usize) -> BigFloat {
    with_consts(|cc| cc.pi(p, RM))
}

pub fn ln(x: &BigFloat, p: usize) -> BigFloat {
    with_consts(|cc| x.ln(p, RM, cc))
}

/// `log(1 + t)` for `t > -1`, accurate also for tiny `t`.
pub fn log1p(t: &BigFloat, p: usize) -> BigFloat {
    if t.is_zero() {
        return zero(p);
    }
    let small = t.exponent().map(|e| e < -40).unwrap_or(false);
    if small && t.is_positive() {
        // alternating series; |t| < 2^-40 so a few terms reach 2^-(p+8)
        let terms = (p + 8) / 40 + 2;
        let wp = p + 32;
        let mut sum = zero(wp);
        let mut pow = t.clone();
        for k in 1..=terms {
            let term = pow.div(&BigFloat::from_word(k as u64, wp), wp, RM);
            sum = if k % 2 == 1 { sum.add(&term, wp, RM) } else { sum.sub(&term, wp, RM) };
            pow = pow.mul(t, wp, RM);
        }
        let _ = sum.set_precision(p, RM);
        return sum;
    }
    let one = BigFloat::from_word(1, p + 64);
    let s = one.add(t, p + 64, RM);
    ln(&s, p)
}

/// `floor(x)` (`up = false`) or `ceil(x)` (`up = true`) as an integer.
pub fn to_bigint(x: &BigFloat, up: bool) -> BigInt {
    let Some((words, _, sign, e, _)) = x.as_raw_parts() else {
        return BigInt::from(0);
    };
    if x.is_zero() {
        return BigInt::from(0);
    }
    let m = BigInt::from(num_bigint::BigUint::from_slice(
        &words.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect::<Vec<u32>>(),
    ));
    let shift = e as i64 - 64 * words.len() as i64;
    let neg = sign == Sign::Neg;
    let mag = if shift >= 0 {
        m << shift as usize
    } else {
        let s = (-shift) as usize;
        let q = &m >> s;
        // round the magnitude away from zero when that is the requested direction
        let exact = (&q << s) == m;
        if !exact && (up != neg) {
            q + 1
        } else {
            q
        }
    };
    if neg {
        -mag
    } else {
        mag
    }
}

/// Fixed-point decimal with `digits` places, rounded down, up, or to nearest
/// (`RoundingMode::Down`, `Up`, anything else).
pub fn to_fixed(x: &BigFloat, digits: usize, rm: RoundingMode) -> String {
    let p = PRECISION.max(x.mantissa_max_bit_len().unwrap_or(0)) + 4 * digits + 64;
    let scale = from_bigint(&BigInt::from(10u32).pow(digits as u32), p);
    let n = match rm {
        RoundingMode::Down => to_bigint(&x.mul(&scale, p, RoundingMode::Down), false),
        RoundingMode::Up => to_bigint(&x.mul(&scale, p, RoundingMode::Up), true),
        _ => to_bigint(&x.mul(&scale, p, RM).add(&from_f64(0.5, 64), p, RM), false),
    };
    let neg = n.sign() == num_bigint::Sign::Minus;
    let s = n.magnitude().to_string();
    let s = format!("{:0>width$}", s, width = digits + 1);
    let (ip, fp) = s.split_at(s.len() - digits);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(ip);
    if digits > 0 {
        out.push('.');
        out.push_str(fp);
    }
    out
}

/// Nearest fixed-point decimal with `digits` places.
pub fn to_decimal_string(x: &BigFloat, digits: usize) -> String {
    to_fixed(x, digits, RM)
}

/// The invariant measure `dx dy / (1 + x y)^2` of a rectangle,
/// `log((1+x1 y1)(1+x2 y2)) - log((1+x1 y2)(1+x2 y1))`.
///
/// The quotient is formed exactly when the corners share a field, so the only
/// rounding is in the final logarithm.
pub fn mu_rect(r: &Rect, p: usize) -> Result<BigFloat> {
    if r.is_degenerate() {
        return Ok(zero(p));
    }
    match mu_rect_ratio(r) {
        Ok(t) => Ok(log1p(&from_exact(&t, p + 32), p)),
        Err(Error::MixedField(..)) => {
            let wp = p + 64;
            let f = |x: &ExactNumber| from_exact(x, wp);
            let (x1, x2, y1, y2) = (f(&r.x1), f(&r.x2), f(&r.y1), f(&r.y2));
            let one = BigFloat::from_word(1, wp);
            let c = |x: &BigFloat, y: &BigFloat| one.add(&x.mul(y, wp, RM), wp, RM);
            let num = c(&x1, &y1).mul(&c(&x2, &y2), wp, RM);
            let den = c(&x1, &y2).mul(&c(&x2, &y1), wp, RM);
            Ok(ln(&num.div(&den, wp, RM), p))
        }
        Err(e) => Err(e),
    }
}

/// `t = (x2-x1)(y2-y1) / ((1+x1 y2)(1+x2 y1))`, so that `mu = log(1+t)`.
pub fn mu_rect_ratio(r: &Rect) -> Result<ExactNumber> {
    let one = ExactNumber::one();
    let dx = r.x2.checked_sub(&r.x1)?;
    let dy = r.y2.checked_sub(&r.y1)?;
    let num = dx.checked_mul(&dy)?;
    let a = one.checked_add(&r.x1.checked_mul(&r.y2)?)?;
    let b = one.checked_add(&r.x2.checked_mul(&r.y1)?)?;
    num.checked_div(&a.checked_mul(&b)?)
}

/// f64 version of the rectangle measure, used for search decisions.
pub fn mu_rect_f64(x1: f64, x2: f64, y1: f64, y2: f64) -> f64 {
    let t = (x2 - x1) * (y2 - y1) / ((1.0 + x1 * y2) * (1.0 + x2 * y1));
    t.ln_1p()
}

/// `mu(M x-interval, tM^-1 y-interval)` equals `mu(r)`, checked to 1e-12.
pub fn mu_invariance_check(m: &crate::exact::Mobius, r: &Rect) -> Result<bool> {
    let (x1, x2) = m.apply_interval(&r.x1, &r.x2)?;
    let n = m.transpose().inverse();
    let (y1, y2) = n.apply_interval(&r.y1, &r.y2)?;
    let image = Rect::new(x1, x2, y1, y2)?;
    let a = mu_rect(r, PRECISION)?;
    let b = mu_rect(&image, PRECISION)?;
    let diff = to_f64(&a.sub(&b, PRECISION, RM)).abs();
    Ok(diff <= 1e-12)
}

/// Sum with the given rounding direction.
pub fn add_dir(a: &BigFloat, b: &BigFloat, p: usize, up: bool) -> BigFloat {
    a.add(b, p, if up { RoundingMode::Up } else { RoundingMode::Down })
}

pub fn is_negative(x: &BigFloat) -> bool {
    x.is_negative() && !x.is_zero()
}
