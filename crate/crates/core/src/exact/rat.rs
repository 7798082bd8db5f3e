//! Helpers on top of `BigRational`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ExactError;

/// Arbitrary-precision rational. `BigRational` keeps numerator and
/// denominator coprime with a positive denominator.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"p"`, `"p/q"` or a plain decimal such as `"-0.25"`.
pub fn parse_rat(s: &str) -> Result<Rat, ExactError> {
    let s = s.trim();
    let bad = || ExactError::Parse(format!("not a rational literal: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.trim_start().starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let v = Rat::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(n))
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Converts a rational to `f64` without overflowing on huge numerators and
/// denominators. Relative error is a few ulps.
pub fn rat_to_f64(r: &Rat) -> f64 {
    ratio_to_f64(r.numer(), r.denom())
}

pub fn ratio_to_f64(n: &BigInt, d: &BigInt) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    let (m, e) = ratio_mantissa(n, d);
    (m / 2f64.powi(53)) * pow2(e + 53)
}

fn pow2(e: i64) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e < -1074 {
        0.0
    } else if e < -1022 {
        2f64.powi(-1022) * 2f64.powi((e + 1022) as i32)
    } else {
        2f64.powi(e as i32)
    }
}

/// Returns (m, e) with n/d ≈ m·2^e and 2^52 ≤ |m| < 2^54.
fn ratio_mantissa(n: &BigInt, d: &BigInt) -> (f64, i64) {
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    // shift so the integer quotient carries about 53 significant bits
    let shift = 53 - (nb - db);
    let q = if shift >= 0 {
        (n << (shift as usize)) / d
    } else {
        n / (d << ((-shift) as usize))
    };
    (q.to_f64().unwrap_or(0.0), -shift)
}

/// Natural logarithm of a positive rational, robust for values far outside
/// the `f64` exponent range.
pub fn ln_rat(r: &Rat) -> f64 {
    assert!(r.is_positive(), "ln of non-positive rational");
    ln_ratio(r.numer(), r.denom())
}

pub fn ln_ratio(n: &BigInt, d: &BigInt) -> f64 {
    let (m, e) = ratio_mantissa(n, d);
    m.abs().ln() + (e as f64) * std::f64::consts::LN_2
}

pub fn ln_bigint(n: &BigInt) -> f64 {
    ln_ratio(n, &BigInt::one())
}

pub fn floor_rat(r: &Rat) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn ceil_rat(r: &Rat) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

/// Nearest integer, ties toward +∞.
pub fn round_rat(r: &Rat) -> BigInt {
    floor_rat(&(r + rat(1, 2)))
}

/// Largest multiple of 2^-bits that is ≤ r.
pub fn dyadic_floor(r: &Rat, bits: u32) -> Rat {
    let scale = BigInt::one() << bits as usize;
    Rat::new(floor_rat(&(r * Rat::from_integer(scale.clone()))), scale)
}

/// Smallest multiple of 2^-bits that is ≥ r.
pub fn dyadic_ceil(r: &Rat, bits: u32) -> Rat {
    let scale = BigInt::one() << bits as usize;
    Rat::new(ceil_rat(&(r * Rat::from_integer(scale.clone()))), scale)
}

pub fn pow2_rat(e: i64) -> Rat {
    if e >= 0 {
        Rat::from_integer(BigInt::one() << e as usize)
    } else {
        Rat::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// Exact rational from an `f64` (every finite double is dyadic).
pub fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("finite float")
}

pub fn sign_of(r: &Rat) -> Sign {
    if r.is_zero() {
        Sign::NoSign
    } else if r.is_positive() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

pub fn lcm_of_denominators<'a>(it: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    it.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub fn gcd_of<'a>(it: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    it.into_iter().fold(BigInt::zero(), |acc, n| acc.gcd(n))
}

// serde adapters: rationals render as literals, big integers as strings

pub fn ser_rat<S: serde::Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rat(r))
}

pub fn ser_opt_rat<S: serde::Serializer>(r: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&fmt_rat(r)),
        None => s.serialize_none(),
    }
}

pub fn ser_rats<S: serde::Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(fmt_rat))
}

pub fn ser_ints<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}
