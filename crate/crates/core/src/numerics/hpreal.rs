//! Fixed-precision reals with a tracked absolute error bound.
//!
//! A value is `mant / 2^bits` and the true quantity lies within
//! `err / 2^bits` of it. Every operation widens `err` conservatively, so the
//! interval `[mid - err, mid + err]` always contains the exact result.
//! `bits` is derived from the requested decimal precision plus
//! [`GUARD_DIGITS`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{qi, Q};
use crate::error::{Error, Result};

/// Extra decimal digits carried beyond every precision request.
pub const GUARD_DIGITS: u32 = 10;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

pub fn bits_for_digits(digits: u32) -> u32 {
    ((digits + GUARD_DIGITS) as f64 * LOG2_10).ceil() as u32 + 8
}

/// Nearest-integer division for a positive divisor.
fn round_div(a: &BigInt, d: &BigInt) -> BigInt {
    debug_assert!(d.is_positive());
    ((a << 1u32) + d).div_floor(&(d << 1u32))
}

fn ceil_div_u(a: &BigUint, d: &BigUint) -> BigUint {
    a.div_ceil(d)
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPReal {
    mant: BigInt,
    err: BigUint,
    digits: u32,
    bits: u32,
}

impl HPReal {
    fn raw(mant: BigInt, err: BigUint, digits: u32) -> Self {
        HPReal { mant, err, digits, bits: bits_for_digits(digits) }
    }

    pub fn zero(digits: u32) -> Self {
        Self::raw(BigInt::zero(), BigUint::zero(), digits)
    }

    /// Nearest representable value to `x`, error at most one unit.
    pub fn from_q(x: &Q, digits: u32) -> Self {
        let bits = bits_for_digits(digits);
        let scaled = x * Q::from_integer(pow2(bits));
        let mant = round_div(scaled.numer(), scaled.denom());
        let exact = scaled.denom().is_one();
        let err = if exact { BigUint::zero() } else { BigUint::one() };
        Self::raw(mant, err, digits)
    }

    pub fn from_int(n: &BigInt, digits: u32) -> Self {
        Self::raw(n << bits_for_digits(digits), BigUint::zero(), digits)
    }

    /// `sqrt(x)` for a nonnegative rational.
    pub fn sqrt_q(x: &Q, digits: u32) -> Result<Self> {
        if x.is_negative() {
            return Err(Error::Precondition("square root of a negative rational".into()));
        }
        let bits = bits_for_digits(digits);
        let scaled = x * Q::from_integer(pow2(2 * bits));
        let n = scaled.floor().to_integer();
        let s = n.sqrt();
        let exact = scaled.denom().is_one() && &s * &s == n;
        let err = if exact { BigUint::zero() } else { BigUint::one() };
        Ok(Self::raw(s, err, digits))
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Same value carried at a (possibly) higher declared precision.
    pub fn with_digits(&self, digits: u32) -> Self {
        let bits = bits_for_digits(digits);
        match bits.cmp(&self.bits) {
            Ordering::Equal => Self { digits, ..self.clone() },
            Ordering::Greater => {
                let sh = bits - self.bits;
                Self::raw(&self.mant << sh, &self.err << sh, digits)
            }
            Ordering::Less => {
                let sh = self.bits - bits;
                let d = pow2(sh);
                let mant = round_div(&self.mant, &d);
                let err = ceil_div_u(&self.err, d.magnitude()) + BigUint::one();
                Self::raw(mant, err, digits)
            }
        }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let d = self.digits.max(other.digits);
        (self.with_digits(d), other.with_digits(d))
    }

    /// Midpoint as an exact rational.
    pub fn mid(&self) -> Q {
        Q::new(self.mant.clone(), pow2(self.bits))
    }

    /// Error radius as an exact rational.
    pub fn err(&self) -> Q {
        Q::new(BigInt::from(self.err.clone()), pow2(self.bits))
    }

    /// Upper bound on `|x|`.
    pub fn abs_upper(&self) -> Q {
        Q::new(BigInt::from(self.mant.magnitude() + &self.err), pow2(self.bits))
    }

    /// True iff the exact rational lies inside the tracked interval.
    pub fn contains(&self, x: &Q) -> bool {
        (x - self.mid()).abs() <= self.err()
    }

    /// Widen the error radius by a rational amount.
    pub fn widen(&self, extra: &Q) -> Self {
        let scaled = extra.abs() * Q::from_integer(pow2(self.bits));
        let add = scaled.ceil().to_integer().to_biguint().unwrap_or_default();
        Self { err: &self.err + add, ..self.clone() }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Self { mant: &self.mant * k, err: &self.err * k.magnitude(), ..self.clone() }
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        assert!(!k.is_zero(), "division by zero");
        let (mant, kk) = if k.is_negative() { (-&self.mant, -k) } else { (self.mant.clone(), k.clone()) };
        let m = round_div(&mant, &kk);
        let err = ceil_div_u(&self.err, kk.magnitude()) + BigUint::one();
        Self { mant: m, err, ..self.clone() }
    }

    pub fn mul_q(&self, x: &Q) -> Self {
        if x.denom().is_one() {
            self.mul_int(x.numer())
        } else {
            self.mul_int(x.numer()).div_int(x.denom())
        }
    }

    /// Certainly `|x| < 10^(-k)`.
    pub fn below_pow10(&self, k: i64) -> bool {
        let bound = if k >= 0 {
            Q::new(BigInt::one(), BigInt::from(10).pow(k as u32))
        } else {
            qi(10).pow(-k as i32)
        };
        self.abs_upper() < bound
    }

    /// Interval comparison; overlapping intervals are reported as
    /// [`Error::Indeterminate`].
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        let diff = self - other;
        if diff.mant.magnitude() <= &diff.err {
            Err(Error::Indeterminate)
        } else if diff.mant.is_positive() {
            Ok(Ordering::Greater)
        } else {
            Ok(Ordering::Less)
        }
    }

    /// `round(mid * 10^k)`.
    pub fn round_scaled(&self, k: u32) -> BigInt {
        round_div(&(&self.mant * BigInt::from(10).pow(k)), &pow2(self.bits))
    }

    pub fn to_f64(&self) -> f64 {
        let m = self.mid();
        m.numer().to_f64().unwrap_or(f64::NAN) / m.denom().to_f64().unwrap_or(f64::NAN)
    }

    /// Midpoint rounded to `places` decimals.
    pub fn to_decimal(&self, places: u32) -> String {
        let r = self.round_scaled(places);
        fixed_point(&r, places)
    }

    /// Rough magnitude of the error radius as `"1e-63"`, rounded up.
    pub fn err_sci(&self) -> String {
        if self.err.is_zero() {
            return "0".into();
        }
        // log10(err / 2^bits), rounded up
        let e = self.err.bits() as f64 - self.bits as f64;
        let exp10 = (e * std::f64::consts::LOG10_2).ceil() as i64;
        format!("1e{exp10}")
    }
}

fn fixed_point(r: &BigInt, places: u32) -> String {
    let neg = r.is_negative();
    let s = r.magnitude().to_string();
    let p = places as usize;
    let s = if s.len() <= p { format!("{}{}", "0".repeat(p + 1 - s.len()), s) } else { s };
    let (int, frac) = s.split_at(s.len() - p);
    let sign = if neg { "-" } else { "" };
    if p == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// Exact decimal expansion of `m / 2^bits`, trailing zeros trimmed.
fn exact_decimal(m: &BigInt, bits: u32) -> String {
    let scaled = m * BigInt::from(5).pow(bits);
    let s = fixed_point(&scaled, bits);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn parse_decimal(s: &str) -> Option<Q> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let v = Q::new(digits, BigInt::from(10).pow(frac.len() as u32));
    Some(if neg { -v } else { v })
}

impl fmt::Display for HPReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}±{}", self.to_decimal(self.digits), self.err_sci())
    }
}

#[derive(Serialize, Deserialize)]
struct HPRealWire {
    value: String,
    err: String,
    digits: u32,
}

impl Serialize for HPReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HPRealWire {
            value: exact_decimal(&self.mant, self.bits),
            err: exact_decimal(&BigInt::from(self.err.clone()), self.bits),
            digits: self.digits,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HPReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = HPRealWire::deserialize(d)?;
        let bits = bits_for_digits(w.digits);
        let scale = Q::from_integer(pow2(bits));
        let to_units = |s: &str| -> std::result::Result<BigInt, D::Error> {
            let v = parse_decimal(s).ok_or_else(|| D::Error::custom("bad decimal"))? * &scale;
            if !v.denom().is_one() {
                return Err(D::Error::custom("value not representable at declared precision"));
            }
            Ok(v.to_integer())
        };
        let mant = to_units(&w.value)?;
        let err = to_units(&w.err)?;
        if err.sign() == Sign::Minus {
            return Err(D::Error::custom("negative error bound"));
        }
        Ok(HPReal { mant, err: err.magnitude().clone(), digits: w.digits, bits })
    }
}

impl Add for &HPReal {
    type Output = HPReal;
    fn add(self, rhs: &HPReal) -> HPReal {
        let (a, b) = self.aligned(rhs);
        HPReal { mant: a.mant + b.mant, err: a.err + b.err, ..a }
    }
}

impl Sub for &HPReal {
    type Output = HPReal;
    fn sub(self, rhs: &HPReal) -> HPReal {
        let (a, b) = self.aligned(rhs);
        HPReal { mant: a.mant - b.mant, err: a.err + b.err, ..a }
    }
}

impl Neg for &HPReal {
    type Output = HPReal;
    fn neg(self) -> HPReal {
        HPReal { mant: -&self.mant, ..self.clone() }
    }
}

impl Mul for &HPReal {
    type Output = HPReal;
    fn mul(self, rhs: &HPReal) -> HPReal {
        let (a, b) = self.aligned(rhs);
        let scale = pow2(a.bits);
        let mant = round_div(&(&a.mant * &b.mant), &scale);
        let spread = a.mant.magnitude() * &b.err + b.mant.magnitude() * &a.err + &a.err * &b.err;
        let err = ceil_div_u(&spread, scale.magnitude()) + BigUint::one();
        HPReal { mant, err, ..a }
    }
}

/// `pi` by Machin's formula.
pub fn pi(digits: u32) -> HPReal {
    let a = atan_inv(5, digits).mul_int(&BigInt::from(16));
    let b = atan_inv(239, digits).mul_int(&BigInt::from(4));
    &a - &b
}

/// `atan(1/k)` for an integer `k >= 2`.
fn atan_inv(k: i64, digits: u32) -> HPReal {
    let k2 = BigInt::from(k * k);
    let mut pow = HPReal::from_int(&BigInt::one(), digits).div_int(&BigInt::from(k));
    let mut sum = HPReal::zero(digits);
    let mut i: i64 = 0;
    loop {
        let term = pow.div_int(&BigInt::from(2 * i + 1));
        sum = if i % 2 == 0 { &sum + &term } else { &sum - &term };
        pow = pow.div_int(&k2);
        i += 1;
        if pow.mant.magnitude() <= &pow.err {
            // alternating with decreasing terms: the tail is below the next term
            return sum.widen(&pow.abs_upper());
        }
    }
}

/// Natural logarithm of a positive rational via `2 atanh((x-1)/(x+1))`.
pub fn ln_q(x: &Q, digits: u32) -> Result<HPReal> {
    if !x.is_positive() {
        return Err(Error::Precondition("logarithm of a nonpositive rational".into()));
    }
    let one = Q::one();
    let y = (x - &one) / (x + &one);
    let y2 = &y * &y;
    let mut pow = HPReal::from_q(&y, digits);
    let mut sum = HPReal::zero(digits);
    let mut i: i64 = 0;
    loop {
        sum = &sum + &pow.div_int(&BigInt::from(2 * i + 1));
        pow = pow.mul_q(&y2);
        i += 1;
        if pow.mant.magnitude() <= &pow.err {
            let tail = pow.abs_upper() / (&one - &y2);
            return Ok(sum.widen(&tail).mul_int(&BigInt::from(2)));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::q;

    #[test]
    fn exact_operations_stay_exact() {
        let a = HPReal::from_q(&q(3, 4), 20);
        let b = HPReal::from_q(&q(1, 8), 20);
        let s = &a + &b;
        assert_eq!(s.mid(), q(7, 8));
        assert!(s.err().is_zero());
    }

    #[test]
    fn interval_contains_exact_results() {
        let x = q(1, 3);
        let y = q(-22, 7);
        let hx = HPReal::from_q(&x, 30);
        let hy = HPReal::from_q(&y, 30);
        assert!((&hx * &hy).contains(&(&x * &y)));
        assert!((&hx - &hy).contains(&(&x - &y)));
        assert!(hx.div_int(&BigInt::from(-9)).contains(&(&x / qi(-9))));
        assert!(hx.mul_q(&q(5, 11)).contains(&(&x * q(5, 11))));
    }

    #[test]
    fn pi_and_logs() {
        let p = pi(40);
        assert_eq!(p.to_decimal(30), "3.141592653589793238462643383280");
        let l2 = ln_q(&qi(2), 40).unwrap();
        assert_eq!(l2.to_decimal(30), "0.693147180559945309417232121458");
        let s2 = HPReal::sqrt_q(&qi(2), 40).unwrap();
        assert_eq!(s2.to_decimal(30), "1.414213562373095048801688724210");
    }

    #[test]
    fn indeterminate_comparison_is_flagged() {
        let a = HPReal::from_q(&q(1, 3), 10);
        let b = a.widen(&q(1, 1000));
        assert_eq!(a.try_cmp(&b), Err(Error::Indeterminate));
        let c = HPReal::from_q(&q(1, 2), 10);
        assert_eq!(a.try_cmp(&c), Ok(Ordering::Less));
    }

    #[test]
    fn serde_is_bit_exact() {
        let x = pi(25).widen(&q(1, 1_000_000_000));
        let js = serde_json::to_string(&x).unwrap();
        let back: HPReal = serde_json::from_str(&js).unwrap();
        assert_eq!(back, x);
        assert_eq!(serde_json::to_string(&back).unwrap(), js);
    }
}
