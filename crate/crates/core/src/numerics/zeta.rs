//! Riemann zeta at integer arguments by the Borwein alternating-series
//! acceleration of the eta function.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::hpreal::{bits_for_digits, HPReal, GUARD_DIGITS};
use super::rational::{factorial, q, qi, Q};
use crate::error::{Error, Result};

/// Number of Borwein terms so that `3 / 5.8^n` is below the guarded precision.
fn terms_for(digits: u32) -> usize {
    ((digits + GUARD_DIGITS + 1) as f64 * 1.306).ceil() as usize + 1
}

/// `d_0 .. d_n` of the Borwein scheme, all integers.
fn borwein_d(n: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = BigInt::zero();
    let nn = n as u64;
    for i in 0..=n {
        let i64_ = i as u64;
        let num = factorial(nn + i64_ - 1) * BigInt::from(4).pow(i as u32);
        let den = factorial(nn - i64_) * factorial(2 * i64_);
        acc += num / den;
        out.push(BigInt::from(n) * &acc);
    }
    out
}

/// `zeta(s)` for integer `s >= 2`, accurate to `digits` decimals.
pub fn zeta_int(s: u32, digits: u32) -> Result<HPReal> {
    if s < 2 {
        return Err(Error::Precondition(format!("zeta needs s >= 2, got {s}")));
    }
    let n = terms_for(digits);
    let d = borwein_d(n);
    let dn = &d[n];
    let mut sum = HPReal::zero(digits);
    for k in 0..n {
        let c = if k % 2 == 0 { &d[k] - dn } else { dn - &d[k] };
        let term = HPReal::from_int(&c, digits).div_int(&BigInt::from(k + 1).pow(s));
        sum = &sum + &term;
    }
    let eta = (-&sum).div_int(dn);
    // |eta - eta_n| <= 3 / (3 + sqrt 8)^n < 3 / 5.8^n
    let tail = qi(3) * q(5, 29).pow(n as i32);
    let eta = eta.widen(&tail);
    let factor = Q::one() - Q::new(BigInt::one(), BigInt::one() << (s - 1));
    debug_assert!(bits_for_digits(digits) > 0);
    Ok(eta.mul_q(&factor.recip()))
}
