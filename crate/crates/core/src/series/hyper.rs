//! Hypergeometric coefficients, Frobenius deformations and the
//! quasi-period series at infinity.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::jet::{Jet, JetSeries};
use super::logseries::LogSeries;
use super::ratseries::RatSeries;
use crate::error::{Error, Result};
use crate::hgdef::HGDatum;
use crate::numerics::Q;
use crate::par::{map_range, Exec};

fn qn(n: usize) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Coefficients `prod_j [a_j]_n / [b_j]_n` for `n <= order`.
pub fn hg_coefficients(d: &HGDatum, order: usize) -> RatSeries {
    hg_coefficients_raw(d.a(), d.b(), order)
}

/// As [`hg_coefficients`] for arbitrary parameters; the `b_j` must avoid
/// nonpositive integers.
pub fn hg_coefficients_raw(a: &[Q], b: &[Q], order: usize) -> RatSeries {
    let ratios = map_range(Exec::default(), 0, order, |n| {
        let k = qn(n);
        let num: Q = a.iter().map(|x| x + &k).product();
        let den: Q = b.iter().map(|x| x + &k).product();
        num / den
    });
    let mut c = Vec::with_capacity(order + 1);
    c.push(Q::one());
    for r in ratios {
        let next = c.last().expect("nonempty") * r;
        c.push(next);
    }
    RatSeries::power(c)
}

/// `Phi(s0 + eps, z) = sum_n prod_j [s + a_j]_n / [s + b_j]_n z^(s + n)`
/// expanded to order `jet_order` in `eps`, for `n < order`.
pub fn frobenius_series(d: &HGDatum, s0: &Q, jet_order: usize, order: usize) -> Result<JetSeries> {
    frobenius_series_raw(d.a(), d.b(), s0, jet_order, order)
}

pub fn frobenius_series_raw(a: &[Q], b: &[Q], s0: &Q, jet_order: usize, order: usize) -> Result<JetSeries> {
    let steps = map_range(Exec::default(), 0, order.saturating_sub(1), |n| -> Result<Jet> {
        let base = s0 + qn(n);
        let mut acc = Jet::constant(Q::one(), jet_order);
        for x in a {
            acc = acc.mul(&Jet::variable(&base + x, jet_order));
        }
        for (j, x) in b.iter().enumerate() {
            let den = Jet::variable(&base + x, jet_order).inv().ok_or(Error::PoleCollision { j, n })?;
            acc = acc.mul(&den);
        }
        Ok(acc)
    });
    let mut coeffs = Vec::with_capacity(order);
    if order > 0 {
        coeffs.push(Jet::constant(Q::one(), jet_order));
    }
    for st in steps {
        let next = coeffs.last().expect("nonempty").mul(&st?);
        coeffs.push(next);
    }
    Ok(JetSeries::new(s0.clone(), jet_order, coeffs))
}

/// The `r` solutions `d^c Phi / ds^c` at `s = 0`, `c < r`, for a datum with
/// all `b_j = 1`.
pub fn frobenius_basis(d: &HGDatum, order: usize) -> Result<Vec<LogSeries>> {
    if !d.is_mum() {
        return Err(Error::Precondition(
            "solution basis is implemented for b = (1, ..., 1) only".into(),
        ));
    }
    let r = d.rank();
    let phi = frobenius_series(d, &Q::zero(), r - 1, order)?;
    (0..r).map(|c| phi.derivative(c)).collect()
}

/// Series in `w = 1/z` with coefficient `(n!)^r / (n^r prod_j [a_j]_n)` at
/// `w^n` for `1 <= n <= order` (and 0 at `w^0`).
pub fn quasiperiod_series(d: &HGDatum, order: usize) -> Result<RatSeries> {
    if !d.is_mum() {
        return Err(Error::Precondition("quasi-period series needs b = (1, ..., 1)".into()));
    }
    let r = d.rank() as i32;
    // c_{n+1} / c_n = n^r / prod (n + a_j), c_1 = 1 / prod a_j
    let ratios = map_range(Exec::default(), 1, order, |n| {
        let k = qn(n);
        let den: Q = d.a().iter().map(|x| x + &k).product();
        k.pow(r) / den
    });
    let mut c = vec![Q::zero()];
    if order >= 1 {
        c.push(d.a().iter().product::<Q>().recip());
    }
    for rt in ratios {
        let next = c.last().expect("nonempty") * rt;
        c.push(next);
    }
    Ok(RatSeries::power(c))
}

/// Closed form used as an oracle: `(n!)^r / (n^r prod [a_j]_n)`.
pub fn quasiperiod_coefficient(d: &HGDatum, n: usize) -> Q {
    if n == 0 {
        return Q::zero();
    }
    let fact = Q::from_integer(crate::numerics::rational::factorial(n as u64));
    let poch: Q = d.a().iter().map(|x| crate::numerics::pochhammer(x, n)).product();
    fact.pow(d.rank() as i32) / (qn(n).pow(d.rank() as i32) * poch)
}

/// One coefficient straight from the Pochhammer symbols.
pub fn hg_coefficient(d: &HGDatum, n: usize) -> Q {
    let num: Q = d.a().iter().map(|x| crate::numerics::pochhammer(x, n)).product();
    let den: Q = d.b().iter().map(|x| crate::numerics::pochhammer(x, n)).product();
    num / den
}
