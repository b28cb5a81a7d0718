//! Certified numerical evaluation: partial sums plus explicit geometric
//! tail bounds.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ratseries::RatSeries;
use crate::error::{Error, Result};
use crate::hgdef::HGDatum;
use crate::numerics::hpreal::GUARD_DIGITS;
use crate::numerics::{fmt_q, HPReal, Q};
use crate::par::{map_range, map_slice, Exec};

/// `|c_(n+1)| <= ratio * |c_n|` for every `n >= from`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioBound {
    pub from: usize,
    pub ratio: Q,
}

impl RatioBound {
    /// Bound for `prod [a_j]_n / [b_j]_n`: each factor `(n + a)/(n + b)`
    /// tends monotonically to 1, so its supremum over `n >= from` is
    /// `max(1, (from + a)/(from + b))`.
    pub fn hypergeometric(d: &HGDatum, from: usize) -> Self {
        let f = Q::from_integer(BigInt::from(from));
        let ratio = d
            .a()
            .iter()
            .zip(d.b())
            .map(|(a, b)| {
                let r = (&f + a) / (&f + b);
                if r > Q::one() {
                    r
                } else {
                    Q::one()
                }
            })
            .product();
        RatioBound { from, ratio }
    }

    /// Quasi-period coefficients satisfy `c_(n+1)/c_n = n^r / prod (n + a_j) <= 1`.
    pub fn quasiperiod() -> Self {
        RatioBound { from: 1, ratio: Q::one() }
    }
}

fn pow10_neg(k: u32) -> Q {
    Q::new(BigInt::one(), BigInt::from(10).pow(k))
}

fn int_pow(z: &Q, e: &Q) -> Result<Q> {
    if !e.is_integer() {
        return Err(Error::Precondition(format!("cannot evaluate z^{} at a rational point", fmt_q(e))));
    }
    let k = e.to_integer().to_i32().ok_or_else(|| Error::Precondition("exponent too large".into()))?;
    Ok(z.pow(k))
}

/// Evaluate a truncated series at `z0` using as many known terms as the
/// tail bound requires.
pub fn eval_series(s: &RatSeries, z0: &Q, bound: &RatioBound, digits: u32) -> Result<HPReal> {
    let rho = &bound.ratio * z0.abs();
    if rho >= Q::one() {
        return Err(Error::Uncertifiable(format!("term ratio bound {} is not below 1", fmt_q(&rho))));
    }
    let geo = &rho / (Q::one() - &rho);
    let target = pow10_neg(digits + 1);
    let base = int_pow(z0, s.offset())?;
    let terms: Vec<Q> = map_range(Exec::default(), 0, s.order(), |n| {
        let c = &s.coeffs()[n];
        if c.is_zero() {
            Q::zero()
        } else {
            c * &base * z0.pow(n as i32)
        }
    });
    let mut stop = None;
    for n in bound.from..terms.len() {
        let tail = terms[n].abs() * &geo;
        if tail < target {
            stop = Some((n + 1, tail));
            break;
        }
    }
    let (count, tail) = stop.ok_or_else(|| {
        Error::Uncertifiable(format!("{} known terms do not reach 10^-{digits}", s.order()))
    })?;
    let work = digits + 2;
    let parts = map_slice(Exec::default(), &terms[..count], |t| HPReal::from_q(t, work));
    let sum = parts.iter().fold(HPReal::zero(work), |acc, x| &acc + x);
    Ok(sum.widen(&tail).with_digits(digits))
}

/// Same as [`moment_sums_with`] without progress reporting.
pub fn moment_sums(d: &HGDatum, z0: &Q, q: usize, digits: u32) -> Result<Vec<HPReal>> {
    moment_sums_with(d, z0, q, digits, Exec::default(), &mut |_, _| true)
}

/// `S_j = sum_{n >= 1} n^j t_n` for `j = 0..=q`, with
/// `t_n = (n!)^r z0^-n / (n^r prod [a_j]_n)`.
///
/// `progress(count, tail)` is called every 32 terms with the current
/// tail estimate; returning `false` aborts with [`Error::Interrupted`].
pub fn moment_sums_with(
    d: &HGDatum,
    z0: &Q,
    q: usize,
    digits: u32,
    exec: Exec,
    progress: &mut dyn FnMut(usize, f64) -> bool,
) -> Result<Vec<HPReal>> {
    if !d.is_mum() {
        return Err(Error::Precondition("moment sums need b = (1, ..., 1)".into()));
    }
    if z0.abs() <= Q::one() {
        return Err(Error::Precondition(format!("|z0| must exceed 1, got {}", fmt_q(z0))));
    }
    let w = z0.recip();
    let aw = w.abs();
    // Guard digits absorb the n^q weights and the rounding of each step.
    let wf = aw.to_f64().unwrap_or(0.5);
    let est = ((digits + GUARD_DIGITS) as f64 / -wf.log10()).max(2.0) * 1.5;
    let work = digits + 4 + (q as f64 * est.log10()).ceil() as u32;
    let target = pow10_neg(digits + 2);
    let r = d.rank() as i32;

    let mut terms: Vec<HPReal> = Vec::new();
    let prod_a: Q = d.a().iter().product();
    let mut t = HPReal::from_q(&(&w / prod_a), work);
    let mut n: usize = 1;
    let tail = loop {
        terms.push(t.clone());
        let nq = Q::from_integer(BigInt::from(n));
        let n1 = &nq + Q::one();
        let rho = (&n1 / &nq).pow(q as i32) * &aw;
        if rho < Q::one() {
            let bound = nq.pow(q as i32) * t.abs_upper() * &rho / (Q::one() - &rho);
            if bound < target {
                break bound;
            }
            if n % 32 == 0 && !progress(n, bound.to_f64().unwrap_or(f64::INFINITY)) {
                return Err(Error::Interrupted(n));
            }
        }
        let den: Q = d.a().iter().map(|a| &nq + a).product();
        t = t.mul_q(&(&w * nq.pow(r) / den));
        n += 1;
    };
    progress(terms.len(), tail.to_f64().unwrap_or(0.0));

    let sums = map_range(exec, 0, q + 1, |j| {
        let mut acc = HPReal::zero(work);
        for (i, t) in terms.iter().enumerate() {
            let weight = BigInt::from(i + 1).pow(j as u32);
            acc = &acc + &t.mul_int(&weight);
        }
        acc.widen(&tail).with_digits(digits)
    });
    Ok(sums)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{q, qi};
    use crate::series::{hg_coefficients, quasiperiod_series};

    #[test]
    fn geometric_series() {
        let s = RatSeries::power(vec![Q::one(); 200]);
        let v = eval_series(&s, &q(1, 2), &RatioBound { from: 0, ratio: qi(1) }, 40).unwrap();
        assert!(v.contains(&qi(2)));
        assert!(v.err() < pow10_neg(40));
    }

    #[test]
    fn inverse_square_root() {
        let d: HGDatum = "a=1/2;b=1".parse().unwrap();
        let f = hg_coefficients(&d, 200);
        let v = eval_series(&f, &q(1, 4), &RatioBound::hypergeometric(&d, 0), 40).unwrap();
        // 1/sqrt(3/4) = 2/sqrt 3, so 3 v^2 = 4
        let sq = &v * &v;
        assert!((sq.mid() * qi(3) - qi(4)).abs() < pow10_neg(38));
    }

    #[test]
    fn too_few_terms_is_uncertifiable() {
        let s = RatSeries::power(vec![Q::one(); 10]);
        let e = eval_series(&s, &q(1, 2), &RatioBound { from: 0, ratio: qi(1) }, 40);
        assert!(matches!(e, Err(Error::Uncertifiable(_))));
        assert!(eval_series(&s, &qi(1), &RatioBound { from: 0, ratio: qi(1) }, 5).is_err());
    }

    #[test]
    fn first_moment_matches_quasiperiod_value() {
        let d = HGDatum::mum(&vec![q(1, 2); 5]).unwrap();
        let s = moment_sums(&d, &qi(-4), 0, 30).unwrap();
        let v = quasiperiod_series(&d, 150).unwrap();
        let e = eval_series(&v, &q(-1, 4), &RatioBound::quasiperiod(), 30).unwrap();
        assert!((&s[0] - &e).below_pow10(29));
    }

    #[test]
    fn interruption() {
        let d = HGDatum::mum(&vec![q(1, 2); 5]).unwrap();
        let r = moment_sums_with(&d, &q(-11, 10), 2, 60, Exec::Sequential, &mut |_, _| false);
        assert!(matches!(r, Err(Error::Interrupted(_))));
        assert!(moment_sums(&d, &q(-1, 2), 0, 10).is_err());
    }
}
