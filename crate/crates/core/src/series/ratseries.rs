//! Truncated series `sum_{n < order} c_n z^(s0 + n)` with exact coefficients.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::rational::serde_q;
use crate::numerics::{fmt_q, QPoly, Q};
use crate::opalg::Operand;
use crate::par::{map_range, Exec};

/// Coefficients with index `n >= order` are unknown; they are never treated
/// as zero. Exponents below the offset are known to vanish.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SeriesWire", into = "SeriesWire")]
pub struct RatSeries {
    offset: Q,
    coeffs: Vec<Q>,
}

#[derive(Serialize, Deserialize)]
struct SeriesWire {
    #[serde(with = "serde_q")]
    offset: Q,
    order: usize,
    #[serde(with = "serde_q::vec")]
    coefficients: Vec<Q>,
}

impl TryFrom<SeriesWire> for RatSeries {
    type Error = String;
    fn try_from(w: SeriesWire) -> std::result::Result<Self, String> {
        if w.coefficients.len() != w.order {
            return Err(format!("order {} but {} coefficients", w.order, w.coefficients.len()));
        }
        Ok(RatSeries { offset: w.offset, coeffs: w.coefficients })
    }
}

impl From<RatSeries> for SeriesWire {
    fn from(s: RatSeries) -> Self {
        SeriesWire { offset: s.offset, order: s.coeffs.len(), coefficients: s.coeffs }
    }
}

/// Measure for [`RatSeries::integrate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    /// `dz`
    Dz,
    /// `dz / z`
    DzOverZ,
}

impl RatSeries {
    pub fn new(offset: Q, coeffs: Vec<Q>) -> Self {
        RatSeries { offset, coeffs }
    }

    /// Power series (offset 0).
    pub fn power(coeffs: Vec<Q>) -> Self {
        Self::new(Q::zero(), coeffs)
    }

    pub fn zeros(offset: Q, order: usize) -> Self {
        Self::new(offset, vec![Q::zero(); order])
    }

    /// `z^offset` known to `order` terms.
    pub fn monomial(offset: Q, order: usize) -> Self {
        let mut s = Self::zeros(offset, order);
        if order > 0 {
            s.coeffs[0] = Q::one();
        }
        s
    }

    pub fn offset(&self) -> &Q {
        &self.offset
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<&Q> {
        self.coeffs.get(n)
    }

    /// Coefficient of `z^e`; `None` if unknown or if `e` is not in the
    /// lattice `offset + Z`.
    pub fn coeff_at(&self, e: &Q) -> Option<Q> {
        let d = e - &self.offset;
        if !d.is_integer() {
            return None;
        }
        let n = d.to_integer();
        if n < BigInt::zero() {
            return Some(Q::zero());
        }
        let n: usize = n.try_into().ok()?;
        self.coeffs.get(n).cloned()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.offset.clone(), self.coeffs[..order.min(self.order())].to_vec())
    }

    /// Move leading zero coefficients into the offset.
    pub fn strip_leading_zeros(&self) -> Self {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        Self::new(&self.offset + Q::from_integer(BigInt::from(k)), self.coeffs[k..].to_vec())
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::new(self.offset.clone(), self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn map_coeffs(&self, f: impl Fn(usize, &Q) -> Q) -> Self {
        Self::new(self.offset.clone(), self.coeffs.iter().enumerate().map(|(n, c)| f(n, c)).collect())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Operand::add(self, &other.neg())
    }

    /// Cauchy product; known to the shorter of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let coeffs = map_range(Exec::default(), 0, n, |k| {
            (0..=k).fold(Q::zero(), |acc, i| {
                if self.coeffs[i].is_zero() {
                    acc
                } else {
                    acc + &self.coeffs[i] * &other.coeffs[k - i]
                }
            })
        });
        Self::new(&self.offset + &other.offset, coeffs)
    }

    /// Multiplicative inverse; the leading coefficient must be nonzero.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = match self.coeffs.first() {
            Some(c) if !c.is_zero() => c.clone(),
            _ => return Err(Error::Precondition("series with vanishing leading term is not invertible".into())),
        };
        let inv0 = c0.recip();
        let mut out: Vec<Q> = Vec::with_capacity(self.order());
        out.push(inv0.clone());
        for k in 1..self.order() {
            let s = (1..=k).fold(Q::zero(), |acc, i| acc + &self.coeffs[i] * &out[k - i]);
            out.push(-s * &inv0);
        }
        Ok(Self::new(-&self.offset, out))
    }

    /// Integer power; negative powers need an invertible series.
    pub fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Self::monomial(Q::zero(), self.order());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Termwise antiderivative with zero constant of integration.
    pub fn integrate(&self, measure: Measure) -> Result<Self> {
        let shift = match measure {
            Measure::Dz => Q::one(),
            Measure::DzOverZ => Q::zero(),
        };
        let mut out = Vec::with_capacity(self.order());
        for (n, c) in self.coeffs.iter().enumerate() {
            let e = &self.offset + Q::from_integer(BigInt::from(n)) + &shift;
            if e.is_zero() {
                if !c.is_zero() {
                    return Err(Error::Precondition(format!(
                        "the z^{} term integrates to a logarithm",
                        fmt_q(&(&e - &shift))
                    )));
                }
                out.push(Q::zero());
            } else {
                out.push(c / e);
            }
        }
        Ok(Self::new(&self.offset + shift, out))
    }

    /// Polynomial in `z` (offset must be a nonnegative integer).
    pub fn to_poly(&self) -> Option<QPoly> {
        if !self.offset.is_integer() || self.offset < Q::zero() {
            return None;
        }
        let k: usize = self.offset.to_integer().try_into().ok()?;
        let mut c = vec![Q::zero(); k];
        c.extend(self.coeffs.iter().cloned());
        Some(QPoly::new(c))
    }
}

impl Operand for RatSeries {
    fn shift(&self, k: i64) -> Result<Self> {
        Ok(Self::new(&self.offset + Q::from_integer(BigInt::from(k)), self.coeffs.clone()))
    }

    fn apply_dpoly(&self, p: &QPoly) -> Self {
        let coeffs = map_range(Exec::default(), 0, self.order(), |n| {
            let c = &self.coeffs[n];
            if c.is_zero() {
                Q::zero()
            } else {
                c * p.eval(&(&self.offset + Q::from_integer(BigInt::from(n))))
            }
        });
        Self::new(self.offset.clone(), coeffs)
    }

    fn add(&self, other: &Self) -> Result<Self> {
        let (start, len) = aligned_window(&self.offset, self.order(), &other.offset, other.order())?;
        let coeffs = (0..len)
            .map(|i| {
                let e = &start + Q::from_integer(BigInt::from(i));
                self.coeff_at(&e).expect("in window") + other.coeff_at(&e).expect("in window")
            })
            .collect();
        Ok(Self::new(start, coeffs))
    }
}

/// Common window of two truncated expansions: start at the lower offset,
/// end where the first of them becomes unknown.
pub(crate) fn aligned_window(o1: &Q, n1: usize, o2: &Q, n2: usize) -> Result<(Q, usize)> {
    let d = o1 - o2;
    if !d.is_integer() {
        return Err(Error::Precondition(format!(
            "offsets {} and {} differ by a non-integer",
            fmt_q(o1),
            fmt_q(o2)
        )));
    }
    let start = o1.min(o2).clone();
    let top1 = o1 + Q::from_integer(BigInt::from(n1));
    let top2 = o2 + Q::from_integer(BigInt::from(n2));
    let top = top1.min(top2);
    let len = &top - &start;
    if len <= Q::zero() {
        return Err(Error::Truncation("no coefficient is known for both operands".into()));
    }
    Ok((start, len.to_integer().try_into().expect("small window")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{q, qi};

    fn geo(n: usize) -> RatSeries {
        RatSeries::power(vec![Q::one(); n])
    }

    #[test]
    fn inverse_of_geometric_series() {
        let inv = geo(8).inverse().unwrap();
        assert_eq!(inv.coeffs()[..3], [qi(1), qi(-1), qi(0)]);
        assert!(inv.coeffs()[2..].iter().all(Zero::is_zero));
        assert_eq!(geo(8).mul(&inv), RatSeries::monomial(Q::zero(), 8));
    }

    #[test]
    fn addition_truncates_to_common_window() {
        let a = RatSeries::new(qi(0), vec![qi(1); 5]);
        let b = RatSeries::new(qi(2), vec![qi(1); 5]);
        let s = Operand::add(&a, &b).unwrap();
        assert_eq!(s.offset(), &qi(0));
        assert_eq!(s.coeffs(), &[qi(1), qi(1), qi(2), qi(2), qi(2)]);
        let c = RatSeries::new(q(1, 2), vec![qi(1)]);
        assert!(Operand::add(&a, &c).is_err());
    }

    #[test]
    fn integration_modes() {
        let s = RatSeries::power(vec![qi(1), qi(1), qi(1)]);
        let i = s.integrate(Measure::Dz).unwrap();
        assert_eq!(i.offset(), &qi(1));
        assert_eq!(i.coeffs(), &[qi(1), q(1, 2), q(1, 3)]);
        assert!(s.integrate(Measure::DzOverZ).is_err());
        let t = RatSeries::power(vec![qi(0), qi(2), qi(3)]);
        assert_eq!(t.integrate(Measure::DzOverZ).unwrap().coeffs(), &[qi(0), qi(2), q(3, 2)]);
    }

    #[test]
    fn d_acts_diagonally() {
        let s = RatSeries::monomial(q(1, 3), 1);
        let r = s.apply_dpoly(&QPoly::x());
        assert_eq!(r.coeffs(), &[q(1, 3)]);
    }

    #[test]
    fn json_shape() {
        let s = RatSeries::new(q(1, 2), vec![q(3, 8), qi(-1)]);
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, r#"{"offset":"1/2","order":2,"coefficients":["3/8","-1"]}"#);
        assert_eq!(serde_json::from_str::<RatSeries>(&js).unwrap(), s);
    }
}
