//! Truncated power series in a small parameter `eps`, and series in `z`
//! whose coefficients are such jets.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::ratseries::{aligned_window, RatSeries};
use crate::error::{Error, Result};
use crate::numerics::rational::{factorial, serde_q};
use crate::numerics::{QPoly, Q};
use crate::opalg::Operand;
use crate::par::{map_range, Exec};

/// `c_0 + c_1 eps + ... + c_J eps^J`, modulo `eps^(J+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Jet {
    #[serde(with = "serde_q::vec")]
    c: Vec<Q>,
}

impl Jet {
    pub fn new(c: Vec<Q>) -> Self {
        assert!(!c.is_empty(), "jet needs at least one coefficient");
        Jet { c }
    }

    pub fn constant(x: Q, order: usize) -> Self {
        let mut c = vec![Q::zero(); order + 1];
        c[0] = x;
        Jet { c }
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(Q::zero(), order)
    }

    /// `x + eps`.
    pub fn variable(x: Q, order: usize) -> Self {
        let mut j = Self::constant(x, order);
        if order > 0 {
            j.c[1] = Q::one();
        }
        j
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn value(&self) -> &Q {
        &self.c[0]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    /// `p(x + eps)`.
    pub fn eval_poly(p: &QPoly, x: &Q, order: usize) -> Self {
        let s = p.taylor_shift(x);
        Jet { c: (0..=order).map(|i| s.coeff(i)).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        Jet { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Jet { c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, k: &Q) -> Self {
        Jet { c: self.c.iter().map(|a| a * k).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.c.len().min(o.c.len());
        let c = (0..n).map(|k| (0..=k).map(|i| &self.c[i] * &o.c[k - i]).sum()).collect();
        Jet { c }
    }

    /// Inverse, defined when the constant term is nonzero.
    pub fn inv(&self) -> Option<Self> {
        if self.c[0].is_zero() {
            return None;
        }
        let inv0 = self.c[0].recip();
        let mut out = vec![inv0.clone()];
        for k in 1..self.c.len() {
            let s: Q = (1..=k).map(|i| &self.c[i] * &out[k - i]).sum();
            out.push(-s * &inv0);
        }
        Some(Jet { c: out })
    }
}

/// `sum_n c_n(eps) z^(s0 + eps + n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JetSeries {
    #[serde(with = "serde_q")]
    offset: Q,
    jet_order: usize,
    coefficients: Vec<Jet>,
}

impl JetSeries {
    pub fn new(offset: Q, jet_order: usize, coefficients: Vec<Jet>) -> Self {
        debug_assert!(coefficients.iter().all(|j| j.order() == jet_order));
        JetSeries { offset, jet_order, coefficients }
    }

    pub fn offset(&self) -> &Q {
        &self.offset
    }

    pub fn jet_order(&self) -> usize {
        self.jet_order
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coeffs(&self) -> &[Jet] {
        &self.coefficients
    }

    /// `z^offset` times the constant jet `c`.
    pub fn monomial(offset: Q, c: Jet, order: usize) -> Self {
        let j = c.order();
        let mut coeffs = vec![Jet::zero(j); order];
        if order > 0 {
            coeffs[0] = c;
        }
        Self::new(offset, j, coeffs)
    }

    /// The `eps^c` part as an ordinary series in `z` (without the
    /// `z^eps` factor).
    pub fn eps_part(&self, c: usize) -> RatSeries {
        RatSeries::new(self.offset.clone(), self.coefficients.iter().map(|j| j.c[c].clone()).collect())
    }

    /// `d^c/ds^c` of the whole expansion including `z^eps`, as a log series:
    /// the block of `(log z)^k / k!` is `c! * A_{c-k}`.
    pub fn derivative(&self, c: usize) -> Result<super::LogSeries> {
        if c > self.jet_order {
            return Err(Error::Precondition(format!("derivative {c} exceeds jet order {}", self.jet_order)));
        }
        let cf = Q::from_integer(factorial(c as u64));
        let blocks = (0..=c).map(|k| self.eps_part(c - k).scale(&cf)).collect();
        super::LogSeries::new(blocks)
    }

    fn coeff_at(&self, e: &Q) -> Jet {
        let d = (e - &self.offset).to_integer();
        if d < BigInt::zero() {
            return Jet::zero(self.jet_order);
        }
        let n: usize = d.try_into().expect("index");
        self.coefficients[n].clone()
    }
}

impl Operand for JetSeries {
    fn shift(&self, k: i64) -> Result<Self> {
        Ok(Self::new(&self.offset + Q::from_integer(BigInt::from(k)), self.jet_order, self.coefficients.clone()))
    }

    fn apply_dpoly(&self, p: &QPoly) -> Self {
        let coeffs = map_range(Exec::default(), 0, self.order(), |n| {
            let c = &self.coefficients[n];
            if c.is_zero() {
                return c.clone();
            }
            let e = &self.offset + Q::from_integer(BigInt::from(n));
            c.mul(&Jet::eval_poly(p, &e, self.jet_order))
        });
        Self::new(self.offset.clone(), self.jet_order, coeffs)
    }

    fn add(&self, other: &Self) -> Result<Self> {
        if self.jet_order != other.jet_order {
            return Err(Error::Precondition("jet orders differ".into()));
        }
        let (start, len) = aligned_window(&self.offset, self.order(), &other.offset, other.order())?;
        let coeffs = (0..len)
            .map(|i| {
                let e = &start + Q::from_integer(BigInt::from(i));
                self.coeff_at(&e).add(&other.coeff_at(&e))
            })
            .collect();
        Ok(Self::new(start, self.jet_order, coeffs))
    }
}
