//! Exact arithmetic in `Q(sqrt d)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::numerics::{fmt_q, Q};

/// `a + b sqrt(d)` with `d` a fixed squarefree integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSurd {
    pub a: Q,
    pub b: Q,
    pub d: BigInt,
}

impl QuadSurd {
    pub fn new(a: Q, b: Q, d: BigInt) -> Self {
        QuadSurd { a, b, d }
    }

    pub fn rational(a: Q, d: BigInt) -> Self {
        Self::new(a, Q::zero(), d)
    }

    fn dq(&self) -> Q {
        Q::from_integer(self.d.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.a + &o.a, &self.b + &o.b, self.d.clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.a - &o.a, &self.b - &o.b, self.d.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let a = &self.a * &o.a + &self.b * &o.b * self.dq();
        let b = &self.a * &o.b + &self.b * &o.a;
        Self::new(a, b, self.d.clone())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.a.clone(), -&self.b, self.d.clone())
    }

    pub fn norm(&self) -> Q {
        &self.a * &self.a - &self.b * &self.b * self.dq()
    }

    pub fn trace(&self) -> Q {
        &self.a * Q::from_integer(BigInt::from(2))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        let n = o.norm();
        if n.is_zero() {
            return None;
        }
        let num = self.mul(&o.conj());
        Some(Self::new(num.a / &n, num.b / n, self.d.clone()))
    }

    /// `x^2 - trace x + norm`, coefficients listed from the constant term.
    pub fn min_poly(&self) -> Vec<Q> {
        vec![self.norm(), -self.trace(), Q::one()]
    }

    /// Algebraic integer with norm `+-1`.
    pub fn is_unit(&self) -> bool {
        self.min_poly().iter().all(|c| c.is_integer()) && self.norm().abs().is_one()
    }
}

impl fmt::Display for QuadSurd {
    /// `(p + q*sqrt(d))/r` rendered as `(5-√21)/2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = self.a.denom().lcm(self.b.denom());
        let p = (&self.a * Q::from_integer(den.clone())).to_integer();
        let q = (&self.b * Q::from_integer(den.clone())).to_integer();
        let sign = if q.is_negative() { "-" } else { "+" };
        let qs = if q.abs().is_one() { String::new() } else { q.abs().to_string() };
        let body = format!("{p}{sign}{qs}√{}", self.d);
        if den.is_one() {
            write!(f, "{body}")
        } else {
            write!(f, "({body})/{}", fmt_q(&Q::from_integer(den)))
        }
    }
}
