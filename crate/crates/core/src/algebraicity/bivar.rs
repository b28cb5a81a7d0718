//! Laurent polynomials in `z` and `y`, evaluated at `y = f(z)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::rational::serde_q;
use crate::numerics::{QPoly, Q};
use crate::opalg::Operand;
use crate::series::RatSeries;

/// Inclusive exponent ranges for `z` and `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Windows {
    pub i: (i64, i64),
    pub j: (i64, i64),
}

impl Windows {
    pub fn new(i: (i64, i64), j: (i64, i64)) -> Self {
        Windows { i, j }
    }

    pub fn monomials(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for i in self.i.0..=self.i.1 {
            for j in self.j.0..=self.j.1 {
                out.push((i, j));
            }
        }
        out
    }
}

/// `sum c_ij z^i y^j` over a declared window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BivarWire", into = "BivarWire")]
pub struct BivarPoly {
    windows: Windows,
    terms: BTreeMap<(i64, i64), Q>,
}

#[derive(Serialize, Deserialize)]
struct Monomial {
    i: i64,
    j: i64,
    #[serde(with = "serde_q")]
    c: Q,
}

#[derive(Serialize, Deserialize)]
struct BivarWire {
    windows: Windows,
    monomials: Vec<Monomial>,
}

impl TryFrom<BivarWire> for BivarPoly {
    type Error = Error;
    fn try_from(w: BivarWire) -> Result<Self> {
        BivarPoly::new(w.windows, w.monomials.into_iter().map(|m| ((m.i, m.j), m.c)))
    }
}

impl From<BivarPoly> for BivarWire {
    fn from(p: BivarPoly) -> Self {
        BivarWire {
            windows: p.windows,
            monomials: p.terms.into_iter().map(|((i, j), c)| Monomial { i, j, c }).collect(),
        }
    }
}

impl BivarPoly {
    pub fn new(windows: Windows, terms: impl IntoIterator<Item = ((i64, i64), Q)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for ((i, j), c) in terms {
            if c.is_zero() {
                continue;
            }
            if i < windows.i.0 || i > windows.i.1 || j < windows.j.0 || j > windows.j.1 {
                return Err(Error::Precondition(format!("monomial z^{i} y^{j} lies outside the window")));
            }
            *map.entry((i, j)).or_insert_with(Q::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(BivarPoly { windows, terms: map })
    }

    /// Window spanned by the given terms.
    pub fn from_terms(terms: impl IntoIterator<Item = ((i64, i64), Q)>) -> Self {
        let terms: Vec<_> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let fold = |f: fn(&(i64, i64)) -> i64| {
            let lo = terms.iter().map(|(k, _)| f(k)).min().unwrap_or(0);
            let hi = terms.iter().map(|(k, _)| f(k)).max().unwrap_or(0);
            (lo, hi)
        };
        let windows = Windows::new(fold(|k| k.0), fold(|k| k.1));
        Self::new(windows, terms).expect("window covers terms")
    }

    /// Polynomial in `y` with coefficients in `Q[z]`, listed by `y` degree.
    pub fn from_y_coeffs(cs: &[QPoly]) -> Self {
        Self::from_terms(
            cs.iter()
                .enumerate()
                .flat_map(|(j, p)| p.coeffs().iter().enumerate().map(move |(i, c)| ((i as i64, j as i64), c.clone()))),
        )
    }

    pub fn windows(&self) -> Windows {
        self.windows
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: i64, j: i64) -> Q {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::new(self.windows, self.terms.iter().map(|(k, v)| (*k, v * c))).expect("same window")
    }

    /// Integer coprime coefficients, positive coefficient on the monomial
    /// with largest `(j, i)`.
    pub fn content_normalize(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let g = self
            .terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(&(c.numer() * (&l / c.denom()))));
        let lead = self.terms.iter().max_by_key(|((i, j), _)| (*j, *i)).map(|(_, c)| c).expect("nonzero");
        let mut f = Q::new(l, g);
        if lead.is_negative() {
            f = -f;
        }
        self.scale(&f)
    }

    /// Smallest exponents present (for clearing denominators).
    pub fn min_exponents(&self) -> (i64, i64) {
        let i = self.terms.keys().map(|k| k.0).min().unwrap_or(0);
        let j = self.terms.keys().map(|k| k.1).min().unwrap_or(0);
        (i, j)
    }

    /// Multiply by `z^a y^b`.
    pub fn shift(&self, a: i64, b: i64) -> Self {
        Self::from_terms(self.terms.iter().map(|((i, j), c)| ((i + a, j + b), c.clone())))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out: BTreeMap<(i64, i64), Q> = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            for ((k, l), d) in &o.terms {
                *out.entry((i + k, j + l)).or_insert_with(Q::zero) += c * d;
            }
        }
        Self::from_terms(out)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.terms.clone();
        for (k, c) in &o.terms {
            *out.entry(*k).or_insert_with(Q::zero) -= c;
        }
        Self::from_terms(out)
    }

    /// As a polynomial in `y` with `Q[z]` coefficients; all exponents must
    /// be nonnegative.
    pub fn y_coeffs(&self) -> Option<Vec<QPoly>> {
        let (mi, mj) = self.min_exponents();
        if mi < 0 || mj < 0 {
            return None;
        }
        let dj = self.terms.keys().map(|k| k.1).max().unwrap_or(0) as usize;
        let mut out = vec![Vec::<Q>::new(); dj + 1];
        for ((i, j), c) in &self.terms {
            let v = &mut out[*j as usize];
            if v.len() <= *i as usize {
                v.resize(*i as usize + 1, Q::zero());
            }
            v[*i as usize] = c.clone();
        }
        Some(out.into_iter().map(QPoly::new).collect())
    }

    /// `sum c_ij z^i f^j` as a series. Negative powers of `f` need
    /// `f(0) != 0`; `f` must be a power series.
    pub fn eval_at(&self, f: &RatSeries) -> Result<RatSeries> {
        let powers = SeriesPowers::new(f, self.windows.j)?;
        let mut acc: Option<RatSeries> = None;
        for ((i, j), c) in &self.terms {
            let t = powers.get(*j).scale(c).shift(*i)?;
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t)?,
            });
        }
        acc.ok_or_else(|| Error::Precondition("zero polynomial".into()))
    }
}

/// Cached `f^j` for `j` in a range.
pub(crate) struct SeriesPowers {
    lo: i64,
    pows: Vec<RatSeries>,
}

impl SeriesPowers {
    pub(crate) fn new(f: &RatSeries, (lo, hi): (i64, i64)) -> Result<Self> {
        if !f.offset().is_zero() {
            return Err(Error::Precondition("expected a power series".into()));
        }
        let one = RatSeries::monomial(Q::zero(), f.order());
        let inv = if lo < 0 { Some(f.inverse()?) } else { None };
        let mut pows = Vec::new();
        for j in lo..=hi {
            let p = if j == 0 {
                one.clone()
            } else if j > 0 && j - 1 >= lo {
                f.mul(pows.last().expect("previous power"))
            } else if j > 0 {
                f.powi(j)?
            } else {
                inv.as_ref().expect("inverse").powi(-j)?
            };
            pows.push(p);
        }
        Ok(SeriesPowers { lo, pows })
    }

    pub(crate) fn get(&self, j: i64) -> &RatSeries {
        &self.pows[(j - self.lo) as usize]
    }
}

/// Pseudo-remainder of `a` by `p` as polynomials in `y` over `Q[z]`.
pub fn pseudo_remainder(a: &[QPoly], p: &[QPoly]) -> Vec<QPoly> {
    let trim = |v: &mut Vec<QPoly>| {
        while v.last().is_some_and(QPoly::is_zero) {
            v.pop();
        }
    };
    let mut r = a.to_vec();
    let mut p = p.to_vec();
    trim(&mut r);
    trim(&mut p);
    let dp = p.len() - 1;
    let lc = p[dp].clone();
    while r.len() > dp {
        let k = r.len() - 1;
        let lr = r[k].clone();
        let shift = k - dp;
        let mut next: Vec<QPoly> = r.iter().map(|c| c * &lc).collect();
        for (t, pc) in p.iter().enumerate() {
            next[t + shift] = &next[t + shift] - &(&lr * pc);
        }
        r = next;
        trim(&mut r);
    }
    r
}

/// `a == b` on the curve `p = 0`, for Laurent `a`, `b`.
pub fn equal_mod_curve(a: &BivarPoly, b: &BivarPoly, p: &BivarPoly) -> bool {
    let diff = a.sub(b);
    if diff.is_zero() {
        return true;
    }
    let (mi, mj) = diff.min_exponents();
    let cleared = diff.shift(-mi.min(0), -mj.min(0));
    let (Some(ac), Some(pc)) = (cleared.y_coeffs(), p.y_coeffs()) else {
        return false;
    };
    pseudo_remainder(&ac, &pc).iter().all(QPoly::is_zero)
}

/// `num1 / den1 == num2 / den2` on the curve.
pub fn ratio_equal_mod_curve(num1: &BivarPoly, den1: &BivarPoly, num2: &BivarPoly, den2: &BivarPoly, p: &BivarPoly) -> bool {
    equal_mod_curve(&num1.mul(den2), &num2.mul(den1), p)
}
