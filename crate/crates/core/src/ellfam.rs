//! The elliptic family cut out by `phi(x, y) = 1/z` with
//! `phi = (x - y)(1 + 1/x)(1 + 1/y)`: its vanishing period, Picard-Fuchs
//! operator, the Abel-Jacobi integral of the section `W_z` and the
//! resulting extension period.
//!
//! Multiples of `pi i` are kept as a separate rational series (a formal
//! unit), never evaluated numerically.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hgdef::HGDatum;
use crate::numerics::rational::{factorial, serde_q};
use crate::numerics::{pochhammer, q, qi, QPoly, Q};
use crate::opalg::{pf_operator, pullback_powermap, DiffOp};
use crate::par::{map_range, Exec};
use crate::series::{integrate_termwise, Measure, RatSeries};

/// Laurent polynomial in `x`, `y`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPoly2 {
    terms: BTreeMap<(i64, i64), Q>,
}

impl LaurentPoly2 {
    pub fn new(terms: impl IntoIterator<Item = ((i64, i64), Q)>) -> Self {
        let mut map: BTreeMap<(i64, i64), Q> = BTreeMap::new();
        for (k, c) in terms {
            *map.entry(k).or_insert_with(Q::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        LaurentPoly2 { terms: map }
    }

    pub fn one() -> Self {
        Self::new([((0, 0), Q::one())])
    }

    pub fn terms(&self) -> &BTreeMap<(i64, i64), Q> {
        &self.terms
    }

    pub fn coeff(&self, i: i64, j: i64) -> Q {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `|i|` and `|j|` in the support.
    pub fn width(&self) -> (i64, i64) {
        let wi = self.terms.keys().map(|k| k.0.abs()).max().unwrap_or(0);
        let wj = self.terms.keys().map(|k| k.1.abs()).max().unwrap_or(0);
        (wi, wj)
    }

    /// Product, keeping only monomials accepted by `keep`.
    pub fn mul_filtered(&self, o: &Self, keep: impl Fn(i64, i64) -> bool) -> Self {
        let mut out: BTreeMap<(i64, i64), Q> = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            for ((k, l), d) in &o.terms {
                let (a, b) = (i + k, j + l);
                if keep(a, b) {
                    *out.entry((a, b)).or_insert_with(Q::zero) += c * d;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        LaurentPoly2 { terms: out }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.mul_filtered(o, |_, _| true)
    }

    /// `self^n` keeping only monomials that can still reach the box
    /// `|i| <= ti`, `|j| <= tj` after the remaining factors.
    fn pow_toward(&self, n: usize, ti: Option<i64>, tj: Option<i64>) -> Self {
        let (wi, wj) = self.width();
        let mut acc = Self::one();
        for step in 1..=n {
            let left = (n - step) as i64;
            acc = acc.mul_filtered(self, |a, b| {
                ti.map_or(true, |t| a.abs() <= t + left * wi) && tj.map_or(true, |t| b.abs() <= t + left * wj)
            });
        }
        acc
    }

    /// Constant term of `self^n`.
    pub fn const_term_of_power(&self, n: usize) -> Q {
        self.pow_toward(n, Some(0), Some(0)).coeff(0, 0)
    }

    /// Coefficient of `y^0` in `self^n`, as a Laurent polynomial in `x`.
    pub fn y_const_of_power(&self, n: usize) -> BTreeMap<i64, Q> {
        self.pow_toward(n, None, Some(0))
            .terms
            .into_iter()
            .filter(|((_, j), _)| *j == 0)
            .map(|((i, _), c)| (i, c))
            .collect()
    }

    /// Substitute rational functions for `x` and `y`.
    pub fn substitute(&self, x: &RatFunc, y: &RatFunc) -> Result<RatFunc> {
        let mut acc = RatFunc::constant(Q::zero());
        for ((i, j), c) in &self.terms {
            let t = x.powi(*i)?.mul(&y.powi(*j)?).scale(c);
            acc = acc.add(&t);
        }
        Ok(acc)
    }
}

/// `(x - y)(1 + 1/x)(1 + 1/y)`.
pub fn phi() -> LaurentPoly2 {
    let x_minus_y = LaurentPoly2::new([((1, 0), qi(1)), ((0, 1), qi(-1))]);
    let one_x = LaurentPoly2::new([((0, 0), qi(1)), ((-1, 0), qi(1))]);
    let one_y = LaurentPoly2::new([((0, 0), qi(1)), ((0, -1), qi(1))]);
    x_minus_y.mul(&one_x).mul(&one_y)
}

/// Quotient of polynomials in `z`, kept unreduced.
#[derive(Clone, Debug)]
pub struct RatFunc {
    num: QPoly,
    den: QPoly,
}

impl RatFunc {
    pub fn new(num: QPoly, den: QPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Precondition("zero denominator".into()));
        }
        Ok(RatFunc { num, den })
    }

    pub fn constant(c: Q) -> Self {
        RatFunc { num: QPoly::constant(c), den: QPoly::one() }
    }

    pub fn add(&self, o: &Self) -> Self {
        RatFunc { num: &(&self.num * &o.den) + &(&o.num * &self.den), den: &self.den * &o.den }
    }

    pub fn mul(&self, o: &Self) -> Self {
        RatFunc { num: &self.num * &o.num, den: &self.den * &o.den }
    }

    pub fn scale(&self, c: &Q) -> Self {
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn powi(&self, e: i64) -> Result<Self> {
        let (n, d) = if e < 0 { (&self.den, &self.num) } else { (&self.num, &self.den) };
        Self::new(n.pow(e.unsigned_abs() as usize), d.pow(e.unsigned_abs() as usize))
    }

    pub fn equals(&self, o: &Self) -> bool {
        (&(&self.num * &o.den) - &(&o.num * &self.den)).is_zero()
    }
}

/// Constant terms of `phi^n` for `n = 0..=n_max`.
pub fn laurent_const_terms(f: &LaurentPoly2, n_max: usize) -> Vec<Q> {
    map_range(Exec::default(), 0, n_max + 1, |n| f.const_term_of_power(n))
}

/// `(3m)! / m!^3 (-1)^m`, the closed form of the even coefficients of the
/// vanishing period.
pub fn vanishing_period_coefficient(m: u64) -> Q {
    let c = factorial(3 * m) / factorial(m).pow(3);
    let c = Q::from_integer(c);
    if m % 2 == 1 {
        -c
    } else {
        c
    }
}

/// `sum_{n < order} [phi^n]_0 z^n`, cross-checked against the closed form.
pub fn vanishing_period(order: usize) -> Result<RatSeries> {
    if order == 0 {
        return Ok(RatSeries::power(Vec::new()));
    }
    let c = laurent_const_terms(&phi(), order - 1);
    for (n, x) in c.iter().enumerate() {
        let expect = if n % 2 == 0 { vanishing_period_coefficient(n as u64 / 2) } else { Q::zero() };
        if *x != expect {
            return Err(Error::Inconsistent(format!("constant term of phi^{n} disagrees with the closed form")));
        }
    }
    Ok(RatSeries::power(c))
}

/// The `y^0` coefficient of `phi^k` as a Laurent polynomial in `x`.
pub fn y_const_integrand(k: usize) -> BTreeMap<i64, Q> {
    phi().y_const_of_power(k)
}

/// Power series with a rational part and a part multiplying `pi i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedSeries {
    pub rational: RatSeries,
    pub pi_i: RatSeries,
}

/// A rational series times the formal unit `pi i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedSeries {
    pub unit: String,
    pub series: RatSeries,
}

impl TaggedSeries {
    pub fn pi_i(series: RatSeries) -> Self {
        TaggedSeries { unit: "pi_i".into(), series }
    }
}

/// Powers of `X = (1+z)/(1-z)` and `log X`, truncated to `order` terms.
struct Endpoint {
    x: RatSeries,
    x_inv: RatSeries,
    log_x: RatSeries,
}

impl Endpoint {
    fn new(order: usize) -> Self {
        let one_plus = RatSeries::power((0..order).map(|n| if n < 2 { qi(1) } else { qi(0) }).collect());
        let one_minus = RatSeries::power((0..order).map(|n| [qi(1), qi(-1)].get(n).cloned().unwrap_or_else(Q::zero)).collect());
        let x = one_plus.mul(&one_minus.inverse().expect("unit"));
        let x_inv = one_minus.mul(&one_plus.inverse().expect("unit"));
        // log X = 2 (z + z^3/3 + z^5/5 + ...)
        let log_x = RatSeries::power((0..order).map(|n| if n % 2 == 1 { q(2, n as i64) } else { qi(0) }).collect());
        Endpoint { x, x_inv, log_x }
    }

    fn power(&self, i: i64) -> RatSeries {
        let base = if i < 0 { &self.x_inv } else { &self.x };
        base.powi(i.abs()).expect("nonnegative power")
    }
}

/// `2 sum_k z^k int_{-1}^{(1+z)/(1-z)} [phi^k]_{y-const} dx/x`, with
/// `log(-1) = pi i` (the path avoids the negative imaginary axis). The
/// reduced series drops the `pi i` part.
pub fn aj_expansion(order: usize) -> Result<(MixedSeries, RatSeries)> {
    let ep = Endpoint::new(order);
    let f = phi();
    let parts = map_range(Exec::default(), 0, order, |k| {
        let mut rat = vec![Q::zero(); order];
        let mut pii = vec![Q::zero(); order];
        for (i, c) in f.y_const_of_power(k) {
            let c2 = c * qi(2);
            if i == 0 {
                // log X - log(-1)
                for (n, x) in ep.log_x.coeffs().iter().enumerate().take(order - k) {
                    rat[n + k] += &c2 * x;
                }
                pii[k] -= &c2;
            } else {
                // (X^i - (-1)^i) / i
                let sign = if i % 2 == 0 { qi(1) } else { qi(-1) };
                let inv_i = Q::new(BigInt::one(), BigInt::from(i));
                let xi = ep.power(i);
                for (n, x) in xi.coeffs().iter().enumerate().take(order - k) {
                    let v = if n == 0 { x - &sign } else { x.clone() };
                    rat[n + k] += &c2 * &inv_i * v;
                }
            }
        }
        (rat, pii)
    });
    let mut rat = vec![Q::zero(); order];
    let mut pii = vec![Q::zero(); order];
    for (r, p) in parts {
        for n in 0..order {
            rat[n] += &r[n];
            pii[n] += &p[n];
        }
    }
    let reduced = RatSeries::power(rat);
    Ok((MixedSeries { rational: reduced.clone(), pi_i: RatSeries::power(pii) }, reduced))
}

/// `12 (-1)^n (6n+1)! n!^3 / ((3n)! (2n)! (2n+1)!^2)`.
pub fn quasiperiod_closed_form_coefficient(n: u64) -> Q {
    let num = BigInt::from(12) * factorial(6 * n + 1) * factorial(n).pow(3);
    let den = factorial(3 * n) * factorial(2 * n) * factorial(2 * n + 1).pow(2);
    let c = Q::new(num, den);
    if n % 2 == 1 {
        -c
    } else {
        c
    }
}

/// Odd series with the closed-form coefficients at `z^(2n+1)`.
pub fn quasiperiod_closed_form(order: usize) -> RatSeries {
    RatSeries::power(
        (0..order)
            .map(|e| if e % 2 == 1 { quasiperiod_closed_form_coefficient(e as u64 / 2) } else { Q::zero() })
            .collect(),
    )
}

/// The hypergeometric datum `(1/3, 2/3; 1, 1)` in the coordinate
/// `Z = -27 z^2`.
pub fn hg_datum() -> HGDatum {
    HGDatum::new(&[q(1, 3), q(2, 3)], &[qi(1), qi(1)]).expect("valid datum")
}

/// Picard-Fuchs operator pulled back along `Z = -27 z^2`, so
/// `1/4 (D^2 + 27 z^2 (D + 2/3)(D + 4/3))`.
pub fn pf_operator_z() -> DiffOp {
    pullback_powermap(&pf_operator(&hg_datum()), &qi(-27), 2).expect("valid pullback")
}

/// Outcome of applying the Picard-Fuchs operator to the quasi-period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inhomogeneity {
    #[serde(with = "serde_q")]
    pub k: Q,
    /// Degree of the monomial `k z^degree`.
    pub degree: u32,
    /// Coefficients checked to vanish beyond that monomial.
    pub checked_order: usize,
}

/// Apply the operator to the closed form and require the result to be
/// `k z` on every known coefficient, with `z | g` and `deg g <= 1`.
pub fn verify_inhomogeneity(order: usize) -> Result<Inhomogeneity> {
    if order < 3 {
        return Err(Error::Precondition("need at least 3 coefficients".into()));
    }
    let v = quasiperiod_closed_form(order);
    let g = pf_operator_z().apply_with(&v, Exec::default())?;
    let mut found: Option<(u32, Q)> = None;
    for (n, c) in g.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = g.offset() + Q::from_integer(BigInt::from(n));
        if found.is_some() || e != Q::one() {
            return Err(Error::Inconsistent(format!(
                "nonzero coefficient at z^{}; the inhomogeneity must be k z",
                crate::numerics::fmt_q(&e)
            )));
        }
        found = Some((1, c.clone()));
    }
    let (degree, k) = found.ok_or_else(|| Error::Inconsistent("inhomogeneity vanishes".into()))?;
    Ok(Inhomogeneity { k, degree, checked_order: order })
}

/// A monomial `c i^a sqrt(3)^b`.
#[derive(Clone, Debug)]
struct Radical {
    c: Q,
    i_pow: u32,
    sqrt3_pow: i32,
}

impl Radical {
    fn mul(&self, o: &Self) -> Self {
        Radical { c: &self.c * &o.c, i_pow: (self.i_pow + o.i_pow) % 4, sqrt3_pow: self.sqrt3_pow + o.sqrt3_pow }
    }

    /// The value as a rational, if it is one.
    fn to_rational(&self) -> Option<Q> {
        if self.sqrt3_pow % 2 != 0 || self.i_pow % 2 != 0 {
            return None;
        }
        let mut c = self.c.clone();
        if self.i_pow == 2 {
            c = -c;
        }
        let three = Q::from_integer(BigInt::from(3));
        let p = self.sqrt3_pow / 2;
        for _ in 0..p.abs() {
            c = if p > 0 { c * &three } else { c / &three };
        }
        Some(c)
    }
}

/// Compare the closed form with `(i / sqrt 3) sum [5/6]_n [7/6]_n /
/// [1/2]_{n+1}^2 Z^(n + 1/2)` for `n <= n_max`, where `Z^(1/2) = -3 sqrt(3) i z`
/// (the branch for which `k z = i k / (3 sqrt 3) Z^(1/2)`).
pub fn frobenius_match(n_max: usize) -> Result<bool> {
    let prefactor = Radical { c: Q::one(), i_pow: 1, sqrt3_pow: -1 };
    let root = Radical { c: qi(-3), i_pow: 1, sqrt3_pow: 1 };
    let scale = prefactor.mul(&root).to_rational().ok_or_else(|| Error::Inconsistent("prefactor is not rational".into()))?;
    for n in 0..=n_max {
        let c = pochhammer(&q(5, 6), n) * pochhammer(&q(7, 6), n) / pochhammer(&q(1, 2), n + 1).pow(2);
        let lhs = &scale * c * Q::from_integer(BigInt::from(-27).pow(n as u32));
        if lhs != quasiperiod_closed_form_coefficient(n as u64) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(-1)^m (3m)! / ((2m+1) m!^3)` at `z^(2m+1)`, times `pi i`.
pub fn extension_period(order: usize) -> TaggedSeries {
    TaggedSeries::pi_i(RatSeries::power(
        (0..order)
            .map(|e| {
                if e % 2 == 1 {
                    vanishing_period_coefficient(e as u64 / 2) / Q::from_integer(BigInt::from(e))
                } else {
                    Q::zero()
                }
            })
            .collect(),
    ))
}

/// `pi i * integral Pi dz`, the same series obtained termwise.
pub fn extension_period_from_period(order: usize) -> Result<TaggedSeries> {
    let pi = vanishing_period(order.saturating_sub(1))?;
    Ok(TaggedSeries::pi_i(integrate_termwise(&pi, Measure::Dz)?))
}

/// `phi((1+z)/(1-z), 2z/(1-z)) = 1/z` as rational functions.
pub fn section_on_fibre() -> Result<bool> {
    let x = RatFunc::new(QPoly::from_ints(&[1, 1]), QPoly::from_ints(&[1, -1]))?;
    let y = RatFunc::new(QPoly::from_ints(&[0, 2]), QPoly::from_ints(&[1, -1]))?;
    let lhs = phi().substitute(&x, &y)?;
    Ok(lhs.equals(&RatFunc::new(QPoly::one(), QPoly::x())?))
}

/// All computed invariants of the family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllFamReport {
    #[serde(with = "serde_q::vec")]
    pub const_terms: Vec<Q>,
    pub pf_op: DiffOp,
    pub aj_series: RatSeries,
    pub inhomogeneity: Inhomogeneity,
    pub extension_period: TaggedSeries,
    #[serde(rename = "Q0_constant", with = "serde_q")]
    pub q0_constant: Q,
}

/// Run the whole pipeline to `order` coefficients and fail on any
/// disagreement between independent computations.
pub fn ellfam_demo(order: usize) -> Result<EllFamReport> {
    if order < 3 {
        return Err(Error::Precondition("order must be at least 3".into()));
    }
    let pi = vanishing_period(order)?;
    let op = pf_operator_z();
    if !op.apply_with(&pi, Exec::default())?.is_zero() {
        return Err(Error::Inconsistent("the vanishing period is not annihilated".into()));
    }
    let (full, reduced) = aj_expansion(order)?;
    if reduced != quasiperiod_closed_form(order) {
        return Err(Error::Inconsistent("Abel-Jacobi expansion disagrees with the closed form".into()));
    }
    if full.pi_i != pi.scale(&qi(-2)) {
        return Err(Error::Inconsistent("pi i part is not a multiple of the period".into()));
    }
    let inh = verify_inhomogeneity(order)?;
    if !frobenius_match(order / 2)? {
        return Err(Error::Inconsistent("Frobenius series disagrees with the closed form".into()));
    }
    if !section_on_fibre()? {
        return Err(Error::Inconsistent("section does not lie on the fibre".into()));
    }
    let ext = extension_period(order);
    // D ~nu = (1/2) z omega with g = k z forces Q0 k = 1/2.
    let q0 = Q::new(BigInt::one(), BigInt::from(2)) / &inh.k;
    Ok(EllFamReport {
        const_terms: pi.coeffs().to_vec(),
        pf_op: op,
        aj_series: reduced,
        inhomogeneity: inh,
        extension_period: ext,
        q0_constant: q0,
    })
}
