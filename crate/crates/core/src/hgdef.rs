//! Hypergeometric data `(a, b)` and their classification.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::rational::{denom_lcm, frac_01, serde_q};
use crate::numerics::{fmt_q, parse_q, QPoly, Q};

/// Two equal-length multisets of rationals in `(0, 1]`, disjoint, with
/// `1` among the `b`. Both lists are stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDatum", into = "RawDatum")]
pub struct HGDatum {
    a: Vec<Q>,
    b: Vec<Q>,
}

#[derive(Serialize, Deserialize)]
struct RawDatum {
    #[serde(with = "serde_q::vec")]
    a: Vec<Q>,
    #[serde(with = "serde_q::vec")]
    b: Vec<Q>,
}

impl TryFrom<RawDatum> for HGDatum {
    type Error = Error;
    fn try_from(r: RawDatum) -> Result<Self> {
        validate(&r.a, &r.b)
    }
}

impl From<HGDatum> for RawDatum {
    fn from(d: HGDatum) -> Self {
        RawDatum { a: d.a, b: d.b }
    }
}

/// Check the datum constraints and build the datum.
pub fn validate(a: &[Q], b: &[Q]) -> Result<HGDatum> {
    let bad = |m: String| Err(Error::InvalidDatum(m));
    if a.is_empty() {
        return bad("empty parameter lists".into());
    }
    if a.len() != b.len() {
        return bad(format!("size mismatch: {} a-values, {} b-values", a.len(), b.len()));
    }
    let one = Q::one();
    for x in a.iter().chain(b) {
        if !x.is_positive() || x > &one {
            return bad(format!("entry {} is outside (0, 1]", fmt_q(x)));
        }
    }
    if !b.contains(&one) {
        return bad("b must contain 1".into());
    }
    if let Some(x) = a.iter().find(|x| b.contains(x)) {
        return bad(format!("a and b overlap at {}", fmt_q(x)));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    Ok(HGDatum { a, b })
}

impl HGDatum {
    pub fn new(a: &[Q], b: &[Q]) -> Result<Self> {
        validate(a, b)
    }

    /// Datum with all `b_j = 1`.
    pub fn mum(a: &[Q]) -> Result<Self> {
        validate(a, &vec![Q::one(); a.len()])
    }

    pub fn a(&self) -> &[Q] {
        &self.a
    }

    pub fn b(&self) -> &[Q] {
        &self.b
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    /// All `b_j` equal to 1 (maximal unipotent monodromy at the origin).
    pub fn is_mum(&self) -> bool {
        self.b.iter().all(One::is_one)
    }

    /// Common denominator of all parameters.
    pub fn denominator(&self) -> BigInt {
        denom_lcm(self.a.iter().chain(&self.b))
    }

    /// `(<k a>, <k b>)` with `<x>` taken in `(0, 1]`.
    pub fn scaled(&self, k: &BigInt) -> HGDatum {
        let kq = Q::from_integer(k.clone());
        let mut a: Vec<Q> = self.a.iter().map(|x| frac_01(&(x * &kq))).collect();
        let mut b: Vec<Q> = self.b.iter().map(|x| frac_01(&(x * &kq))).collect();
        a.sort();
        b.sort();
        HGDatum { a, b }
    }
}

fn join(xs: &[Q]) -> String {
    xs.iter().map(fmt_q).collect::<Vec<_>>().join(",")
}

impl fmt::Display for HGDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={};b={}", join(&self.a), join(&self.b))
    }
}

impl FromStr for HGDatum {
    type Err = Error;

    /// Parses `"a=1/2,1/2;b=1,1"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut a = None;
        let mut b = None;
        let mut pos = 0;
        for part in s.split(';') {
            let (key, vals) = part.split_once('=').ok_or_else(|| Error::Parse {
                pos,
                msg: "expected 'a=...' or 'b=...'".into(),
            })?;
            let mut list = Vec::new();
            let mut vpos = pos + key.len() + 1;
            for v in vals.split(',') {
                list.push(parse_q(v).map_err(|e| match e {
                    Error::Parse { msg, .. } => Error::Parse { pos: vpos, msg },
                    e => e,
                })?);
                vpos += v.len() + 1;
            }
            match key.trim() {
                "a" => a = Some(list),
                "b" => b = Some(list),
                other => return Err(Error::Parse { pos, msg: format!("unknown key {other:?}") }),
            }
            pos += part.len() + 1;
        }
        match (a, b) {
            (Some(a), Some(b)) => validate(&a, &b),
            _ => Err(Error::Parse { pos: s.len(), msg: "both 'a' and 'b' are required".into() }),
        }
    }
}

/// True iff the `a` and `b` values strictly alternate around the circle.
pub fn interlace_test(d: &HGDatum) -> bool {
    let mut all: Vec<(&Q, bool)> = d.a.iter().map(|x| (x, true)).chain(d.b.iter().map(|x| (x, false))).collect();
    all.sort();
    all.windows(2).all(|w| w[0].1 != w[1].1)
}

/// Weight and Hodge vector from the zigzag levels.
///
/// The `k`-th copy (counting from 0) of an `a`-value `v` sits at level
/// `#{a_j < v} + k - #{b_j < v}`; levels are shifted so the minimum is 0.
pub fn hodge_numbers(d: &HGDatum) -> (usize, Vec<usize>) {
    let mut levels = Vec::with_capacity(d.rank());
    let mut i = 0;
    while i < d.a.len() {
        let v = &d.a[i];
        let below_b = d.b.iter().filter(|x| *x < v).count() as i64;
        // the k-th copy has exactly i = #{a_j < v} + k entries before it
        while i < d.a.len() && &d.a[i] == v {
            levels.push(i as i64 - below_b);
            i += 1;
        }
    }
    let lo = *levels.iter().min().expect("nonempty");
    let hi = *levels.iter().max().expect("nonempty");
    let mut h = vec![0; (hi - lo) as usize + 1];
    for l in levels {
        h[(l - lo) as usize] += 1;
    }
    ((hi - lo) as usize, h)
}

/// The Galois-conjugate data, input first, duplicates removed.
pub fn conjugates(d: &HGDatum) -> Vec<HGDatum> {
    let m = d.denominator();
    let mut out: Vec<HGDatum> = Vec::new();
    let mut k = BigInt::one();
    while k <= m {
        if k.gcd(&m).is_one() {
            let c = d.scaled(&k);
            if !out.contains(&c) {
                out.push(c);
            }
        }
        k += 1;
    }
    out
}

/// `(balanced, number of conjugates)`.
pub fn is_balanced(d: &HGDatum) -> (bool, usize) {
    let s = conjugates(d).len();
    (s == 1, s)
}

/// Every conjugate is totally interlaced.
pub fn finite_monodromy(d: &HGDatum) -> bool {
    conjugates(d).iter().all(interlace_test)
}

/// Signed exponents with `Q_inf / Q_0 = prod_{g<0} (x^-g - 1) / prod_{g>0} (x^g - 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaVector {
    /// Negative entries first (ascending), then positive ones (ascending).
    pub gamma: Vec<i64>,
    pub a: usize,
    pub b: usize,
}

fn moebius(mut n: u64) -> i64 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

fn euler_phi(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

/// Multiplicity of each cyclotomic factor `Phi_d` in `prod (x - e^{2 pi i v})`.
fn cyclotomic_multiplicities(vals: &[Q]) -> Result<BTreeMap<u64, i64>> {
    let mut by_d: BTreeMap<u64, BTreeMap<Q, i64>> = BTreeMap::new();
    for v in vals {
        let f = frac_01(v);
        let d = f.denom().to_u64().ok_or_else(|| Error::Precondition("denominator too large".into()))?;
        *by_d.entry(d).or_default().entry(f).or_default() += 1;
    }
    let mut out = BTreeMap::new();
    for (d, counts) in by_d {
        let phi = euler_phi(d) as usize;
        let first = *counts.values().next().expect("nonempty");
        if counts.len() != phi || counts.values().any(|&c| c != first) {
            return Err(Error::Uncertifiable(format!(
                "roots of unity of order {d} do not form whole Galois orbits"
            )));
        }
        out.insert(d, first);
    }
    Ok(out)
}

/// `x^k - 1`.
fn xk_minus_one(k: u64) -> QPoly {
    let mut c = vec![Q::zero(); k as usize + 1];
    c[0] = -Q::one();
    c[k as usize] = Q::one();
    QPoly::new(c)
}

/// The `d`-th cyclotomic polynomial.
pub fn cyclotomic(d: u64) -> QPoly {
    let mut p = xk_minus_one(d);
    for k in 1..d {
        if d % k == 0 {
            p = p.div_rem(&cyclotomic(k)).0;
        }
    }
    p
}

/// `prod_j (x - e^{2 pi i v_j})` for values forming whole Galois orbits.
pub fn characteristic_poly(vals: &[Q]) -> Result<QPoly> {
    let mult = cyclotomic_multiplicities(vals)?;
    Ok(mult.iter().fold(QPoly::one(), |acc, (&d, &e)| &acc * &cyclotomic(d).pow(e as usize)))
}

/// Gamma vector by Moebius inversion of the cyclotomic exponents, re-checked
/// as a polynomial identity.
pub fn gamma_vector(d: &HGDatum) -> Result<GammaVector> {
    let alpha = cyclotomic_multiplicities(&d.a)?;
    let beta = cyclotomic_multiplicities(&d.b)?;
    let mut e: BTreeMap<u64, i64> = BTreeMap::new();
    for (k, v) in &alpha {
        *e.entry(*k).or_default() += v;
    }
    for (k, v) in &beta {
        *e.entry(*k).or_default() -= v;
    }
    let top = e.keys().copied().max().unwrap_or(1);
    let mut neg = Vec::new();
    let mut pos = Vec::new();
    for k in 1..=top {
        let c: i64 = e.iter().filter(|(dd, _)| *dd % k == 0).map(|(dd, ed)| ed * moebius(dd / k)).sum();
        match c.signum() {
            1 => neg.extend(std::iter::repeat(-(k as i64)).take(c as usize)),
            -1 => pos.extend(std::iter::repeat(k as i64).take((-c) as usize)),
            _ => {}
        }
    }
    neg.sort();
    let g = GammaVector { a: neg.len(), b: pos.len(), gamma: neg.into_iter().chain(pos).collect() };
    if !gamma_identity_holds(d, &g)? {
        return Err(Error::Inconsistent("gamma vector does not re-expand to Q_inf / Q_0".into()));
    }
    Ok(g)
}

/// `Q_inf * prod_{g>0}(x^g - 1) == Q_0 * prod_{g<0}(x^-g - 1)`.
pub fn gamma_identity_holds(d: &HGDatum, g: &GammaVector) -> Result<bool> {
    let q_inf = characteristic_poly(&d.a)?;
    let q_0 = characteristic_poly(&d.b)?;
    let mut lhs = q_inf;
    let mut rhs = q_0;
    for &x in &g.gamma {
        let f = xk_minus_one(x.unsigned_abs());
        if x > 0 {
            lhs = &lhs * &f;
        } else {
            rhs = &rhs * &f;
        }
    }
    Ok(lhs == rhs)
}

/// Sufficient criterion for motivicity: `a = 1` or `a + b` odd.
pub fn motivic_certified(d: &HGDatum) -> bool {
    gamma_vector(d).is_ok_and(|g| g.a == 1 || (g.a + g.b) % 2 == 1)
}

/// Convert `prod (t_i n)! / prod (u_j n)!` to a datum and scale `c`, so that
/// the ratio equals the hypergeometric coefficient times `c^n`.
pub fn factorial_to_hg(tops: &[u64], bottoms: &[u64]) -> Result<(HGDatum, Q)> {
    if tops.iter().chain(bottoms).any(|&x| x == 0) {
        return Err(Error::Precondition("factorial arguments must be positive".into()));
    }
    if tops.iter().sum::<u64>() != bottoms.iter().sum::<u64>() {
        return Err(Error::Precondition("factorial ratio is not balanced".into()));
    }
    let expand = |xs: &[u64]| -> BTreeMap<Q, i64> {
        let mut m = BTreeMap::new();
        for &k in xs {
            for j in 1..=k {
                *m.entry(Q::new(BigInt::from(j), BigInt::from(k))).or_insert(0) += 1;
            }
        }
        m
    };
    let mut top = expand(tops);
    let bot = expand(bottoms);
    let mut b = Vec::new();
    for (v, n) in bot {
        let t = top.entry(v.clone()).or_insert(0);
        let common = n.min(*t);
        *t -= common;
        b.extend(std::iter::repeat(v).take((n - common) as usize));
    }
    let a: Vec<Q> = top.into_iter().flat_map(|(v, n)| std::iter::repeat(v).take(n as usize)).collect();
    let pw = |xs: &[u64]| xs.iter().fold(BigInt::one(), |acc, &k| acc * BigInt::from(k).pow(k as u32));
    let c = Q::new(pw(tops), pw(bottoms));
    Ok((validate(&a, &b)?, c))
}

/// Everything the classifier reports about a datum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub datum: String,
    pub weight: usize,
    pub hodge: Vec<usize>,
    pub interlaced: bool,
    pub balanced: bool,
    pub conjugate_count: usize,
    pub gamma: Option<Vec<i64>>,
    pub motivic_certified: bool,
    pub finite_monodromy: bool,
    /// `"symplectic"` for odd weight, `"orthogonal"` for even weight.
    pub symmetry: String,
}

pub fn classify(d: &HGDatum) -> ClassificationReport {
    let (weight, hodge) = hodge_numbers(d);
    let (balanced, s) = is_balanced(d);
    let gamma = gamma_vector(d).ok();
    let motivic = gamma.as_ref().is_some_and(|g| g.a == 1 || (g.a + g.b) % 2 == 1);
    ClassificationReport {
        datum: d.to_string(),
        weight,
        hodge,
        interlaced: interlace_test(d),
        balanced,
        conjugate_count: s,
        gamma: gamma.map(|g| g.gamma),
        motivic_certified: motivic,
        finite_monodromy: finite_monodromy(d),
        symmetry: if weight % 2 == 1 { "symplectic" } else { "orthogonal" }.into(),
    }
}
