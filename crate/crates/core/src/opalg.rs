//! The operator ring generated by `z`, `z^-1` and `D = z d/dz`.
//!
//! Elements are kept in the normal form `sum_k z^k q_k(D)` with the powers
//! of `z` on the left. The only commutation rule needed is
//! `q(D) z^k = z^k q(D + k)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hgdef::HGDatum;
use crate::numerics::parse::Cursor;
use crate::numerics::{QPoly, Q};
use crate::par::{map_slice, Exec};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DiffOp {
    terms: BTreeMap<i64, QPoly>,
}

/// Anything the operator ring can act on: truncated series in `z`, their
/// jet-valued and logarithmic variants.
pub trait Operand: Sized + Clone + Send + Sync {
    /// Multiply by `z^k`.
    fn shift(&self, k: i64) -> Result<Self>;
    /// Apply the polynomial `p(D)`.
    fn apply_dpoly(&self, p: &QPoly) -> Self;
    /// Sum, truncated to the range where both operands are known.
    fn add(&self, other: &Self) -> Result<Self>;
}

impl DiffOp {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, QPoly::one())
    }

    /// The derivation `D = z d/dz`.
    pub fn d() -> Self {
        Self::monomial(0, QPoly::x())
    }

    pub fn z_pow(k: i64) -> Self {
        Self::monomial(k, QPoly::one())
    }

    pub fn scalar(c: Q) -> Self {
        Self::monomial(0, QPoly::constant(c))
    }

    /// `z^k q(D)`.
    pub fn monomial(k: i64, q: QPoly) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(k, q);
        }
        DiffOp { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (i64, QPoly)>) -> Self {
        let mut out = Self::zero();
        for (k, q) in it {
            out.add_term(k, &q);
        }
        out
    }

    fn add_term(&mut self, k: i64, q: &QPoly) {
        let sum = match self.terms.get(&k) {
            Some(p) => p + q,
            None => q.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&k);
        } else {
            self.terms.insert(k, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &QPoly)> {
        self.terms.iter().map(|(k, q)| (*k, q))
    }

    pub fn coefficient(&self, k: i64) -> QPoly {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest and largest power of `z` present.
    pub fn z_support(&self) -> Option<(i64, i64)> {
        Some((*self.terms.keys().next()?, *self.terms.keys().next_back()?))
    }

    /// Degree in `D`.
    pub fn order(&self) -> usize {
        self.terms.values().filter_map(QPoly::degree).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::from_terms(self.terms().map(|(k, q)| (k, q.scale(c))))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, q) in other.terms() {
            out.add_term(k, q);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn compose(&self, other: &Self) -> Self {
        op_multiply(self, other)
    }

    /// Apply to an operand; the per-term actions run under `exec`.
    pub fn apply_with<S: Operand>(&self, s: &S, exec: Exec) -> Result<S> {
        let terms: Vec<(i64, &QPoly)> = self.terms().collect();
        if terms.is_empty() {
            return Err(Error::Precondition("cannot apply the zero operator".into()));
        }
        let parts = map_slice(exec, &terms, |(k, q)| s.apply_dpoly(q).shift(*k));
        let mut it = parts.into_iter();
        let mut acc = it.next().expect("nonempty")?;
        for p in it {
            acc = acc.add(&p?)?;
        }
        Ok(acc)
    }
}

/// Normal form of `a b`.
pub fn op_multiply(a: &DiffOp, b: &DiffOp) -> DiffOp {
    let mut out = DiffOp::zero();
    for (k, p) in a.terms() {
        for (l, q) in b.terms() {
            let shifted = p.taylor_shift(&Q::from_integer(BigInt::from(l)));
            out.add_term(k + l, &(&shifted * q));
        }
    }
    out
}

/// `L = prod_j (D + b_j - 1) - z prod_j (D + a_j)` for arbitrary rational
/// parameter lists of equal length.
pub fn pf_operator_raw(a: &[Q], b: &[Q]) -> DiffOp {
    let one = Q::one();
    let bm: Vec<Q> = b.iter().map(|x| x - &one).collect();
    DiffOp::from_terms([(0, QPoly::prod_linear(&bm)), (1, -&QPoly::prod_linear(a))])
}

/// Picard-Fuchs operator of a hypergeometric datum.
pub fn pf_operator(datum: &HGDatum) -> DiffOp {
    pf_operator_raw(datum.a(), datum.b())
}

/// The operator `prod (D + a_j) - w (D + 1)^r` in the coordinate `w = 1/z`,
/// defined when every `b_j` is 1.
pub fn hat_operator(datum: &HGDatum) -> Result<DiffOp> {
    if !datum.is_mum() {
        return Err(Error::Precondition("hat operator needs b = (1, ..., 1)".into()));
    }
    let one = Q::one();
    let b_hat: Vec<Q> = datum.a().iter().map(|x| x + &one).collect();
    let a_hat = vec![one; datum.rank()];
    Ok(pf_operator_raw(&a_hat, &b_hat))
}

/// Substitute `z -> c z^k`, so that `D -> D / k`.
pub fn pullback_powermap(op: &DiffOp, c: &Q, k: i64) -> Result<DiffOp> {
    if k <= 0 {
        return Err(Error::Precondition(format!("power map exponent must be positive, got {k}")));
    }
    if c.is_zero() {
        return Err(Error::Precondition("power map scale must be nonzero".into()));
    }
    if k != 1 && op.z_support().is_some_and(|(lo, _)| lo < 0) {
        return Err(Error::Precondition("negative powers of z only pull back along k = 1".into()));
    }
    let inv_k = Q::new(BigInt::one(), BigInt::from(k));
    Ok(DiffOp::from_terms(op.terms().map(|(m, q)| {
        let cm = if m >= 0 { c.pow(m as i32) } else { c.recip().pow((-m) as i32) };
        (k * m, q.scale_var(&inv_k).scale(&cm))
    })))
}

/// Rewrite in the coordinate `w = 1/z`, where `D_z = -D_w`.
pub fn to_inverse_coordinate(op: &DiffOp) -> DiffOp {
    DiffOp::from_terms(op.terms().map(|(m, q)| (-m, q.negate_var())))
}

/// Scale so all coefficients are coprime integers and the top `D`
/// coefficient of the lowest `z` power is positive. Returns the factor used.
pub fn content_normalize(op: &DiffOp) -> (Q, DiffOp) {
    let Some((lo, _)) = op.z_support() else {
        return (Q::one(), op.clone());
    };
    let all: Vec<&Q> = op.terms.values().flat_map(|q| q.coeffs()).collect();
    let l = all.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let g = all.iter().fold(BigInt::zero(), |acc, x| acc.gcd(&(x.numer() * (&l / x.denom()))));
    let mut f = Q::new(l, g);
    if op.terms[&lo].leading().is_negative() {
        f = -f;
    }
    (f.clone(), op.scale(&f))
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms().map(|(k, q)| format!("z^{k} * ({})", q.render("D"))).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl FromStr for DiffOp {
    type Err = Error;

    /// Accepts `z^k * (poly in D)` terms joined by `+` or `-`; `z *` stands
    /// for `z^1 *` and a bare parenthesised polynomial for `z^0`.
    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s, 0);
        if cur.eat('0') && cur.at_end() {
            return Ok(DiffOp::zero());
        }
        let mut cur = Cursor::new(s, 0);
        let mut out = DiffOp::zero();
        let mut first = true;
        loop {
            if cur.at_end() {
                if first {
                    return cur.err("empty operator");
                }
                break;
            }
            let mut sign = Q::one();
            if !first && !cur.eat('+') {
                if cur.peek() != Some('-') {
                    return cur.err("expected '+' or '-' between terms");
                }
            }
            if cur.eat('-') {
                sign = -sign;
            }
            let mut k = 0;
            if cur.eat('z') {
                k = if cur.eat('^') { cur.small_integer()? } else { 1 };
                cur.expect('*')?;
            }
            cur.expect('(')?;
            let q = cur.poly('D')?;
            cur.expect(')')?;
            out.add_term(k, &q.scale(&sign));
            first = false;
        }
        Ok(out)
    }
}

impl Serialize for DiffOp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DiffOp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{q, qi};

    fn p(cs: &[i64]) -> QPoly {
        QPoly::from_ints(cs)
    }

    #[test]
    fn commutation_rule() {
        let dz = op_multiply(&DiffOp::d(), &DiffOp::z_pow(1));
        assert_eq!(dz, DiffOp::monomial(1, p(&[1, 1])));
        let zd = op_multiply(&DiffOp::z_pow(1), &DiffOp::d());
        assert_eq!(zd, DiffOp::monomial(1, p(&[0, 1])));
    }

    #[test]
    fn shifted_product() {
        // (D-1)(D-2) z^2 = z^2 (D+1) D
        let a = DiffOp::monomial(0, p(&[2, -3, 1]));
        let r = op_multiply(&a, &DiffOp::z_pow(2));
        assert_eq!(r, DiffOp::monomial(2, p(&[0, 1, 1])));
    }

    #[test]
    fn pullback_of_cubic_family() {
        let op: DiffOp = "z^0 * (D^2) + z^1 * (-1*D^2 - D - 2/9)".parse().unwrap();
        let pb = pullback_powermap(&op, &qi(-27), 2).unwrap();
        let expect = DiffOp::from_terms([
            (0, QPoly::new(vec![qi(0), qi(0), q(1, 4)])),
            (2, QPoly::prod_linear(&[q(2, 3), q(4, 3)]).scale(&q(27, 4))),
        ]);
        assert_eq!(pb, expect);
        let d = pullback_powermap(&DiffOp::d(), &qi(-27), 2).unwrap();
        assert_eq!(d, DiffOp::scalar(q(1, 2)).compose(&DiffOp::d()));
        assert_eq!(pullback_powermap(&op, &qi(1), 1).unwrap(), op);
        assert!(pullback_powermap(&op, &qi(1), 0).is_err());
        assert!(pullback_powermap(&DiffOp::z_pow(-1), &qi(1), 2).is_err());
    }

    #[test]
    fn text_round_trip() {
        let op = DiffOp::from_terms([(-1, p(&[3, 0, -2])), (0, QPoly::new(vec![q(1, 3)])), (4, p(&[0, 1]))]);
        let text = op.to_string();
        assert_eq!(text, "z^-1 * (-2*D^2 + 3) + z^0 * (1/3) + z^4 * (1*D)");
        assert_eq!(text.parse::<DiffOp>().unwrap(), op);
        let spaced: DiffOp = " ( D ^ 2 ) - z * ( D + 1 / 2 ) ".parse().unwrap();
        assert_eq!(spaced, DiffOp::from_terms([(0, p(&[0, 0, 1])), (1, QPoly::new(vec![q(-1, 2), qi(-1)]))]));
        assert!("z^2 (D)".parse::<DiffOp>().is_err());
    }

    #[test]
    fn content_normalization() {
        let op = DiffOp::from_terms([(0, QPoly::new(vec![q(0, 1), q(0, 1), q(-1, 4)])), (2, QPoly::new(vec![q(-6, 1)]))]);
        let (f, n) = content_normalize(&op);
        assert_eq!(f, qi(-4));
        assert_eq!(n, DiffOp::from_terms([(0, p(&[0, 0, 1])), (2, p(&[24]))]));
    }

    #[test]
    fn inverse_coordinate_is_an_involution() {
        let op: DiffOp = "z^0 * (D^2 + 1) + z^1 * (D - 3)".parse().unwrap();
        assert_eq!(to_inverse_coordinate(&to_inverse_coordinate(&op)), op);
    }
}
