//! Zeta-value identities for quasi-period moment sums at special points.
//!
//! For a datum with `b = (1, ..., 1)` of odd rank `r = 2q + 1` and a point
//! `|z0| > 1`, the claim checked here is
//! `sum_{n >= 1} P(n) t_n(z0) = k zeta(q + 1)` with
//! `t_n = (n!)^r z0^-n / (n^r prod [a_j]_n)` and `deg P = q`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hgdef::HGDatum;
use crate::numerics::hpreal::GUARD_DIGITS;
use crate::numerics::rational::serde_q;
use crate::numerics::{fmt_q, integer_relation, zeta_int, HPReal, QPoly, Q};
use crate::par::Exec;
use crate::series::moment_sums_with;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CertWire", into = "CertWire")]
pub struct ZetaIdentityCertificate {
    pub datum: HGDatum,
    pub z0: Q,
    pub p: QPoly,
    pub k: Q,
    pub q: usize,
    pub digits: u32,
    pub residual: HPReal,
}

#[derive(Serialize, Deserialize)]
struct CertWire {
    #[serde(with = "serde_q::vec")]
    a: Vec<Q>,
    #[serde(with = "serde_q::vec")]
    b: Vec<Q>,
    #[serde(with = "serde_q")]
    z0: Q,
    #[serde(rename = "P", with = "serde_q::vec")]
    p: Vec<Q>,
    #[serde(with = "serde_q")]
    k: Q,
    q: usize,
    digits: u32,
    residual: HPReal,
}

impl TryFrom<CertWire> for ZetaIdentityCertificate {
    type Error = Error;
    fn try_from(w: CertWire) -> Result<Self> {
        Ok(ZetaIdentityCertificate {
            datum: HGDatum::new(&w.a, &w.b)?,
            z0: w.z0,
            p: QPoly::new(w.p),
            k: w.k,
            q: w.q,
            digits: w.digits,
            residual: w.residual,
        })
    }
}

impl From<ZetaIdentityCertificate> for CertWire {
    fn from(c: ZetaIdentityCertificate) -> Self {
        let p: Vec<Q> = (0..=c.q).map(|i| c.p.coeff(i)).collect();
        CertWire {
            a: c.datum.a().to_vec(),
            b: c.datum.b().to_vec(),
            z0: c.z0,
            p,
            k: c.k,
            q: c.q,
            digits: c.digits,
            residual: c.residual,
        }
    }
}

impl ZetaIdentityCertificate {
    /// e.g. `sum_{n>=1} (10*n^2 + -6*n + 1) t_n(-4) = -28 zeta(3)`.
    pub fn identity_string(&self) -> String {
        format!(
            "sum_{{n>=1}} ({}) t_n({}) = {} zeta({})   [{}]",
            self.p.render("n"),
            fmt_q(&self.z0),
            fmt_q(&self.k),
            self.q + 1,
            self.datum
        )
    }
}

/// Outcome of checking a proposed identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Verified { certificate: ZetaIdentityCertificate },
    Refuted { residual: HPReal, threshold_digits: u32 },
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified { .. })
    }

    pub fn residual(&self) -> &HPReal {
        match self {
            Verdict::Verified { certificate } => &certificate.residual,
            Verdict::Refuted { residual, .. } => residual,
        }
    }
}

/// `q` for an admissible datum and point.
fn check_setting(d: &HGDatum, z0: &Q) -> Result<usize> {
    if !d.is_mum() {
        return Err(Error::Precondition("zeta identities need b = (1, ..., 1)".into()));
    }
    if d.rank() % 2 == 0 {
        return Err(Error::Precondition(format!("rank {} is even; need r = 2q + 1", d.rank())));
    }
    if z0.abs() <= Q::one() {
        return Err(Error::Precondition(format!("|z0| must exceed 1, got {}", fmt_q(z0))));
    }
    Ok((d.rank() - 1) / 2)
}

/// `sum_j p_j S_j - k zeta(q + 1)`.
fn residual(moments: &[HPReal], zeta: &HPReal, p: &QPoly, k: &Q) -> HPReal {
    let digits = zeta.digits();
    let lhs = moments
        .iter()
        .enumerate()
        .fold(HPReal::zero(digits), |acc, (j, s)| &acc + &s.mul_q(&p.coeff(j)));
    &lhs - &zeta.mul_q(k)
}

/// Check `sum P(n) t_n(z0) = k zeta(q+1)` to `digits` working digits.
/// The identity is certified when the residual is provably below
/// `10^-(digits - 10)`.
pub fn verify_zeta_identity(d: &HGDatum, z0: &Q, p: &QPoly, k: &Q, digits: u32) -> Result<Verdict> {
    verify_with(d, z0, p, k, digits, &mut |_, _| true)
}

pub fn verify_with(
    d: &HGDatum,
    z0: &Q,
    p: &QPoly,
    k: &Q,
    digits: u32,
    progress: &mut dyn FnMut(usize, f64) -> bool,
) -> Result<Verdict> {
    let q = check_setting(d, z0)?;
    if p.degree() != Some(q) {
        return Err(Error::Precondition(format!("P must have degree q = {q}")));
    }
    if digits <= GUARD_DIGITS {
        return Err(Error::Precondition(format!("need more than {GUARD_DIGITS} working digits")));
    }
    let moments = moment_sums_with(d, z0, q, digits, Exec::default(), progress)?;
    let zeta = zeta_int(q as u32 + 1, digits)?;
    let r = residual(&moments, &zeta, p, k);
    let threshold = digits - GUARD_DIGITS;
    if r.below_pow10(threshold as i64) {
        Ok(Verdict::Verified {
            certificate: ZetaIdentityCertificate {
                datum: d.clone(),
                z0: z0.clone(),
                p: p.clone(),
                k: k.clone(),
                q,
                digits: threshold,
                residual: r,
            },
        })
    } else {
        Ok(Verdict::Refuted { residual: r, threshold_digits: threshold })
    }
}

/// Search for `(P, k)` with integer coefficients bounded by `height`.
///
/// The relation is sought at `digits` (inputs computed to `2 digits`); a
/// candidate is normalized to coprime integers with positive leading
/// coefficient and must then verify at `2 digits`.
pub fn discover_identity(d: &HGDatum, z0: &Q, digits: u32, height: &BigInt) -> Result<Option<ZetaIdentityCertificate>> {
    discover_with(d, z0, digits, height, &mut |_, _| true)
}

pub fn discover_with(
    d: &HGDatum,
    z0: &Q,
    digits: u32,
    height: &BigInt,
    progress: &mut dyn FnMut(usize, f64) -> bool,
) -> Result<Option<ZetaIdentityCertificate>> {
    let q = check_setting(d, z0)?;
    let hi = 2 * digits;
    let mut xs = moment_sums_with(d, z0, q, hi, Exec::default(), progress)?;
    let zeta = zeta_int(q as u32 + 1, hi)?;
    xs.push(zeta);
    let Some(rel) = integer_relation(&xs, height, digits)? else {
        return Ok(None);
    };
    let c = &rel.coefficients;
    if c[q].is_zero() || c[q + 1].is_zero() {
        return Ok(None);
    }
    // sum c_j S_j + c_{q+1} zeta = 0  =>  P = c_0..c_q, k = -c_{q+1}
    let flip = c[q].is_negative();
    let sign = |x: &BigInt| Q::from_integer(if flip { -x } else { x.clone() });
    let p = QPoly::new(c[..=q].iter().map(sign).collect());
    let k = -sign(&c[q + 1]);
    match verify_with(d, z0, &p, &k, hi, progress)? {
        Verdict::Verified { certificate } => Ok(Some(certificate)),
        Verdict::Refuted { .. } => Ok(None),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub datum: HGDatum,
    #[serde(with = "serde_q")]
    pub z0: Q,
    #[serde(rename = "P")]
    pub p: QPoly,
    #[serde(with = "serde_q")]
    pub k: Q,
    pub q: usize,
    pub provenance: String,
}

/// The known special points with their identities.
pub fn hodge_point_registry() -> Vec<RegistryEntry> {
    use crate::numerics::{q as rq, qi};
    let half = rq(1, 2);
    let quintic = {
        let mut a = vec![half.clone(); 5];
        a.extend([rq(1, 5), rq(2, 5), rq(3, 5), rq(4, 5)]);
        a
    };
    vec![
        RegistryEntry {
            datum: HGDatum::mum(&vec![half; 5]).expect("valid"),
            z0: qi(-4),
            p: QPoly::from_ints(&[1, -6, 10]),
            k: qi(-28),
            q: 2,
            provenance: "rank 5, a = (1/2)^5, z0 = -4: zeta(3) series with P = 10n^2 - 6n + 1".into(),
        },
        RegistryEntry {
            datum: HGDatum::mum(&quintic).expect("valid"),
            z0: rq(-3125, 1024),
            p: QPoly::from_ints(&[30, -425, 2275, -5600, 5532]),
            k: qi(-380928),
            q: 4,
            provenance: "rank 9, a = (1/5, 2/5, (1/2)^5, 3/5, 4/5), z0 = -3125/1024: zeta(5) series".into(),
        },
    ]
}
