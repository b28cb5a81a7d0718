//! Integer relations by lattice reduction.
//!
//! The reduction is the all-integer variant of LLL (no floating point, all
//! Gram-Schmidt data kept as exact integer subdeterminants), run on the
//! lattice `[e_i | round(S x_i)]` with `S = 10^(digits - 10)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::hpreal::HPReal;
use super::rational::{serde_int, Q};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRelation {
    #[serde(with = "serde_int::vec")]
    pub coefficients: Vec<BigInt>,
    pub residual: HPReal,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Nearest integer to `a / b` for `b > 0`.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    ((a << 1u32) + b).div_floor(&(b << 1u32))
}

struct Lll {
    b: Vec<Vec<BigInt>>,
    d: Vec<BigInt>,
    // lambda[k][j] for j < k, 1-based like d
    lam: Vec<Vec<BigInt>>,
}

impl Lll {
    fn red(&mut self, k: usize, l: usize) {
        if (&self.lam[k][l] << 1u32).abs() <= self.d[l] {
            return;
        }
        let q = round_div(&self.lam[k][l], &self.d[l]);
        let bl = self.b[l - 1].clone();
        for (x, y) in self.b[k - 1].iter_mut().zip(&bl) {
            *x -= &q * y;
        }
        let dl = self.d[l].clone();
        self.lam[k][l] -= &q * dl;
        for i in 1..l {
            let t = &q * &self.lam[l][i];
            self.lam[k][i] -= t;
        }
    }

    fn swap(&mut self, k: usize, kmax: usize) {
        self.b.swap(k - 1, k - 2);
        for j in 1..k - 1 {
            let t = std::mem::take(&mut self.lam[k][j]);
            self.lam[k][j] = std::mem::replace(&mut self.lam[k - 1][j], t);
        }
        let lam = self.lam[k][k - 1].clone();
        let bb = (&self.d[k - 2] * &self.d[k] + &lam * &lam) / &self.d[k - 1];
        for i in k + 1..=kmax {
            let t = self.lam[i][k].clone();
            self.lam[i][k] = (&self.d[k] * &self.lam[i][k - 1] - &lam * &t) / &self.d[k - 1];
            self.lam[i][k - 1] = (&bb * &t + &lam * &self.lam[i][k]) / &self.d[k];
        }
        self.d[k - 1] = bb;
    }
}

/// Reduce a basis of linearly independent integer vectors in place with
/// Lovász constant 99/100.
pub fn lll_reduce(basis: &mut Vec<Vec<BigInt>>) -> Result<()> {
    let n = basis.len();
    if n < 2 {
        return Ok(());
    }
    let mut s = Lll {
        b: std::mem::take(basis),
        d: vec![BigInt::zero(); n + 1],
        lam: vec![vec![BigInt::zero(); n + 1]; n + 1],
    };
    s.d[0] = BigInt::one();
    s.d[1] = dot(&s.b[0], &s.b[0]);
    if s.d[1].is_zero() {
        return Err(Error::Precondition("basis vectors are dependent".into()));
    }
    let mut k = 2;
    let mut kmax = 1;
    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = dot(&s.b[k - 1], &s.b[j - 1]);
                for i in 1..j {
                    u = (&s.d[i] * u - &s.lam[k][i] * &s.lam[j][i]) / &s.d[i - 1];
                }
                if j < k {
                    s.lam[k][j] = u;
                } else {
                    if u.is_zero() {
                        return Err(Error::Precondition("basis vectors are dependent".into()));
                    }
                    s.d[k] = u;
                }
            }
        }
        loop {
            s.red(k, k - 1);
            let lam = &s.lam[k][k - 1];
            let lhs = &s.d[k] * &s.d[k - 2] * 100;
            let rhs = &s.d[k - 1] * &s.d[k - 1] * 99 - lam * lam * 100;
            if lhs < rhs {
                s.swap(k, kmax);
                k = (k - 1).max(2);
            } else {
                break;
            }
        }
        for l in (1..k - 1).rev() {
            s.red(k, l);
        }
        k += 1;
    }
    *basis = s.b;
    Ok(())
}

fn combine(c: &[BigInt], xs: &[HPReal]) -> HPReal {
    let digits = xs.iter().map(HPReal::digits).max().unwrap_or(0);
    xs.iter().zip(c).fold(HPReal::zero(digits), |acc, (x, ci)| &acc + &x.mul_int(ci))
}

fn ten_pow_neg(k: u32) -> Q {
    Q::new(BigInt::one(), BigInt::from(10).pow(k))
}

/// Look for a small integer relation among `xs`.
///
/// Candidates must satisfy `|sum c_i x_i| < 10^(-digits/2)` at the lattice
/// precision and are then confirmed to be below `10^(-3 digits / 2)` using the
/// full inputs, which therefore have to be accurate to about `2 digits`.
pub fn integer_relation(xs: &[HPReal], height: &BigInt, digits: u32) -> Result<Option<IntRelation>> {
    if xs.len() < 2 {
        return Err(Error::Precondition("need at least two values".into()));
    }
    if digits < 20 {
        return Err(Error::Precondition("relation search needs at least 20 digits".into()));
    }
    let detect = ten_pow_neg(digits / 2);
    if let Some(i) = xs.iter().position(|x| x.err() >= detect) {
        return Err(Error::Precondition(format!(
            "input {i} has error {} above the detection threshold",
            x_err_text(&xs[i])
        )));
    }
    let n = xs.len();
    let scale_pow = digits - 10;
    let mut basis: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut row = vec![BigInt::zero(); n + 1];
            row[i] = BigInt::one();
            row[n] = xs[i].round_scaled(scale_pow);
            row
        })
        .collect();
    lll_reduce(&mut basis)?;

    let confirm = ten_pow_neg((3 * digits).div_ceil(2));
    let mut best: Option<IntRelation> = None;
    for row in &basis {
        let c = &row[..n];
        if c.iter().all(Zero::is_zero) || c.iter().any(|ci| ci.abs() > *height) {
            continue;
        }
        let r = combine(c, xs);
        if r.abs_upper() >= detect {
            continue;
        }
        if r.abs_upper() >= confirm {
            continue;
        }
        let norm = c.iter().map(|x| x.abs()).max().unwrap_or_default();
        let better = match &best {
            None => true,
            Some(b) => norm < b.coefficients.iter().map(|x| x.abs()).max().unwrap_or_default(),
        };
        if better {
            best = Some(IntRelation { coefficients: normalize_sign(c), residual: r });
        }
    }
    if let Some(b) = &mut best {
        b.residual = combine(&b.coefficients, xs);
    }
    Ok(best)
}

fn x_err_text(x: &HPReal) -> String {
    x.err_sci()
}

/// Divide out the content and make the first nonzero entry positive.
pub fn normalize_sign(c: &[BigInt]) -> Vec<BigInt> {
    let g = c.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let g = if g.is_zero() { BigInt::one() } else { g };
    let flip = c.iter().find(|x| !x.is_zero()).map_or(false, |x| x.is_negative());
    c.iter().map(|x| if flip { -(x / &g) } else { x / &g }).collect()
}
