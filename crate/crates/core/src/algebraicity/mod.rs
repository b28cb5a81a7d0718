//! Algebraic hypergeometric functions: minimal polynomials, exact
//! certificates `D G = f G` for exponential integrals, and unit values of
//! the half-integral example.

mod bivar;
mod surd;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use bivar::{equal_mod_curve, pseudo_remainder, ratio_equal_mod_curve, BivarPoly, Windows};
pub use surd::QuadSurd;

use crate::error::{Error, Result};
use crate::hgdef::{finite_monodromy, HGDatum};
use crate::numerics::rational::serde_q;
use crate::numerics::{linalg, Q};
use crate::par::{map_range, Exec};
use crate::series::{hg_coefficients, Measure, RatSeries};
use bivar::SeriesPowers;

/// Extra equations beyond the number of unknowns.
pub const DEFAULT_MARGIN: usize = 10;

/// `(j, i)` descending: columns with high powers of `y` are eliminated first.
fn pivot_preference(monos: &[(i64, i64)]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..monos.len()).collect();
    idx.sort_by_key(|&c| std::cmp::Reverse((monos[c].1, monos[c].0)));
    idx
}

/// Matrix whose columns are the series `z^i f^j`, rows the exponents
/// `lo..lo + n`.
fn evaluation_matrix(monos: &[(i64, i64)], powers: &SeriesPowers, lo: i64, n: usize, exec: Exec) -> Vec<Vec<Q>> {
    map_range(exec, 0, n, |r| {
        let e = lo + r as i64;
        monos
            .iter()
            .map(|&(i, j)| {
                let k = e - i;
                if k < 0 {
                    Q::zero()
                } else {
                    powers.get(j).coeff(k as usize).cloned().expect("within known range")
                }
            })
            .collect()
    })
}

fn vector_to_poly(monos: &[(i64, i64)], v: &[Q], windows: Windows) -> BivarPoly {
    BivarPoly::new(windows, monos.iter().copied().zip(v.iter().cloned())).expect("monomials lie in window")
}

/// Smallest polynomial relation `P(z, f) = 0` with `deg_y P <= deg_y` and
/// `deg_z P <= deg_z`, checked to order `n` and rechecked at `2n`.
pub fn min_poly(d: &HGDatum, deg_y: usize, deg_z: usize, n: usize) -> Result<BivarPoly> {
    if !finite_monodromy(d) {
        return Err(Error::Precondition(format!("{d} has infinite monodromy; no algebraic relation exists")));
    }
    let need = (deg_y + 1) * (deg_z + 1);
    if n < need {
        return Err(Error::Precondition(format!("order {n} is below the {need} unknowns")));
    }
    let f = hg_coefficients(d, 2 * n);
    let exec = Exec::default();
    for dy in 1..=deg_y {
        for dz in 0..=deg_z {
            let windows = Windows::new((0, dz as i64), (0, dy as i64));
            let monos = windows.monomials();
            let powers = SeriesPowers::new(&f.truncate(n), windows.j)?;
            let m = evaluation_matrix(&monos, &powers, 0, n, exec);
            let Some(v) = linalg::nullspace(&m, monos.len(), exec).into_iter().next() else {
                continue;
            };
            let p = vector_to_poly(&monos, &v, windows).content_normalize();
            if !p.eval_at(&f)?.is_zero() {
                return Err(Error::Truncation(format!(
                    "relation found at order {n} fails at order {}; raise the order",
                    2 * n
                )));
            }
            return Ok(p);
        }
    }
    Err(Error::NotFound(format!("no relation with deg_y <= {deg_y}, deg_z <= {deg_z}")))
}

/// `L(z) = integral (f - 1) dz / z`, so that `F = z exp(L)` solves
/// `D F = f F`.
pub fn exp_integral_log_series(d: &HGDatum, n: usize) -> Result<RatSeries> {
    let f = hg_coefficients(d, n);
    let mut c = f.coeffs().to_vec();
    c[0] -= Q::one();
    RatSeries::power(c).integrate(Measure::DzOverZ)
}

/// Laurent polynomial `G(z, f)` with `D G = f_sum G` to order `n`, taken
/// modulo polynomials that vanish on the series `f`. `None` when the window
/// holds no solution.
pub fn rational_exp_integral(f: &RatSeries, f_sum: &RatSeries, windows: Windows, n: usize) -> Result<Option<BivarPoly>> {
    rational_exp_integral_with(f, f_sum, windows, n, Exec::default())
}

pub fn rational_exp_integral_with(
    f: &RatSeries,
    f_sum: &RatSeries,
    windows: Windows,
    n: usize,
    exec: Exec,
) -> Result<Option<BivarPoly>> {
    if f.order() < n || f_sum.order() < n {
        return Err(Error::Inconsistent(format!(
            "need {n} coefficients; f has {} and f_sum has {}",
            f.order(),
            f_sum.order()
        )));
    }
    if !f_sum.offset().is_zero() {
        return Err(Error::Precondition("f_sum must be a power series".into()));
    }
    let monos = windows.monomials();
    let powers = SeriesPowers::new(&f.truncate(n), windows.j)?;
    let lo = windows.i.0;
    let eval = evaluation_matrix(&monos, &powers, lo, n, exec);
    let fs = f_sum.coeffs();
    // Row for exponent e: e * [z^e] G - sum_k fs_k [z^(e-k)] G.
    let ode: Vec<Vec<Q>> = map_range(exec, 0, n, |r| {
        let e = lo + r as i64;
        (0..monos.len())
            .map(|c| {
                let mut acc = &eval[r][c] * Q::from_integer(BigInt::from(e));
                for k in 0..=r {
                    if !fs[k].is_zero() && !eval[r - k][c].is_zero() {
                        acc -= &fs[k] * &eval[r - k][c];
                    }
                }
                acc
            })
            .collect()
    });
    let solutions = linalg::nullspace(&ode, monos.len(), exec);
    if solutions.is_empty() {
        return Ok(None);
    }
    // Vectors that evaluate to zero are multiples of the curve; reduce
    // modulo them in a fixed pivot order so the answer is canonical.
    let mut trivial = linalg::nullspace(&eval, monos.len(), exec);
    let prefer = pivot_preference(&monos);
    let pivots = linalg::rref_ordered(&mut trivial, &prefer, exec);
    let reduce = |mut v: Vec<Q>| {
        for (row, &pc) in trivial.iter().zip(&pivots) {
            if !v[pc].is_zero() {
                let c = v[pc].clone();
                for (x, t) in v.iter_mut().zip(row) {
                    *x -= &c * t;
                }
            }
        }
        v
    };
    for v in solutions {
        let v = reduce(v);
        if v.iter().any(|x| !x.is_zero()) {
            let g = vector_to_poly(&monos, &v, windows).content_normalize();
            return Ok(Some(BivarPoly::from_terms(g.terms().map(|(k, c)| (*k, c.clone())))));
        }
    }
    Ok(None)
}

/// Diagonal window schedule `i in [-w, w]`, `j in [-2w, 2w]` for
/// `w = 1..=cap`; attempts run in parallel and the smallest successful
/// window wins.
pub fn search_exp_integral(f: &RatSeries, f_sum: &RatSeries, cap: usize, margin: usize) -> Result<Option<(Windows, BivarPoly)>> {
    let attempts = map_range(Exec::default(), 1, cap + 1, |w| {
        let w = w as i64;
        let windows = Windows::new((-w, w), (-2 * w, 2 * w));
        let n = windows.monomials().len() + margin;
        let fs = f.truncate(n);
        if fs.order() < n || f_sum.order() < n {
            return Err(Error::Inconsistent(format!("series too short for window {w}")));
        }
        rational_exp_integral_with(&fs, &f_sum.truncate(n), windows, n, Exec::Sequential).map(|g| g.map(|g| (windows, g)))
    });
    for a in attempts {
        if let Some(hit) = a? {
            return Ok(Some(hit));
        }
    }
    Ok(None)
}

/// `D G - f_sum G` with `G` evaluated at `y = f`; zero on success.
pub fn dlog_residual(g: &BivarPoly, f: &RatSeries, f_sum: &RatSeries) -> Result<RatSeries> {
    let gs = g.eval_at(f)?;
    let dg = crate::opalg::Operand::apply_dpoly(&gs, &crate::numerics::QPoly::x());
    dg.sub(&f_sum.mul(&gs))
}

/// `D(A/B) = f_sum A/B` in the cleared form `B DA - A DB - f_sum A B`.
pub fn dlog_ratio_residual(num: &BivarPoly, den: &BivarPoly, f: &RatSeries, f_sum: &RatSeries) -> Result<RatSeries> {
    use crate::opalg::Operand;
    let d = crate::numerics::QPoly::x();
    let a = num.eval_at(f)?;
    let b = den.eval_at(f)?;
    let lhs = b.mul(&a.apply_dpoly(&d)).sub(&a.mul(&b.apply_dpoly(&d)))?;
    lhs.sub(&f_sum.mul(&a).mul(&b))
}

/// `D G == f_sum G` holds on every known coefficient.
pub fn verify_dlog(g: &BivarPoly, f: &RatSeries, f_sum: &RatSeries) -> Result<bool> {
    Ok(dlog_residual(g, f, f_sum)?.is_zero())
}

/// Value, minimal polynomial and unit check of `F(4/N)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitReport {
    #[serde(rename = "N")]
    pub n: i64,
    pub value: String,
    #[serde(with = "serde_q::vec")]
    pub minpoly: Vec<Q>,
    pub is_unit: bool,
}

fn squarefree(n: &BigInt) -> bool {
    let n = n.abs();
    let mut k = BigInt::from(2);
    while &k * &k <= n {
        if (&n % (&k * &k)).is_zero() {
            return false;
        }
        k += 1;
    }
    true
}

/// `F(z) = (1 - sqrt(1 - z)) / (1 + sqrt(1 - z))` at `z = 4/N`, computed in
/// `Q(sqrt(N(N-4)))`.
pub fn unit_value(n: i64) -> Result<QuadSurd> {
    if n <= 5 {
        return Err(Error::Precondition(format!("N = {n} must exceed 5")));
    }
    let disc = BigInt::from(n) * BigInt::from(n - 4);
    if !squarefree(&disc) {
        return Err(Error::Precondition(format!("N(N-4) = {disc} is not squarefree")));
    }
    // sqrt(1 - 4/N) = sqrt(N(N-4)) / N
    let s = QuadSurd::new(Q::zero(), Q::new(BigInt::one(), BigInt::from(n)), disc.clone());
    let one = QuadSurd::rational(Q::one(), disc);
    one.sub(&s).div(&one.add(&s)).ok_or_else(|| Error::Inconsistent("division by zero in Q(sqrt)".into()))
}

pub fn unit_evaluation(n: i64) -> Result<UnitReport> {
    let v = unit_value(n)?;
    let minpoly = v.min_poly();
    debug_assert!(minpoly.iter().all(|c| c.is_integer()) || !v.is_unit());
    Ok(UnitReport { n, value: v.to_string(), minpoly, is_unit: v.is_unit() })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{q, qi};
    use crate::numerics::rational::factorial;

    fn half() -> HGDatum {
        HGDatum::new(&[q(1, 2)], &[qi(1)]).unwrap()
    }

    fn third() -> HGDatum {
        HGDatum::new(&[q(1, 3)], &[qi(1)]).unwrap()
    }

    fn curve(k: i64) -> BivarPoly {
        BivarPoly::from_terms([((0, k), qi(1)), ((1, k), qi(-1)), ((0, 0), qi(-1))])
    }

    fn same_up_to_sign(a: &BivarPoly, b: &BivarPoly) -> bool {
        a.terms().count() == b.terms().count()
            && (a.terms().all(|((i, j), c)| &b.coeff(*i, *j) == c)
                || a.terms().all(|((i, j), c)| b.coeff(*i, *j) == -c.clone()))
    }

    #[test]
    fn minimal_polynomials() {
        assert!(same_up_to_sign(&min_poly(&half(), 2, 1, 30).unwrap(), &curve(2)));
        assert!(same_up_to_sign(&min_poly(&third(), 3, 1, 30).unwrap(), &curve(3)));
        assert!(matches!(min_poly(&half(), 1, 1, 30), Err(Error::NotFound(_))));
        let legendre = HGDatum::new(&[q(1, 2), q(1, 2)], &[qi(1), qi(1)]).unwrap();
        assert!(matches!(min_poly(&legendre, 2, 2, 30), Err(Error::Precondition(_))));
    }

    #[test]
    fn log_series_matches_central_binomials() {
        let l = exp_integral_log_series(&half(), 20).unwrap();
        assert!(l.coeff(0).unwrap().is_zero());
        assert_eq!(l.coeff(1).unwrap(), &q(1, 2));
        for n in 1..=20u64 {
            let c = factorial(2 * n) / (factorial(n) * factorial(n));
            let expect = Q::new(c, BigInt::from(4).pow(n as u32) * BigInt::from(n));
            assert_eq!(l.coeff(n as usize).unwrap(), &expect);
        }
    }

    #[test]
    fn half_certificate_reduces_to_cayley_form() {
        let f = hg_coefficients(&half(), 60);
        let g = rational_exp_integral(&f, &f, Windows::new((-1, 1), (-2, 2)), 40).unwrap().unwrap();
        assert!(verify_dlog(&g, &f, &f).unwrap());
        let y = |k: i64| BivarPoly::from_terms([((0, 1), qi(1)), ((0, 0), qi(k))]);
        let one = BivarPoly::from_terms([((0, 0), qi(1))]);
        assert!(ratio_equal_mod_curve(&g, &one, &y(-1), &y(1), &curve(2)));
        let expected = BivarPoly::from_terms([((-1, -2), qi(1))]).mul(&y(-1)).mul(&y(-1));
        assert!(equal_mod_curve(&g, &expected, &curve(2)) || equal_mod_curve(&g, &expected.scale(&qi(-1)), &curve(2)));
    }

    #[test]
    fn cayley_form_satisfies_the_equation() {
        let f = hg_coefficients(&half(), 50);
        let num = BivarPoly::from_terms([((0, 1), qi(1)), ((0, 0), qi(-1))]);
        let den = BivarPoly::from_terms([((0, 1), qi(1)), ((0, 0), qi(1))]);
        let r = dlog_ratio_residual(&num, &den, &f, &f).unwrap();
        assert!(r.order() >= 50 && r.is_zero());
    }

    #[test]
    fn conjugate_sum_admits_a_certificate() {
        let f = hg_coefficients(&third(), 120);
        let f2 = hg_coefficients(&HGDatum::new(&[q(2, 3)], &[qi(1)]).unwrap(), 120);
        let fsum = crate::opalg::Operand::add(&f, &f2).unwrap();
        let w = Windows::new((-2, 2), (-4, 4));
        let n = w.monomials().len() + DEFAULT_MARGIN;
        let g = rational_exp_integral(&f, &fsum, w, n).unwrap().expect("certificate exists");
        assert!(verify_dlog(&g, &f, &fsum).unwrap());
        let y1 = BivarPoly::from_terms([((0, 1), qi(1)), ((0, 0), qi(-1))]);
        let expected = BivarPoly::from_terms([((-1, -3), qi(1))]).mul(&y1).mul(&y1).mul(&y1);
        // G is determined up to a rational scalar; fix it by the leading term
        let lead = |p: &BivarPoly| p.eval_at(&f).unwrap().strip_leading_zeros().coeff(0).cloned().unwrap();
        let scaled = expected.scale(&(lead(&g) / lead(&expected)));
        assert!(equal_mod_curve(&g, &scaled, &curve(3)));
        // a single unbalanced conjugate has no certificate in the same window
        assert!(rational_exp_integral(&f, &f, w, n).unwrap().is_none());
    }

    #[test]
    fn short_inputs_are_rejected() {
        let f = hg_coefficients(&half(), 5);
        assert!(matches!(rational_exp_integral(&f, &f, Windows::new((-1, 1), (-2, 2)), 40), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn unit_values() {
        let r = unit_evaluation(7).unwrap();
        assert_eq!(r.value, "(5-√21)/2");
        assert_eq!(r.minpoly, vec![qi(1), qi(-5), qi(1)]);
        assert!(r.is_unit);
        let r = unit_evaluation(11).unwrap();
        assert_eq!(r.value, "(9-√77)/2");
        assert_eq!(r.minpoly, vec![qi(1), qi(-9), qi(1)]);
        assert!(matches!(unit_evaluation(6), Err(Error::Precondition(_))));
        assert!(matches!(unit_evaluation(5), Err(Error::Precondition(_))));
    }
}
