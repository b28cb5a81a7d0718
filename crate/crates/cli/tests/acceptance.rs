//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use clap::Parser;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hgnf::algebraicity::{self, BivarPoly, Windows};
use hgnf::ellfam;
use hgnf::hgdef::{self, HGDatum};
use hgnf::identities::{self, Verdict};
use hgnf::numerics::rational::factorial;
use hgnf::numerics::{integer_relation, ln_q, pochhammer, q, qi, HPReal, QPoly, Q};
use hgnf::opalg::{op_multiply, pf_operator, to_inverse_coordinate, DiffOp, Operand};
use hgnf::par::Exec;
use hgnf::series::{self, Jet, JetSeries, RatSeries};
use hgnf_cli::{dispatch, exit, Cli};

const SEED: u64 = 0x5eed_1d3a;

/// Criterion 1: digits, residual exponent, time budget.
const C1_DIGITS: u32 = 60;
const C1_RESIDUAL_EXP: i64 = 40;
const C1_BUDGET: Duration = Duration::from_secs(60);
/// Criterion 2.
const C2_DIGITS: u32 = 40;
const C2_RESIDUAL_EXP: i64 = 25;
/// Criterion 3: discovery precision per registry entry and height bound.
const C3_DIGITS: [u32; 2] = [60, 80];
const C3_HEIGHT: u64 = 1_000_000;
/// Criterion 4.
const C4_ORDER: usize = 40;
const C4_JET_ORDER: usize = 3;
const C4_JET_SERIES_ORDER: usize = 30;
/// Criterion 5.
const C5_CONST_TERMS: usize = 12;
const C5_INHOMOGENEITY_ORDER: usize = 42;
const C5_FROBENIUS_N: usize = 20;
/// Criterion 6.
const C6_DLOG_ORDER: usize = 50;
/// Criterion 8.
const C8_FACTORIAL_N: u64 = 20;
const C8_RANDOM_GAMMA: usize = 10;
/// Criterion 9.
const C9_INTERVAL_CASES: usize = 1000;
const C9_RING_CASES: usize = 100;

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn datum(s: &str) -> HGDatum {
    s.parse().expect("valid datum")
}

fn run_cli(args: &[&str]) -> hgnf_cli::Outcome {
    let mut full = vec!["hgnf"];
    full.extend_from_slice(args);
    dispatch(&Cli::try_parse_from(full).expect("arguments parse"))
}

fn proportional(p: &QPoly, k: &Q, p0: &QPoly, k0: &Q) -> bool {
    if p.is_zero() || p0.is_zero() {
        return false;
    }
    let s = p0.leading() / p.leading();
    &p.scale(&s) == p0 && &(k * &s) == k0
}

fn c1() -> Check {
    let start = Instant::now();
    let out = run_cli(&[
        "identity", "verify", "--datum", "a=1/2,1/2,1/2,1/2,1/2;b=1,1,1,1,1", "--z0", "-4", "--P", "10*n^2-6*n+1",
        "--k", "-28", "--zeta", "3", "--digits", &C1_DIGITS.to_string(),
    ]);
    let elapsed = start.elapsed();
    ensure(out.code == exit::OK, format!("exit code {}: {}", out.code, out.stderr))?;
    let v: Verdict = serde_json::from_str(&out.stdout).map_err(err)?;
    ensure(v.residual().below_pow10(C1_RESIDUAL_EXP), format!("residual {}", v.residual().err_sci()))?;
    ensure(elapsed < C1_BUDGET, format!("took {elapsed:?}"))
}

fn c2() -> Check {
    let e = &identities::hodge_point_registry()[1];
    let v = identities::verify_zeta_identity(&e.datum, &e.z0, &e.p, &e.k, C2_DIGITS).map_err(err)?;
    ensure(v.is_verified(), "refuted")?;
    ensure(v.residual().below_pow10(C2_RESIDUAL_EXP), format!("residual {}", v.residual().err_sci()))
}

fn c3() -> Check {
    let height = BigInt::from(C3_HEIGHT);
    for (e, digits) in identities::hodge_point_registry().iter().zip(C3_DIGITS) {
        let cert = identities::discover_identity(&e.datum, &e.z0, digits, &height)
            .map_err(err)?
            .ok_or_else(|| format!("nothing found for {} at {digits} digits", e.datum))?;
        ensure(proportional(&cert.p, &cert.k, &e.p, &e.k), format!("found {}", cert.identity_string()))?;
        // the certificate was confirmed at doubled precision
        ensure(cert.residual.digits() >= 2 * digits, "not re-verified at doubled precision")?;
        let again = identities::verify_zeta_identity(&e.datum, &e.z0, &cert.p, &cert.k, 2 * digits).map_err(err)?;
        ensure(again.is_verified(), "re-verification failed")?;
    }
    Ok(())
}

fn c4() -> Check {
    // (a) L f = 0 for representative data
    for s in [
        "a=1/2;b=1",
        "a=1/2,1/2;b=1,1",
        "a=1/3,2/3;b=1,1",
        "a=1/2,1/3;b=1/4,1",
        "a=1/5,2/5,3/5,4/5;b=1,1,1,1",
        "a=1/2,1/2,1/2,1/2,1/2;b=1,1,1,1,1",
    ] {
        let d = datum(s);
        let f = series::hg_coefficients(&d, C4_ORDER);
        ensure(pf_operator(&d).apply_with(&f, Exec::default()).map_err(err)?.is_zero(), format!("L f != 0 for {s}"))?;
    }
    // (b) L Phi(s, z) = z^s prod (s + b_j - 1) in jets
    let d = datum("a=1/2,1/3;b=1/4,1");
    let l = pf_operator(&d);
    for s0 in [q(1, 7), q(-2, 5), q(3, 2)] {
        let phi = series::frobenius_series(&d, &s0, C4_JET_ORDER, C4_JET_SERIES_ORDER).map_err(err)?;
        let lhs = l.apply_with(&phi, Exec::default()).map_err(err)?;
        let prod = d
            .b()
            .iter()
            .fold(Jet::constant(qi(1), C4_JET_ORDER), |acc, b| acc.mul(&Jet::variable(&s0 + b - qi(1), C4_JET_ORDER)));
        let rhs = JetSeries::monomial(s0.clone(), prod, C4_JET_SERIES_ORDER);
        ensure(lhs == rhs, format!("jet identity fails at s0 = {s0}"))?;
    }
    // (c) L V = 1 for a = (1/2)^r, r odd
    for r in [1usize, 3, 5] {
        let d = HGDatum::mum(&vec![q(1, 2); r]).map_err(err)?;
        let v = series::quasiperiod_series(&d, C4_ORDER + 1).map_err(err)?;
        let one = RatSeries::monomial(qi(0), C4_ORDER);
        let lv = to_inverse_coordinate(&pf_operator(&d)).apply_with(&v, Exec::default()).map_err(err)?;
        ensure(lv.sub(&one).map_err(err)?.is_zero(), format!("L V != 1 for r = {r}"))?;
    }
    Ok(())
}

fn c5() -> Check {
    let phi = ellfam::phi();
    let terms = ellfam::laurent_const_terms(&phi, C5_CONST_TERMS);
    for (n, c) in terms.iter().enumerate() {
        let brute = (0..n).fold(ellfam::LaurentPoly2::one(), |acc, _| acc.mul(&phi)).coeff(0, 0);
        ensure(c == &brute, format!("pruned and brute-force constant terms differ at n = {n}"))?;
        let closed = if n % 2 == 0 { ellfam::vanishing_period_coefficient(n as u64 / 2) } else { Q::zero() };
        ensure(c == &closed, format!("constant term at n = {n}"))?;
    }
    let (_, reduced) = ellfam::aj_expansion(6).map_err(err)?;
    for (n, want) in [(1, qi(12)), (3, qi(-140)), (5, q(12012, 5))] {
        ensure(reduced.coeff(n) == Some(&want), format!("AJ coefficient at z^{n}"))?;
    }
    let inh = ellfam::verify_inhomogeneity(C5_INHOMOGENEITY_ORDER).map_err(err)?;
    ensure(inh.k == qi(3) && inh.degree == 1, format!("inhomogeneity {} z^{}", inh.k, inh.degree))?;
    ensure(ellfam::frobenius_match(C5_FROBENIUS_N).map_err(err)?, "Frobenius side disagrees")
}

fn y_linear(c: i64) -> BivarPoly {
    BivarPoly::from_terms([((0, 1), qi(1)), ((0, 0), qi(c))])
}

fn c6() -> Check {
    let half = datum("a=1/2;b=1");
    let p = algebraicity::min_poly(&half, 2, 1, 30).map_err(err)?;
    let curve = BivarPoly::from_terms([((0, 2), qi(1)), ((1, 2), qi(-1)), ((0, 0), qi(-1))]);
    ensure(p == curve || p == curve.scale(&qi(-1)), "wrong minimal polynomial")?;

    let f = series::hg_coefficients(&half, C6_DLOG_ORDER + 10);
    let w = Windows::new((-1, 1), (-2, 2));
    let g = algebraicity::rational_exp_integral(&f, &f, w, w.monomials().len() + algebraicity::DEFAULT_MARGIN)
        .map_err(err)?
        .ok_or("no certificate for the half datum")?;
    let one = BivarPoly::from_terms([((0, 0), qi(1))]);
    ensure(algebraicity::ratio_equal_mod_curve(&g, &one, &y_linear(-1), &y_linear(1), &curve), "G is not (f-1)/(f+1)")?;
    let f50 = f.truncate(C6_DLOG_ORDER);
    let r = algebraicity::dlog_residual(&g, &f50, &f50).map_err(err)?;
    ensure(r.is_zero() && r.order() >= C6_DLOG_ORDER - 1, "dlog residual")?;

    let third = datum("a=1/3;b=1");
    let f1 = series::hg_coefficients(&third, 80);
    let f2 = series::hg_coefficients(&datum("a=2/3;b=1"), 80);
    let fsum = f1.add(&f2).map_err(err)?;
    let w = Windows::new((-2, 2), (-4, 4));
    let n = w.monomials().len() + algebraicity::DEFAULT_MARGIN;
    let g = algebraicity::rational_exp_integral(&f1, &fsum, w, n).map_err(err)?.ok_or("no conjugate-sum certificate")?;
    ensure(algebraicity::verify_dlog(&g, &f1, &fsum).map_err(err)?, "conjugate-sum certificate fails")
}

fn c7() -> Check {
    for (n, trace) in [(7, 5), (11, 9)] {
        let r = algebraicity::unit_evaluation(n).map_err(err)?;
        ensure(r.minpoly == vec![qi(1), qi(-trace), qi(1)], format!("minpoly for N = {n}"))?;
        let v = algebraicity::unit_value(n).map_err(err)?;
        ensure(r.is_unit && v.norm().abs() == Q::one(), format!("N = {n} not a unit"))?;
    }
    Ok(())
}

fn random_balanced(rng: &mut ChaCha8Rng) -> HGDatum {
    let orbit = |m: u64| -> Vec<Q> {
        (1..=m).filter(|k| num_integer::gcd(*k, m) == 1).map(|k| Q::new(k.into(), m.into())).collect()
    };
    loop {
        let mut orders: Vec<u64> = (2..=12).collect();
        let mut take = |rng: &mut ChaCha8Rng| orders.swap_remove(rng.gen_range(0..orders.len()));
        let a: Vec<Q> = (0..rng.gen_range(1..=2)).flat_map(|_| orbit(take(rng))).collect();
        let mut b: Vec<Q> = Vec::new();
        let extra = take(rng);
        if orbit(extra).len() < a.len() {
            b.extend(orbit(extra));
        }
        b.resize(a.len(), qi(1));
        if let Ok(d) = HGDatum::new(&a, &b) {
            return d;
        }
    }
}

fn c8() -> Check {
    let legendre = hgdef::classify(&datum("a=1/2,1/2;b=1,1"));
    ensure(legendre.weight == 1 && legendre.hodge == vec![1, 1], "Legendre Hodge data")?;
    ensure(!legendre.interlaced && !legendre.finite_monodromy, "Legendre flags")?;
    for r in 1..=5usize {
        let a: Vec<Q> = (1..=r).map(|j| Q::new(BigInt::from(j), BigInt::from(r + 1))).collect();
        let d = HGDatum::mum(&a).map_err(err)?;
        ensure(hgdef::hodge_numbers(&d).1 == vec![1; r], format!("Hodge numbers for r = {r}"))?;
    }
    let (d, c) = hgdef::factorial_to_hg(&[30, 1], &[15, 10, 6]).map_err(err)?;
    ensure(d.rank() == 8 && hgdef::finite_monodromy(&d), "factorial datum")?;
    for n in 0..=C8_FACTORIAL_N {
        let ratio = Q::new(
            factorial(30 * n) * factorial(n),
            factorial(15 * n) * factorial(10 * n) * factorial(6 * n),
        );
        let hg = d.a().iter().fold(Q::one(), |acc, x| acc * pochhammer(x, n as usize))
            / d.b().iter().fold(Q::one(), |acc, x| acc * pochhammer(x, n as usize));
        ensure(hg * c.pow(n as i32) == ratio, format!("factorial coefficient at n = {n}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..C8_RANDOM_GAMMA {
        let d = random_balanced(&mut rng);
        let g = hgdef::gamma_vector(&d).map_err(err)?;
        ensure(hgdef::gamma_identity_holds(&d, &g).map_err(err)?, format!("gamma identity for {d}"))?;
    }
    Ok(())
}

fn random_q(rng: &mut ChaCha8Rng, span: i64) -> Q {
    Q::new(rng.gen_range(-span..=span).into(), rng.gen_range(1..=span).into())
}

fn random_op(rng: &mut ChaCha8Rng) -> DiffOp {
    DiffOp::from_terms((0..rng.gen_range(0..=3)).map(|_| {
        let k = rng.gen_range(0..=2);
        let p = QPoly::new((0..rng.gen_range(0..=3)).map(|_| random_q(rng, 9)).collect());
        (k, p)
    }))
}

fn c9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    for _ in 0..C9_INTERVAL_CASES {
        let x = Q::new(rng.gen::<i64>().into(), rng.gen_range(1..i64::MAX).into());
        let y = Q::new(rng.gen::<i64>().into(), rng.gen_range(1..i64::MAX).into());
        let digits = rng.gen_range(20..80);
        let (hx, hy) = (HPReal::from_q(&x, digits), HPReal::from_q(&y, digits));
        ensure((&hx + &hy).contains(&(&x + &y)), "sum enclosure")?;
        ensure((&hx - &hy).contains(&(&x - &y)), "difference enclosure")?;
        ensure((&hx * &hy).contains(&(&x * &y)), "product enclosure")?;
    }
    for _ in 0..C9_RING_CASES {
        let (a, b, c) = (random_op(&mut rng), random_op(&mut rng), random_op(&mut rng));
        ensure(op_multiply(&op_multiply(&a, &b), &c) == op_multiply(&a, &op_multiply(&b, &c)), "associativity")?;
        ensure(op_multiply(&a, &b.add(&c)) == op_multiply(&a, &b).add(&op_multiply(&a, &c)), "distributivity")?;
    }
    let digits = 40;
    let height = BigInt::from(1000);
    let phi = &(&HPReal::from_int(&BigInt::one(), 2 * digits) + &HPReal::sqrt_q(&qi(5), 2 * digits).map_err(err)?).div_int(&BigInt::from(2));
    let golden = integer_relation(&[HPReal::from_int(&BigInt::one(), 2 * digits), phi.clone(), phi * phi], &height, digits)
        .map_err(err)?
        .ok_or("no golden-ratio relation")?;
    let want: Vec<BigInt> = [1, 1, -1].into_iter().map(BigInt::from).collect();
    ensure(golden.coefficients == want, format!("golden ratio relation {:?}", golden.coefficients))?;
    let logs = integer_relation(&[ln_q(&qi(2), 2 * digits).map_err(err)?, ln_q(&qi(4), 2 * digits).map_err(err)?], &height, digits)
        .map_err(err)?
        .ok_or("no log relation")?;
    let want: Vec<BigInt> = [2, -1].into_iter().map(BigInt::from).collect();
    ensure(logs.coefficients == want, format!("log relation {:?}", logs.coefficients))?;
    for args in [
        &["classify", "--datum", "a=1/5,2/5,3/5,4/5;b=1/3,2/3,1,1"][..],
        &["ellfam", "demo", "--order", "20"][..],
        &["algebraic", "unit", "--N", "7"][..],
        &["quasiperiod", "--datum", "a=1/2,1/2,1/2;b=1,1,1", "--order", "12"][..],
    ] {
        let first = run_cli(args);
        let second = run_cli(args);
        ensure(first.code == exit::OK, format!("{args:?} exited {}", first.code))?;
        ensure(first.stdout == second.stdout, format!("{args:?} is not deterministic"))?;
        let value: serde_json::Value = serde_json::from_str(&first.stdout).map_err(err)?;
        let again: serde_json::Value = serde_json::from_str(&serde_json::to_string(&value).map_err(err)?).map_err(err)?;
        ensure(again == value, "JSON does not survive a reparse")?;
    }
    let demo = run_cli(&["ellfam", "demo", "--order", "20"]);
    let report: ellfam::EllFamReport = serde_json::from_str(&demo.stdout).map_err(err)?;
    ensure(report == ellfam::ellfam_demo(20).map_err(err)?, "report does not round-trip")?;
    let reprinted = serde_json::to_string_pretty(&report).map_err(err)? + "\n";
    ensure(reprinted == demo.stdout, "reparsed report does not re-serialize byte for byte")?;
    Ok(())
}

fn main() {
    let criteria: Vec<(&str, fn() -> Check)> = vec![
        ("identity with zeta(3) verifies at 60 digits", c1),
        ("identity with zeta(5) verifies at 40 digits", c2),
        ("discovery recovers both registered identities", c3),
        ("exact operator contracts", c4),
        ("elliptic family suite", c5),
        ("algebraicity suite", c6),
        ("unit evaluations", c7),
        ("classification suite", c8),
        ("property suites", c9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(()) => println!("PASS [{}] {name} ({secs:.2}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL [{}] {name}: {e} ({secs:.2}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
