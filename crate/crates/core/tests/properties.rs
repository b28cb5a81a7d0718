use hgnf::algebraicity::BivarPoly;
use hgnf::hgdef::{self, HGDatum};
use hgnf::numerics::{HPReal, QPoly, Q};
use hgnf::opalg::{op_multiply, DiffOp};
use hgnf::par::Exec;
use hgnf::series::RatSeries;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Q> {
    (-50i64..=50, 1i64..=12).prop_map(|(n, d)| Q::new(BigInt::from(n), BigInt::from(d)))
}

fn wide_rational() -> impl Strategy<Value = Q> {
    (any::<i64>(), 1i64..=i64::MAX).prop_map(|(n, d)| Q::new(BigInt::from(n), BigInt::from(d)))
}

fn small_poly() -> impl Strategy<Value = QPoly> {
    prop::collection::vec(rational(), 0..=3).prop_map(QPoly::new)
}

fn small_op() -> impl Strategy<Value = DiffOp> {
    prop::collection::vec((0i64..=2, small_poly()), 0..=3).prop_map(DiffOp::from_terms)
}

fn power_series(len: usize) -> impl Strategy<Value = RatSeries> {
    prop::collection::vec(rational(), len).prop_map(RatSeries::power)
}

/// Parameters `k/m` with `gcd(k, m) = 1` for a random set of orders, so the
/// datum is defined over Q.
fn balanced_datum() -> impl Strategy<Value = HGDatum> {
    (prop::sample::subsequence((2u64..=12).collect::<Vec<_>>(), 1..=3), any::<u64>())
        .prop_filter_map("no room for b", |(a_orders, seed)| {
            let orbit = |m: u64| -> Vec<Q> {
                (1..=m)
                    .filter(|k| num_integer::gcd(*k, m) == 1)
                    .map(|k| Q::new(BigInt::from(k), BigInt::from(m)))
                    .collect()
            };
            let a: Vec<Q> = a_orders.iter().flat_map(|&m| orbit(m)).collect();
            let mut b: Vec<Q> = Vec::new();
            let mut s = seed;
            for m in 2..=12u64 {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let o = orbit(m);
                if !a_orders.contains(&m) && s >> 62 == 0 && b.len() + o.len() < a.len() {
                    b.extend(o);
                }
            }
            while b.len() < a.len() {
                b.push(Q::from_integer(BigInt::from(1)));
            }
            HGDatum::new(&a, &b).ok()
        })
}

fn any_datum() -> impl Strategy<Value = HGDatum> {
    (1usize..=4)
        .prop_flat_map(|r| {
            (
                prop::collection::vec((1i64..=11, 12i64..=12), r),
                prop::collection::vec((1i64..=12, 12i64..=12), r - 1),
            )
        })
        .prop_filter_map("invalid datum", |(a, b)| {
            let a: Vec<Q> = a.into_iter().map(|(n, d)| Q::new(n.into(), d.into())).collect();
            let mut b: Vec<Q> = b.into_iter().map(|(n, d)| Q::new(n.into(), d.into())).collect();
            b.push(Q::from_integer(1.into()));
            HGDatum::new(&a, &b).ok()
        })
}

fn agree_on_common_window(x: &RatSeries, y: &RatSeries) -> bool {
    let lo = x.offset().clone().min(y.offset().clone());
    let top_x = x.offset() + Q::from_integer(BigInt::from(x.order()));
    let top_y = y.offset() + Q::from_integer(BigInt::from(y.order()));
    let top = top_x.min(top_y);
    let mut e = lo;
    while e < top {
        if x.coeff_at(&e) != y.coeff_at(&e) {
            return false;
        }
        e += Q::from_integer(1.into());
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn operators_form_a_ring(a in small_op(), b in small_op(), c in small_op()) {
        prop_assert_eq!(op_multiply(&op_multiply(&a, &b), &c), op_multiply(&a, &op_multiply(&b, &c)));
        prop_assert_eq!(op_multiply(&a, &b.add(&c)), op_multiply(&a, &b).add(&op_multiply(&a, &c)));
        prop_assert_eq!(op_multiply(&a.add(&b), &c), op_multiply(&a, &c).add(&op_multiply(&b, &c)));
        prop_assert_eq!(op_multiply(&DiffOp::one(), &a), a.clone());
        prop_assert_eq!(op_multiply(&a, &DiffOp::one()), a.clone());
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn action_is_a_homomorphism(a in small_op(), b in small_op(), s in power_series(12)) {
        // applying the zero operator is a precondition error, checked below
        prop_assume!(!a.is_zero() && !b.is_zero());
        let ab = op_multiply(&a, &b).apply_with(&s, Exec::Sequential);
        let a_b = b.apply_with(&s, Exec::Sequential).and_then(|t| a.apply_with(&t, Exec::Sequential));
        prop_assert!(agree_on_common_window(&ab.unwrap(), &a_b.unwrap()));
    }

    #[test]
    fn zero_operator_is_rejected(s in power_series(4)) {
        prop_assert!(DiffOp::from_terms([]).apply_with(&s, Exec::Sequential).is_err());
    }

    #[test]
    fn parallel_and_sequential_actions_agree(a in small_op(), s in power_series(20)) {
        prop_assert_eq!(a.apply_with(&s, Exec::Sequential).ok(), a.apply_with(&s, Exec::Parallel).ok());
    }

    #[test]
    fn operator_text_round_trips(a in small_op()) {
        let back: DiffOp = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn hodge_vector_sums_to_rank(d in any_datum()) {
        let (w, h) = hgdef::hodge_numbers(&d);
        prop_assert_eq!(h.iter().sum::<usize>(), d.rank());
        prop_assert_eq!(h.len(), w + 1);
        prop_assert_eq!(hgdef::interlace_test(&d), w == 0);
    }

    #[test]
    fn gamma_vectors_re_expand(d in balanced_datum()) {
        let g = hgdef::gamma_vector(&d).unwrap();
        prop_assert!(hgdef::gamma_identity_holds(&d, &g).unwrap());
        prop_assert_eq!(g.gamma.iter().sum::<i64>(), 0);
    }

    #[test]
    fn json_round_trip_is_exact(d in any_datum(), s in power_series(6), op in small_op()) {
        let js = serde_json::to_string(&d).unwrap();
        let back: HGDatum = serde_json::from_str(&js).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), js);
        prop_assert_eq!(back, d.clone());

        let js = serde_json::to_string(&s).unwrap();
        let back: RatSeries = serde_json::from_str(&js).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), js);

        let js = serde_json::to_string(&op).unwrap();
        let back: DiffOp = serde_json::from_str(&js).unwrap();
        prop_assert_eq!(back, op);

        let r = hgdef::classify(&d);
        let js = serde_json::to_string(&r).unwrap();
        let back: hgdef::ClassificationReport = serde_json::from_str(&js).unwrap();
        prop_assert_eq!(back, r);

        let g = BivarPoly::from_terms(s.coeffs().iter().enumerate().map(|(n, c)| ((n as i64 - 2, 3 - n as i64), c.clone())));
        let js = serde_json::to_string(&g).unwrap();
        let back: BivarPoly = serde_json::from_str(&js).unwrap();
        prop_assert_eq!(back, g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn intervals_contain_exact_results(x in wide_rational(), y in wide_rational(), k in 1i64..1000, digits in 20u32..60) {
        let hx = HPReal::from_q(&x, digits);
        let hy = HPReal::from_q(&y, digits);
        prop_assert!(hx.contains(&x));
        prop_assert!((&hx + &hy).contains(&(&x + &y)));
        prop_assert!((&hx - &hy).contains(&(&x - &y)));
        prop_assert!((&hx * &hy).contains(&(&x * &y)));
        prop_assert!((-&hx).contains(&-x.clone()));
        prop_assert!(hx.div_int(&BigInt::from(k)).contains(&(&x / Q::from_integer(BigInt::from(k)))));
        prop_assert!(hx.mul_q(&y).contains(&(&x * &y)));
        let js = serde_json::to_string(&hx).unwrap();
        let back: HPReal = serde_json::from_str(&js).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), js);
        prop_assert!(back.contains(&x));
        if !x.is_zero() {
            prop_assert!(hx.abs_upper() >= x.abs());
        }
    }
}
