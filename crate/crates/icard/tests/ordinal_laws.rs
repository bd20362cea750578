use icard::ordinal::{
    add, compare, end_log, fund_seq, hnf_decompose, hyper_exp, hyper_log, left_subtract, omega_power, parse_ordinal,
};
use icard::OrdTerm;
use icard_oracles::cnf::Cnf4;
use proptest::prelude::*;

fn o(s: &str) -> OrdTerm {
    parse_ordinal(s).unwrap()
}

fn term() -> impl Strategy<Value = OrdTerm> {
    let leaf = prop_oneof![Just(OrdTerm::zero()), (1u64..4).prop_map(OrdTerm::nat), Just(OrdTerm::omega())];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| add(&a, &b)),
            (inner.clone(), inner.clone()).prop_map(|(a, x)| hyper_exp(&a, &x)),
            inner.prop_map(|x| omega_power(&x)),
        ]
    })
}

fn nonzero() -> impl Strategy<Value = OrdTerm> {
    term().prop_map(|t| if t.is_zero() { OrdTerm::one() } else { t })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_parse_roundtrip(x in term()) {
        prop_assert_eq!(parse_ordinal(&x.to_string()).unwrap(), x);
    }

    #[test]
    fn order_is_total_and_transitive(x in term(), y in term(), z in term()) {
        prop_assert_eq!(compare(&x, &y), compare(&y, &x).reverse());
        prop_assert_eq!(compare(&x, &y).is_eq(), x == y);
        if x <= y && y <= z {
            prop_assert!(x <= z);
        }
    }

    #[test]
    fn addition_laws(x in term(), y in term(), z in term()) {
        prop_assert_eq!(add(&add(&x, &y), &z), add(&x, &add(&y, &z)));
        prop_assert_eq!(add(&x, &OrdTerm::zero()), x.clone());
        prop_assert_eq!(add(&OrdTerm::zero(), &x), x.clone());
        if y < z {
            prop_assert!(add(&x, &y) < add(&x, &z));
        }
        prop_assert!(add(&x, &y) >= y);
    }

    #[test]
    fn left_subtraction(a in term(), b in term()) {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        prop_assert_eq!(add(&a, &left_subtract(&a, &b).unwrap()), b);
    }

    #[test]
    fn hyper_exp_laws(a in term(), b in term(), x in term(), y in term()) {
        prop_assert_eq!(hyper_exp(&OrdTerm::zero(), &x), x.clone());
        prop_assert_eq!(hyper_exp(&a, &OrdTerm::zero()), OrdTerm::zero());
        prop_assert_eq!(hyper_exp(&a, &hyper_exp(&b, &x)), hyper_exp(&add(&a, &b), &x));
        if x < y {
            prop_assert!(hyper_exp(&a, &x) < hyper_exp(&a, &y));
        }
    }

    #[test]
    fn cancellation(a in term(), b in term(), x in term()) {
        prop_assert_eq!(hyper_log(&a, &hyper_exp(&a, &x)), x.clone());
        if a < b {
            let d = left_subtract(&a, &b).unwrap();
            prop_assert_eq!(hyper_log(&a, &hyper_exp(&b, &x)), hyper_exp(&d, &x));
        }
    }

    #[test]
    fn log_tail_and_composition(xi in nonzero(), g in term(), d in nonzero(), a in term(), b in term(), x in term()) {
        prop_assert_eq!(hyper_log(&xi, &add(&g, &d)), hyper_log(&xi, &d));
        prop_assert_eq!(hyper_log(&add(&a, &b), &x), hyper_log(&b, &hyper_log(&a, &x)));
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(hyper_log(&hi, &x) <= hyper_log(&lo, &x));
    }

    #[test]
    fn normal_form_decomposition(x in nonzero()) {
        let (a, b) = hnf_decompose(&x).unwrap();
        prop_assert_eq!(hyper_exp(&a, &b), x);
        prop_assert!(b.is_one() || !b.is_indecomposable());
        prop_assert_eq!(hnf_decompose(&hyper_exp(&a, &b)).unwrap(), (a, b));
    }

    #[test]
    fn fundamental_sequences(x in nonzero(), y in term()) {
        prop_assume!(x.is_limit());
        let terms: Vec<OrdTerm> = (0..6).map(|n| fund_seq(&x, n).unwrap()).collect();
        prop_assert!(terms.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(terms.iter().all(|t| *t < x));
        if y < x {
            prop_assert!((0..10_000).any(|n| fund_seq(&x, n).unwrap() > y));
        }
    }

    #[test]
    fn exponential_limit_bound(xi in term(), n in 0u64..6) {
        let lam = OrdTerm::omega();
        let eta = OrdTerm::nat(n);
        let lhs = hyper_exp(&eta, &add(&hyper_exp(&lam, &xi), &eta.succ()));
        prop_assert!(lhs < hyper_exp(&lam, &xi.succ()));
    }
}

#[test]
fn epsilon_fixed_points() {
    for a in ["0", "1", "w", "w^(2)+w^(2)+w^(2)"] {
        let x = hyper_exp(&o("w"), &add(&OrdTerm::one(), &o(a)));
        assert_eq!(omega_power(&x), x, "a = {a}");
    }
}

#[test]
fn cnf_oracle_agreement() {
    let all = Cnf4::all(4);
    let terms: Vec<OrdTerm> = all.iter().map(|c| o(&c.text())).collect();
    let mut pairs = 0;
    for (i, x) in all.iter().enumerate().step_by(7) {
        assert_eq!(end_log(&terms[i]), OrdTerm::nat(x.end_log()));
        for (j, y) in all.iter().enumerate().step_by(5) {
            assert_eq!(compare(&terms[i], &terms[j]), x.cmp(y));
            assert_eq!(add(&terms[i], &terms[j]), o(&x.add(y).text()));
            pairs += 1;
        }
    }
    assert!(pairs > 10_000);
}
