use std::sync::Arc;

use icard::gl::{check_tree, parse_formula, prove, Formula, ProofResult, TreeModel, DEFAULT_BUDGET};
use icard_oracles::kripke::{all_trees, random_tree, valid_on, Tree};
use icard_oracles::modal::{enumerate, Conn, BASIS, F};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ours(f: &F) -> Formula {
    parse_formula(&f.to_string()).unwrap()
}

fn tree_model(t: &Tree) -> TreeModel {
    serde_json::from_str(&t.json()).unwrap()
}

fn formula(vars: u32) -> impl Strategy<Value = F> {
    let leaf = prop_oneof![Just(F::Bot), Just(F::Top), (0..vars).prop_map(F::Var)];
    leaf.prop_recursive(5, 16, 2, |inner| {
        let r = |f: F| Arc::new(f);
        prop_oneof![
            inner.clone().prop_map(move |a| F::Not(r(a))),
            inner.clone().prop_map(move |a| F::Box(r(a))),
            inner.clone().prop_map(move |a| F::Dia(r(a))),
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| F::And(r(a), r(b))),
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| F::Or(r(a), r(b))),
            (inner.clone(), inner).prop_map(move |(a, b)| F::Imp(r(a), r(b))),
        ]
    })
}

#[test]
fn axiom_instances() {
    for s in ["[]([]p0->p0)->[]p0", "[](p0->p1)->[]p0->[]p1", "[]p0->[][]p0", "<>p0 -> <>(p0 & []~p0)"] {
        assert!(prove(&parse_formula(s).unwrap(), DEFAULT_BUDGET).unwrap().is_theorem(), "{s}");
    }
    for s in ["<>T", "[]p0->p0", "[]F", "<>p0 -> <>(p0 & []~p0) -> F"] {
        match prove(&parse_formula(s).unwrap(), DEFAULT_BUDGET).unwrap() {
            ProofResult::Theorem => panic!("{s} is not a theorem"),
            ProofResult::Countermodel { model } => assert!(!check_tree(&model, model.root, &parse_formula(s).unwrap()).unwrap()),
        }
    }
}

#[test]
fn exhaustive_basis_formulas() {
    let trees = all_trees(5, 1);
    let fs = enumerate(&[F::Var(0), F::Bot], &BASIS, 5, 2);
    for f in &fs {
        let valid = valid_on(&trees, f);
        match prove(&ours(f), DEFAULT_BUDGET).unwrap() {
            ProofResult::Theorem => assert!(valid, "{f} proved but refuted on a small tree"),
            ProofResult::Countermodel { model } => {
                assert!(!valid, "{f} valid on trees up to 5 nodes but got countermodel {model:?}");
            }
        }
    }
}

#[test]
fn exhaustive_full_connectives() {
    let trees = all_trees(4, 1);
    let conns = [Conn::Not, Conn::And, Conn::Or, Conn::Imp, Conn::Box, Conn::Dia];
    for f in enumerate(&[F::Var(0), F::Bot, F::Top], &conns, 3, 3) {
        assert_eq!(prove(&ours(&f), DEFAULT_BUDGET).unwrap().is_theorem(), valid_on(&trees, &f), "{f}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn verdicts_are_sound(f in formula(2), seed in any::<u64>()) {
        let phi = ours(&f);
        match prove(&phi, DEFAULT_BUDGET).unwrap() {
            ProofResult::Theorem => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..30 {
                    let t = random_tree(&mut rng, 6, 2);
                    prop_assert!((0..t.len()).all(|i| t.holds(i, &f)), "{} fails on {:?}", f, t);
                    prop_assert!(check_tree(&tree_model(&t), 0, &phi).unwrap());
                }
            }
            ProofResult::Countermodel { model } => {
                prop_assert!(!check_tree(&model, model.root, &phi).unwrap());
            }
        }
    }

    #[test]
    fn check_tree_matches_oracle(f in formula(2), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tree(&mut rng, 7, 2);
        let m = tree_model(&t);
        for i in 0..t.len() {
            prop_assert_eq!(check_tree(&m, i, &ours(&f)).unwrap(), t.holds(i, &f));
        }
    }
}
