use icard::ordinal::{add, hyper_exp, hyper_log, parse_ordinal, random};
use icard::topology::{
    basic_nbhd_member, converging_sequence, interval_member, shrink_nbhd, shrunk_member, split_lambda, BasicNbhd,
    IcardInterval, SimpleFn,
};
use icard::OrdTerm;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn o(s: &str) -> OrdTerm {
    parse_ordinal(s).unwrap()
}

const LAMBDAS: [&str; 5] = ["1", "w", "w+1", "w^(2)", "w+w"];

#[test]
fn shrunk_neighbourhoods_are_inside() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for lam in LAMBDAS {
        let lambda = o(lam);
        let (_, tail, _) = split_lambda(&lambda).unwrap();
        for _ in 0..60 {
            let theta = random::nonzero(&mut rng, 3);
            let x = hyper_exp(&lambda, &theta);
            let mut r = SimpleFn::new();
            for _ in 0..rng.gen_range(0..3) {
                let lvl = if lambda.is_one() { OrdTerm::zero() } else { OrdTerm::nat(rng.gen_range(0..3)) };
                let cap = hyper_log(&lvl, &x);
                let thr = random::term(&mut rng, 2);
                if thr < cap && lvl < lambda {
                    r.insert(lvl, thr);
                }
            }
            let (eta, gamma) = shrink_nbhd(&lambda, &theta, &r).unwrap();
            let b = BasicNbhd::new(x.clone(), r).unwrap();
            let top = hyper_exp(&tail, &theta);
            for _ in 0..20 {
                let v = add(&eta, &random::nonzero(&mut rng, 2));
                let y = hyper_exp(&gamma, &v);
                if shrunk_member(&y, &x, &eta, &gamma, &top) {
                    assert!(basic_nbhd_member(&y, &b), "lambda {lam} theta {theta} y {y}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100, "only {checked} members sampled");
}

#[test]
fn converging_sequences_increase_to_their_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for lam in LAMBDAS {
        let lambda = o(lam);
        for _ in 0..30 {
            let theta = random::term(&mut rng, 2);
            let limit = hyper_exp(&lambda, &theta.succ());
            let xs: Vec<OrdTerm> = (1..12).map(|n| converging_sequence(&lambda, &theta, n).unwrap()).collect();
            assert!(xs.windows(2).all(|w| w[0] < w[1]), "lambda {lam} theta {theta}");
            assert!(xs.iter().all(|x| *x < limit));
            let y = hyper_exp(&lambda, &theta);
            assert!((1..200).any(|n| converging_sequence(&lambda, &theta, n).unwrap() > y));
        }
    }
}

#[test]
fn interval_membership_is_a_log_window() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..300 {
        let level = random::term(&mut rng, 2);
        let lo = random::term(&mut rng, 2);
        let hi = add(&lo, &random::nonzero(&mut rng, 2));
        let iv = IcardInterval::new(Some(lo.clone()), hi.clone(), level.clone()).unwrap();
        assert_eq!(IcardInterval::parse(&iv.to_string()).unwrap(), iv);
        let x = random::term(&mut rng, 3);
        let v = hyper_log(&level, &x);
        assert_eq!(interval_member(&x, &iv), lo < v && v <= hi);
    }
}
