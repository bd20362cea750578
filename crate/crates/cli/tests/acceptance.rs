//! The eight acceptance criteria, each printed as one PASS or FAIL line.
//! All comparisons are exact.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;
use std::time::Instant;

use icard::bouquet::{chain, chain_family, mc_bouquet, parse_bouquet, Bouquet, Truth};
use icard::dmap::{build, selftest};
use icard::gl::{self, check_tree, check_tree_many, gamma_slice, parse_formula, prove, Formula, FormulaStreamPair, ProofResult, TreeModel};
use icard::ordinal::{add, compare, end_log, hyper_exp, hyper_log, left_subtract, parse_ordinal, random};
use icard::OrdTerm;
use icard_cli::{cmd_satisfy, Input, Options, Outcome};
use icard_oracles::cnf::Cnf4;
use icard_oracles::kripke::{all_trees, random_tree, valid_on, Tree};
use icard_oracles::modal::{self, enumerate, ALL, BASIS, F};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn o(s: &str) -> OrdTerm {
    parse_ordinal(s).unwrap()
}

fn ours(f: &F) -> Formula {
    parse_formula(&f.to_string()).unwrap()
}

fn tree_model(t: &Tree) -> TreeModel {
    serde_json::from_str(&t.json()).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ordinal_oracle() -> Verdict {
    let all = Cnf4::all(4);
    let terms: Vec<OrdTerm> = all.iter().map(|c| o(&c.text())).collect();
    for (x, t) in all.iter().zip(&terms) {
        ensure(end_log(t) == OrdTerm::nat(x.end_log()), || format!("end_log {}", x.text()))?;
    }
    let mut pairs = 0u64;
    for (x, tx) in all.iter().zip(&terms) {
        for (y, ty) in all.iter().zip(&terms) {
            ensure(compare(tx, ty) == x.cmp(y), || format!("compare {} {}", x.text(), y.text()))?;
            ensure(add(tx, ty) == o(&x.add(y).text()), || format!("add {} {}", x.text(), y.text()))?;
            pairs += 1;
        }
    }
    Ok(format!("{} ordinals, {pairs} pairs", all.len()))
}

fn identities() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 1000;
    for _ in 0..n {
        let (a, b, x) = (random::term(&mut rng, 3), random::term(&mut rng, 3), random::term(&mut rng, 3));
        ensure(hyper_exp(&add(&a, &b), &x) == hyper_exp(&a, &hyper_exp(&b, &x)), || format!("e^(a+b) a={a} b={b} x={x}"))?;
    }
    for _ in 0..n {
        let (xi, x) = (random::term(&mut rng, 3), random::term(&mut rng, 3));
        ensure(hyper_log(&xi, &hyper_exp(&xi, &x)) == x, || format!("l^xi e^xi xi={xi} x={x}"))?;
    }
    for _ in 0..n {
        let xi = random::term(&mut rng, 3);
        let zeta = add(&xi, &random::nonzero(&mut rng, 3));
        let x = random::term(&mut rng, 3);
        let d = left_subtract(&xi, &zeta).unwrap();
        ensure(hyper_log(&xi, &hyper_exp(&zeta, &x)) == hyper_exp(&d, &x), || format!("l^xi e^zeta xi={xi} zeta={zeta}"))?;
    }
    for _ in 0..n {
        let (a, b, x) = (random::term(&mut rng, 3), random::term(&mut rng, 3), random::term(&mut rng, 3));
        ensure(hyper_log(&add(&a, &b), &x) == hyper_log(&b, &hyper_log(&a, &x)), || format!("l^(a+b) a={a} b={b} x={x}"))?;
    }
    for _ in 0..n {
        let xi = random::nonzero(&mut rng, 3);
        let (g, d) = (random::term(&mut rng, 3), random::nonzero(&mut rng, 3));
        ensure(hyper_log(&xi, &add(&g, &d)) == hyper_log(&xi, &d), || format!("l^xi(g+d) xi={xi} g={g} d={d}"))?;
    }
    Ok(format!("5 identities x {n} instances"))
}

fn worked_example() -> Verdict {
    let x = o("e[w](w^(2)*3)");
    let a = hyper_log(&o("w+1"), &x);
    let b = hyper_log(&o("w+2"), &x);
    ensure(a == o("2") && b == o("0"), || format!("got {a} and {b}"))?;
    Ok(format!("l^(w+1) = {a}, l^(w+2) = {b}"))
}

fn gl_prover() -> Verdict {
    for s in ["[]([]p0->p0)->[]p0", "[]([]p1->p1)->[]p1", "[](p0->p1)->([]p0->[]p1)", "[](p1->[]p0)->([]p1->[][]p0)"] {
        ensure(prove(&parse_formula(s).unwrap(), gl::DEFAULT_BUDGET).unwrap().is_theorem(), || format!("{s} not proved"))?;
    }
    let dt = parse_formula("<>T").unwrap();
    let ProofResult::Countermodel { model } = prove(&dt, gl::DEFAULT_BUDGET).unwrap() else {
        return Err("<>T proved".into());
    };
    ensure(!check_tree(&model, model.root, &dt).unwrap(), || "<>T countermodel does not refute".into())?;

    let trees5 = all_trees(5, 1);
    let mut scope = enumerate(&[F::Var(0), F::Bot], &BASIS, 6, 2);
    scope.extend(enumerate(&[F::Var(0), F::Bot, F::Top], &ALL, 3, 2));
    let mut theorems = 0;
    for f in &scope {
        let proved = prove(&ours(f), gl::DEFAULT_BUDGET).unwrap().is_theorem();
        ensure(proved == valid_on(&trees5, f), || format!("disagreement on {f}"))?;
        theorems += proved as usize;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut fuzz_thm, mut fuzz_cm) = (0, 0);
    for _ in 0..500 {
        let size = rng.gen_range(1..12);
        let f = modal::random(&mut rng, size, 2);
        let phi = ours(&f);
        match prove(&phi, gl::DEFAULT_BUDGET).unwrap() {
            ProofResult::Theorem => {
                fuzz_thm += 1;
                for _ in 0..50 {
                    let t = random_tree(&mut rng, 6, 2);
                    ensure((0..t.len()).all(|i| t.holds(i, &f)), || format!("theorem {f} fails on {t:?}"))?;
                }
            }
            ProofResult::Countermodel { model } => {
                fuzz_cm += 1;
                ensure(!check_tree(&model, model.root, &phi).unwrap(), || format!("bad countermodel for {f}"))?;
            }
        }
    }
    Ok(format!(
        "{} exhaustive formulas ({theorems} theorems) on {} trees; fuzz {fuzz_thm} theorems, {fuzz_cm} countermodels",
        scope.len(),
        trees5.len()
    ))
}

fn kripke_coincidence() -> Verdict {
    let trees = all_trees(5, 2);
    let atoms = [F::Var(0), F::Var(1), F::Bot];
    let mut scope = enumerate(&atoms, &BASIS, 4, 3);
    let seen: HashSet<F> = scope.iter().cloned().collect();
    let extra: Vec<F> = enumerate(&atoms, &ALL, 2, 3).into_iter().filter(|f| !seen.contains(f)).collect();
    scope.extend(extra);
    let formulas: Vec<Formula> = scope.iter().map(ours).collect();
    let mut checks = 0u64;
    for t in &trees {
        let m = tree_model(t);
        let b = Bouquet::from_tree(&m).unwrap();
        let kripke = check_tree_many(&m, m.root, &formulas).unwrap();
        for ((phi, kt), f) in formulas.iter().zip(kripke).zip(&scope) {
            let mc = mc_bouquet(&b, &[], phi, 1).unwrap();
            let expect = if kt { Truth::True } else { Truth::False };
            ensure(mc == expect, || format!("{f} on {t:?}: mc {mc}, check_tree {kt}"))?;
            checks += 1;
        }
    }
    Ok(format!("{} trees x {} formulas = {checks} checks", trees.len(), formulas.len()))
}

fn certificate_bouquets() -> Vec<(&'static str, Arc<Bouquet>)> {
    let none = BTreeSet::new();
    vec![
        ("rank 0", Bouquet::leaf(0, none.clone())),
        ("rank 1", parse_bouquet(r#"{"id":0,"children":[{"id":1},{"id":2,"val":["p0"]}]}"#).unwrap()),
        ("rank 2", parse_bouquet(r#"{"id":0,"children":[{"id":1,"children":[{"id":2,"mult":"w"}]},{"id":3}]}"#).unwrap()),
        ("rank 3", chain(3, &none)),
        ("rank w", chain_family(0, 0)),
        (
            "rank w+1",
            parse_bouquet(
                r#"{"id":0,"children":[{"id":1,"family":{"schema":"chain","params":{"start":0}}},{"id":2,"mult":"w"}]}"#,
            )
            .unwrap(),
        ),
    ]
}

fn dmap_certificates() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut ranks, mut parts, mut ws, mut trips, mut specs) = (0, 0, 0, 0, 0);
    for lam in ["1", "w", "w^(2)", "w+1"] {
        for (name, b) in certificate_bouquets() {
            let s = build(&o(lam), &b).map_err(|e| format!("build {lam} {name}: {e}"))?.with_rank_checks(true);
            ensure(s.eval(&s.top).unwrap().is_empty(), || format!("top of {lam} {name} misses the root"))?;
            let r = selftest(&s, 500, 4, 8, &mut rng).map_err(|e| format!("{lam} {name}: {e}"))?;
            ensure(r.passed(), || format!("{lam} {name}: {:?}", r.failures))?;
            ensure(r.rank_checks >= 500 && r.roundtrips >= 1, || format!("{lam} {name}: too few checks"))?;
            ranks += r.rank_checks;
            parts += r.partition_checks;
            ws += r.w_checks;
            trips += r.roundtrips;
            specs += 1;
        }
    }
    ensure(parts > 0 && ws > 0, || "no partition or W checks ran".into())?;
    Ok(format!("{specs} d-maps: {ranks} rank, {parts} partition, {ws} W, {trips} round-trip checks"))
}

fn strong_completeness() -> Verdict {
    let s = FormulaStreamPair::named("diamond-chain").unwrap();
    let opts = Options { lambda: o("w"), prefix: 5, ..Options::default() };
    let Outcome::Satisfied(r) = cmd_satisfy(&Input::Stream(s.clone()), &opts).map_err(|e| e.to_string())? else {
        return Err("stream reported inconsistent".into());
    };
    let expect = hyper_exp(&o("w"), &o("w"));
    ensure(r.witness == expect, || format!("witness {} is not {expect}", r.witness))?;
    ensure(r.theta == o("w"), || format!("theta {}", r.theta))?;
    for i in 0..5 {
        let n = gamma_slice(&s, i).unwrap().len();
        let ok = r.checks.iter().filter(|c| c.slice == Some(i) && c.passed).count();
        ensure(ok == n, || format!("slice {i}: {ok} of {n} verified"))?;
    }
    ensure(hyper_log(&o("w"), &r.witness) == o("w") && r.certificate.root_rank_ok, || "root rank".into())?;
    ensure(r.passed(), || format!("certificate failures {:?}", r.certificate.selftest.failures))?;
    Ok(format!("witness {} = e^w(w), 5 slices verified, l^w = {}", r.witness, r.certificate.root_rank))
}

fn satisfied_at_default(gamma: Vec<Formula>, seed: u64) -> Result<OrdTerm, String> {
    let Outcome::Satisfied(r) =
        cmd_satisfy(&Input::Finite(gamma.clone()), &Options { seed, ..Options::default() }).map_err(|e| e.to_string())?
    else {
        return Err(format!("consistent set reported inconsistent: {gamma:?}"));
    };
    let bound = hyper_exp(&OrdTerm::one(), &r.theta);
    ensure(r.witness <= bound, || format!("witness {} above e({})", r.witness, r.theta))?;
    ensure(r.passed(), || format!("verification failed for {:?}", r.formulas))?;
    let model_rank = OrdTerm::nat(r.model_rank.unwrap() as u64);
    ensure(r.theta <= model_rank, || format!("theta {} above model rank {model_rank}", r.theta))?;
    Ok(r.theta)
}

fn default_lambda() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut sets, mut deep) = (0u64, 0);
    while sets < 50 {
        let size = rng.gen_range(2..9);
        let f = modal::random(&mut rng, size, 2);
        let ProofResult::Countermodel { model } = prove(&ours(&f), gl::DEFAULT_BUDGET).unwrap() else {
            continue;
        };
        let mut gamma = vec![Formula::negate(ours(&f))];
        for _ in 0..rng.gen_range(0..4) {
            let size = rng.gen_range(1..7);
            let g = ours(&modal::random(&mut rng, size, 2));
            if check_tree(&model, model.root, &g).unwrap() {
                gamma.push(g);
            }
        }
        deep += (satisfied_at_default(gamma, sets)? >= OrdTerm::nat(2)) as usize;
        sets += 1;
    }
    let towers = [
        vec!["<><>T"],
        vec!["<><><>p0", "[]~p1"],
        vec!["<>(p0 & <>(p1 & <>~p0))", "<>[]F"],
        vec!["<><><><>T", "<>(p0 & []F)", "~[]<>p1"],
        vec!["<>(p0 & <>(~p0 & <>(p0 & <>~p0)))", "[](p1 -> p0)"],
    ];
    for (i, t) in towers.iter().enumerate() {
        let gamma = t.iter().map(|s| parse_formula(s).unwrap()).collect();
        let theta = satisfied_at_default(gamma, 100 + i as u64)?;
        ensure(theta >= OrdTerm::nat(2), || format!("{t:?}: theta {theta} below 2"))?;
        deep += 1;
        sets += 1;
    }
    Ok(format!("{sets} sets verified, {deep} with theta >= 2"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("ordinal oracle equivalence", ordinal_oracle),
        ("algebraic identity suite", identities),
        ("worked example fragment", worked_example),
        ("GL prover", gl_prover),
        ("bouquet/Kripke coincidence", kripke_coincidence),
        ("d-map certificates", dmap_certificates),
        ("strong-completeness demo", strong_completeness),
        ("default lambda = 1", default_lambda),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|n| n != i + 1) {
            continue;
        }
        let start = Instant::now();
        let v = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match v {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    let ran = only.map_or(criteria.len(), |_| 1);
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
