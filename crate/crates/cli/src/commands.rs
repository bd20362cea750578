use std::collections::BTreeSet;
use std::sync::Arc;

use icard::bouquet::{self, materialize, mc_bouquet, parse_bouquet, Bouquet};
use icard::dmap::{self, Step};
use icard::gl::{self, characteristic_bound, check_tree, parse_formula, Formula, FormulaStreamPair, ProofResult, TreeModel};
use icard::ordinal::{add, compare, fund_seq, hyper_exp, hyper_log, parse_ordinal};
use icard::{Error, OrdTerm, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{BouquetCmd, Cli, Command, Dmap, DmapTarget, Gl, NodePath, Ord, SatisfyArgs};
use crate::satisfy::{cmd_satisfy, Input, Options, Outcome};

/// Rendered command result.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub code: i32,
    pub text: String,
    pub json: Value,
}

impl Output {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Output { code: 0, text: text.into(), json }
    }

    fn negative(text: impl Into<String>, json: Value) -> Self {
        Output { code: 1, text: text.into(), json }
    }

    fn verdict(positive: bool, text: impl Into<String>, json: Value) -> Self {
        if positive {
            Self::ok(text, json)
        } else {
            Self::negative(text, json)
        }
    }

    /// The text printed for the chosen output format.
    pub fn render(&self, json: bool) -> String {
        if json {
            serde_json::to_string_pretty(&self.json).expect("JSON values serialize")
        } else {
            self.text.clone()
        }
    }
}

/// 2 for usage, input and budget errors, 3 for internal-consistency errors.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Syntax { .. } | Error::Domain(_) | Error::Input(_) | Error::Budget(_) | Error::Integrity(_) => 2,
        Error::Internal(_) => 3,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Syntax { .. } => "syntax",
        Error::Domain(_) => "domain",
        Error::Input(_) => "input",
        Error::Budget(_) => "budget",
        Error::Integrity(_) => "integrity",
        Error::Internal(_) => "internal",
    }
}

pub fn run(cli: &Cli) -> Output {
    match dispatch(cli) {
        Ok(o) => o,
        Err(e) => Output {
            code: exit_code(&e),
            text: format!("error: {e}"),
            json: json!({"error": error_kind(&e), "message": e.to_string()}),
        },
    }
}

fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Ord(c) => cmd_ord(c),
        Command::Gl(c) => cmd_gl(c, cli.budget),
        Command::Bouquet(c) => cmd_bouquet(c),
        Command::Dmap(c) => cmd_dmap(c, cli.seed),
        Command::Satisfy(a) => satisfy(a, cli),
    }
}

fn ord(s: &str) -> Result<OrdTerm> {
    parse_ordinal(s)
}

fn formulas(items: &[String]) -> Result<Vec<Formula>> {
    items.iter().map(|s| parse_formula(s)).collect()
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{path}: {e}")))
}

fn value(t: &OrdTerm) -> Output {
    Output::ok(t.to_string(), json!({"value": t}))
}

fn cmd_ord(c: &Ord) -> Result<Output> {
    Ok(match c {
        Ord::Eval { expr } => value(&ord(expr)?),
        Ord::Cmp { a, b } => {
            let o = compare(&ord(a)?, &ord(b)?);
            let (sym, name) = match o {
                std::cmp::Ordering::Less => ("<", "less"),
                std::cmp::Ordering::Equal => ("=", "equal"),
                std::cmp::Ordering::Greater => (">", "greater"),
            };
            Output::ok(sym, json!({"order": name}))
        }
        Ord::Add { a, b } => value(&add(&ord(a)?, &ord(b)?)),
        Ord::Log { x, level } => value(&hyper_log(&ord(level)?, &ord(x)?)),
        Ord::Exp { x, level } => value(&hyper_exp(&ord(level)?, &ord(x)?)),
        Ord::Fundseq { x, count } => {
            let x = ord(x)?;
            let terms = (0..*count).map(|n| fund_seq(&x, n)).collect::<Result<Vec<_>>>()?;
            let text = terms.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("\n");
            Output::ok(text, json!({"terms": terms}))
        }
    })
}

fn model_text(m: &TreeModel) -> String {
    serde_json::to_string(m).expect("tree models serialize")
}

fn cmd_gl(c: &Gl, budget: usize) -> Result<Output> {
    Ok(match c {
        Gl::Prove { formula } => {
            let phi = parse_formula(formula)?;
            match gl::prove(&phi, budget)? {
                ProofResult::Theorem => Output::ok("theorem", json!(ProofResult::Theorem)),
                r @ ProofResult::Countermodel { .. } => {
                    let ProofResult::Countermodel { model } = &r else { unreachable!() };
                    Output::negative(format!("countermodel\n{}", model_text(model)), json!(r))
                }
            }
        }
        Gl::Model { formulas: fs } => {
            let gamma = formulas(fs)?;
            match gl::satisfy(&gamma, budget)? {
                Some(m) => Output::ok(model_text(&m), json!({"satisfiable": true, "model": m})),
                None => Output::negative("unsatisfiable", json!({"satisfiable": false})),
            }
        }
        Gl::Check { formula, model, node } => {
            let phi = parse_formula(formula)?;
            let m: TreeModel =
                serde_json::from_str(&read(model)?).map_err(|e| Error::Input(format!("tree model JSON: {e}")))?;
            let id = node.unwrap_or(m.root);
            let v = check_tree(&m, id, &phi)?;
            Output::verdict(v, v.to_string(), json!({"node": id, "value": v}))
        }
        Gl::Consistent { formulas: fs, char_cap } => {
            let gamma = formulas(fs)?;
            let v = gl::consistent(&gamma, budget)?;
            let mut j = json!({"consistent": v});
            let mut text = String::from(if v { "consistent" } else { "inconsistent" });
            if let (true, Some(cap)) = (v, char_cap) {
                let b = characteristic_bound(&gamma, *cap, budget)?;
                text.push_str(&format!("\ncharacteristic {b}"));
                j["characteristic"] = json!(b.to_string());
            }
            Output::verdict(v, text, j)
        }
    })
}

/// Daughter positions for a node path given by ids or positions.
pub fn resolve_path(b: &Arc<Bouquet>, p: &NodePath) -> Result<Vec<usize>> {
    let items: Vec<usize> = p
        .path
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Input(format!("bad path entry {s:?}"))))
        .collect::<Result<_>>()?;
    if p.positions {
        b.resolve(&items)?;
        return Ok(items);
    }
    let mut node = b.clone();
    let mut out = Vec::new();
    for id in items {
        let bound = node.daughter_count().unwrap_or(bouquet::DEFAULT_SEARCH_BUDGET);
        let mut found = None;
        for pos in 0..bound {
            let d = node.daughter(pos)?;
            if d.id == id as u64 {
                found = Some((pos, d));
                break;
            }
        }
        let (pos, d) = found.ok_or_else(|| Error::Input(format!("node {} has no daughter with id {id}", node.id)))?;
        out.push(pos);
        node = d;
    }
    Ok(out)
}

fn cmd_bouquet(c: &BouquetCmd) -> Result<Output> {
    Ok(match c {
        BouquetCmd::Rank { file } => value(parse_bouquet(&read(&file.bouquet)?)?.rank()),
        BouquetCmd::Mc { formula, file, node, prefix } => {
            let b = parse_bouquet(&read(&file.bouquet)?)?;
            let path = resolve_path(&b, node)?;
            let t = mc_bouquet(&b, &path, &parse_formula(formula)?, *prefix)?;
            Output::verdict(t.value(), t.to_string(), json!({"path": path, "truth": t}))
        }
        BouquetCmd::Materialize { file, prefix } => {
            let b = materialize(&parse_bouquet(&read(&file.bouquet)?)?, *prefix)?;
            let j = bouquet::bouquet_to_json(&b);
            Output::ok(serde_json::to_string(&j).expect("JSON values serialize"), j)
        }
    })
}

fn target(t: &DmapTarget) -> Result<(Arc<Bouquet>, dmap::DMapSpec)> {
    let b = parse_bouquet(&read(&t.file.bouquet)?)?;
    let s = dmap::build(&ord(&t.lambda)?, &b)?;
    Ok((b, s))
}

fn step_text(s: &Step) -> String {
    serde_json::to_string(s).expect("steps serialize")
}

fn cmd_dmap(c: &Dmap, seed: u64) -> Result<Output> {
    Ok(match c {
        Dmap::Eval { target: t, xi, trace } => {
            let (_, s) = target(t)?;
            let tr = s.eval_traced(&ord(xi)?, *trace)?;
            let node = tr.node.as_ref().map(|n| n.id);
            let mut text = match node {
                Some(id) => format!("{id}"),
                None => String::from("?"),
            };
            text.push_str(&format!(" (path {:?})", tr.path));
            for st in &tr.steps {
                text.push_str(&format!("\n  {}", step_text(st)));
            }
            Output::ok(text, json!({"node": node, "path": tr.path, "steps": tr.steps}))
        }
        Dmap::Witness { target: t, node } => {
            let (b, s) = target(t)?;
            let path = resolve_path(&b, node)?;
            let w = s.preimage_witness(&path)?;
            Output::ok(w.to_string(), json!({"path": path, "witness": w}))
        }
        Dmap::Selftest { target: t, samples, depth, prefix } => {
            let (_, s) = target(t)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = dmap::selftest(&s, *samples, *depth, *prefix, &mut rng)?;
            let text = format!(
                "lambda {} theta {} top {}\nrank checks {}\npartition checks {}\nW checks {}\nround-trips {}\nopenness checks {}\nfailures {}",
                r.lambda,
                r.theta,
                r.top,
                r.rank_checks,
                r.partition_checks,
                r.w_checks,
                r.roundtrips,
                r.openness_checks,
                r.failures.len()
            ) + &r.failures.iter().map(|f| format!("\n  {f}")).collect::<String>();
            let code = if r.passed() { 0 } else { 3 };
            Output { code, text, json: json!(r) }
        }
    })
}

fn variables(s: &str) -> Result<BTreeSet<u32>> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.strip_prefix('p')
                .and_then(|k| k.parse().ok())
                .ok_or_else(|| Error::Input(format!("bad variable name {v:?}")))
        })
        .collect()
}

fn satisfy(a: &SatisfyArgs, cli: &Cli) -> Result<Output> {
    let root = variables(&a.root)?;
    let input = match (&a.stream, &a.psi, &a.phi) {
        (Some(name), _, _) => {
            let mut s = FormulaStreamPair::named(name).ok_or_else(|| Error::Input(format!("unknown stream {name:?}")))?;
            s.root_literals = root;
            Input::Stream(s)
        }
        (None, Some(psi), Some(phi)) => Input::Stream(FormulaStreamPair::from_templates("custom", psi, phi, root)?),
        _ => Input::Finite(formulas(&a.formulas)?),
    };
    let opts = Options {
        lambda: ord(&a.lambda)?,
        prefix: a.prefix,
        budget: cli.budget,
        samples: a.samples,
        depth: a.depth,
        seed: cli.seed,
        ambient: a.ambient.as_deref().map(ord).transpose()?,
        ..Options::default()
    };
    let out = cmd_satisfy(&input, &opts)?;
    Ok(match &out {
        Outcome::Inconsistent(r) => {
            let mut text = String::from("inconsistent");
            if let Some(i) = r.slice {
                text.push_str(&format!(" at slice {i}"));
            }
            text.push_str(&format!("\ntheorem: {}", r.theorem));
            Output::negative(text, json!(out))
        }
        Outcome::Satisfied(r) => {
            let mut text = format!("theta {}\nlambda {}\nwitness {}\n", r.theta, r.lambda, r.witness);
            for c in &r.checks {
                let at = c.slice.map(|i| format!(" [slice {i}]")).unwrap_or_default();
                text.push_str(&format!("{} {}{at}: {}\n", if c.passed { "ok  " } else { "FAIL" }, c.formula, c.bouquet));
            }
            let st = &r.certificate.selftest;
            text.push_str(&format!(
                "root rank {} ({})\nrank checks {}, round-trips {}, failures {}",
                r.certificate.root_rank,
                if r.certificate.root_rank_ok { "ok" } else { "mismatch" },
                st.rank_checks,
                st.roundtrips,
                st.failures.len()
            ));
            if let Some(n) = &r.ambient {
                text.push_str(&format!(
                    "\ne^lambda(w) = {} {} ambient {}",
                    n.bound,
                    if n.holds { "<" } else { ">=" },
                    n.ambient
                ));
            }
            let code = if r.passed() { 0 } else { 3 };
            Output { code, text, json: json!(out) }
        }
    })
}
