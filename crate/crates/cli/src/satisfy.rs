//! From a formula set to an ordinal witness point with certificates.

use std::sync::Arc;

use icard::bouquet::{mc_bouquet, satisfy_stream_prefix, Bouquet, Truth};
use icard::dmap::{self, SelfTestReport};
use icard::gl::{self, check_tree, gamma_slice, Formula, FormulaStreamPair, TreeModel};
use icard::ordinal::{hyper_exp, hyper_log};
use icard::par::Mode;
use icard::{Error, OrdTerm, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug)]
pub enum Input {
    Finite(Vec<Formula>),
    Stream(FormulaStreamPair),
}

#[derive(Clone, Debug)]
pub struct Options {
    pub lambda: OrdTerm,
    /// Stream prefix, and the prefix budget for model checking.
    pub prefix: usize,
    pub budget: usize,
    pub samples: usize,
    pub depth: usize,
    pub seed: u64,
    pub ambient: Option<OrdTerm>,
    pub mode: Mode,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            lambda: OrdTerm::one(),
            prefix: 5,
            budget: gl::DEFAULT_BUDGET,
            samples: 32,
            depth: 3,
            seed: 0,
            ambient: None,
            mode: Mode::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FormulaCheck {
    pub formula: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice: Option<usize>,
    /// Daughter positions from the bouquet root.
    pub node: Vec<usize>,
    pub bouquet: Truth,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree: Option<bool>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub top_maps_to_root: bool,
    /// `ℓ^λ` of the witness.
    pub root_rank: OrdTerm,
    pub root_rank_ok: bool,
    pub selftest: SelfTestReport,
}

/// Whether `e^λ ω` lies below a chosen ambient ordinal.
#[derive(Clone, Debug, Serialize)]
pub struct AmbientNote {
    pub ambient: OrdTerm,
    pub bound: OrdTerm,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub formulas: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stream: Option<String>,
    pub lambda: OrdTerm,
    pub theta: OrdTerm,
    pub witness: OrdTerm,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_rank: Option<usize>,
    pub checks: Vec<FormulaCheck>,
    pub certificate: Certificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ambient: Option<AmbientNote>,
    pub bouquet: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<TreeModel>,
}

impl WitnessReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
            && self.certificate.top_maps_to_root
            && self.certificate.root_rank_ok
            && self.certificate.selftest.passed()
    }
}

/// An inconsistent input: the negated conjunction is a GL theorem.
#[derive(Clone, Debug, Serialize)]
pub struct Refutation {
    pub formulas: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice: Option<usize>,
    pub theorem: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Outcome {
    Satisfied(Box<WitnessReport>),
    Inconsistent(Refutation),
}

pub fn cmd_satisfy(input: &Input, opts: &Options) -> Result<Outcome> {
    if opts.lambda.is_zero() {
        return Err(Error::Domain("lambda must be positive".into()));
    }
    match input {
        Input::Finite(gamma) => finite(gamma, opts),
        Input::Stream(s) => stream(s, opts),
    }
}

fn refute(gamma: &[Formula], slice: Option<usize>, budget: usize) -> Result<Outcome> {
    let neg = Formula::negate(Formula::conj(gamma));
    if !gl::prove(&neg, budget)?.is_theorem() {
        return Err(Error::Internal(format!("no model found, yet {neg} is not a theorem")));
    }
    Ok(Outcome::Inconsistent(Refutation {
        formulas: gamma.iter().map(|f| f.to_string()).collect(),
        slice,
        theorem: neg.to_string(),
    }))
}

fn finite(gamma: &[Formula], opts: &Options) -> Result<Outcome> {
    let Some(model) = gl::satisfy(gamma, opts.budget)? else {
        return refute(gamma, None, opts.budget);
    };
    let b = Bouquet::from_tree(&model)?;
    let model_rank = model.rank()?;
    if *b.rank() != OrdTerm::nat(model_rank as u64) {
        return Err(Error::Internal(format!("bouquet rank {} differs from tree rank {model_rank}", b.rank())));
    }
    let mut checks = Vec::new();
    for f in gamma {
        let t = mc_bouquet(&b, &[], f, opts.prefix)?;
        let tree = check_tree(&model, model.root, f)?;
        checks.push(FormulaCheck {
            formula: f.to_string(),
            slice: None,
            node: Vec::new(),
            bouquet: t,
            tree: Some(tree),
            passed: t == Truth::True && tree,
        });
    }
    let mut r = report(&b, checks, opts)?;
    r.formulas = gamma.iter().map(|f| f.to_string()).collect();
    r.model_rank = Some(model_rank);
    r.model = Some(model);
    Ok(Outcome::Satisfied(Box::new(r)))
}

fn stream(s: &FormulaStreamPair, opts: &Options) -> Result<Outcome> {
    for i in 0..opts.prefix {
        let g = gamma_slice(s, i)?;
        if !gl::consistent(&g, opts.budget)? {
            return refute(&g, Some(i), opts.budget);
        }
    }
    let b = satisfy_stream_prefix(s, opts.prefix, opts.budget)?;
    let family = b.family.as_ref().ok_or_else(|| Error::Internal("stream bouquet without a family".into()))?;
    let mut checks = Vec::new();
    let mut formulas = Vec::new();
    for i in 0..opts.prefix {
        let member = family.member(i)?;
        let pos = position_of(&b, &member)?;
        for f in gamma_slice(s, i)? {
            let t = mc_bouquet(&b, &[pos], &f, opts.prefix)?;
            formulas.push(f.to_string());
            checks.push(FormulaCheck {
                formula: f.to_string(),
                slice: Some(i),
                node: vec![pos],
                bouquet: t,
                tree: None,
                passed: t == Truth::True,
            });
        }
    }
    let mut r = report(&b, checks, opts)?;
    r.formulas = formulas;
    r.stream = Some(s.name.clone());
    Ok(Outcome::Satisfied(Box::new(r)))
}

fn position_of(b: &Arc<Bouquet>, target: &Arc<Bouquet>) -> Result<usize> {
    let bound = b.daughter_count().unwrap_or(icard::bouquet::DEFAULT_SEARCH_BUDGET);
    (0..bound)
        .find_map(|p| match b.daughter(p) {
            Ok(d) if Arc::ptr_eq(&d, target) => Some(Ok(p)),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        })
        .unwrap_or_else(|| Err(Error::Internal("generated child not found among the daughters".into())))
}

fn report(b: &Arc<Bouquet>, checks: Vec<FormulaCheck>, opts: &Options) -> Result<WitnessReport> {
    let theta = b.rank().clone();
    let spec = dmap::build(&opts.lambda, b)?;
    let witness = hyper_exp(&opts.lambda, &theta);
    if witness != spec.top {
        return Err(Error::Internal(format!("witness {witness} is not the domain top {}", spec.top)));
    }
    let top_maps_to_root = spec.eval(&witness)?.is_empty();
    let root_rank = hyper_log(&opts.lambda, &witness);
    let root_rank_ok = root_rank == theta;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let selftest = dmap::selftest_with(&spec, opts.samples, opts.depth, opts.prefix, &mut rng, opts.mode)?;
    let ambient = opts.ambient.as_ref().map(|a| {
        let bound = hyper_exp(&opts.lambda, &OrdTerm::omega());
        AmbientNote { ambient: a.clone(), holds: bound < *a, bound }
    });
    Ok(WitnessReport {
        formulas: Vec::new(),
        stream: None,
        lambda: opts.lambda.clone(),
        theta,
        witness,
        model_rank: None,
        checks,
        certificate: Certificate { top_maps_to_root, root_rank, root_rank_ok, selftest },
        ambient,
        bouquet: icard::bouquet::bouquet_to_json(b),
        model: None,
    })
}
