//! Modal formulas, a tableau decision procedure for GL with finite tree
//! countermodels, and the formula streams used for infinite satisfiable sets.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, internal, Error, Result};
use crate::par::{self, Mode};

pub const DEFAULT_BUDGET: usize = 200_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Bot,
    Top,
    Var(u32),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
    Diamond(Box<Formula>),
}

impl Formula {
    pub fn var(i: u32) -> Self {
        Formula::Var(i)
    }
    pub fn negate(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn boxed(a: Formula) -> Self {
        Formula::Box(Box::new(a))
    }
    pub fn diamond(a: Formula) -> Self {
        Formula::Diamond(Box::new(a))
    }

    /// `<>^n T`.
    pub fn diamond_power(n: usize) -> Self {
        (0..n).fold(Formula::Top, |f, _| Formula::diamond(f))
    }

    /// Conjunction of a list; `T` when empty.
    pub fn conj(items: &[Formula]) -> Self {
        let mut it = items.iter().rev();
        match it.next() {
            None => Formula::Top,
            Some(last) => it.fold(last.clone(), |acc, f| Formula::and(f.clone(), acc)),
        }
    }

    pub fn modal_depth(&self) -> usize {
        use Formula::*;
        match self {
            Bot | Top | Var(_) => 0,
            Not(a) => a.modal_depth(),
            And(a, b) | Or(a, b) | Implies(a, b) => a.modal_depth().max(b.modal_depth()),
            Box(a) | Diamond(a) => 1 + a.modal_depth(),
        }
    }

    pub fn connectives(&self) -> usize {
        use Formula::*;
        match self {
            Bot | Top | Var(_) => 0,
            Not(a) | Box(a) | Diamond(a) => 1 + a.connectives(),
            And(a, b) | Or(a, b) | Implies(a, b) => 1 + a.connectives() + b.connectives(),
        }
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<u32>) {
        use Formula::*;
        match self {
            Bot | Top => {}
            Var(i) => {
                out.insert(*i);
            }
            Not(a) | Box(a) | Diamond(a) => a.collect_vars(out),
            And(a, b) | Or(a, b) | Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn prec(&self) -> u8 {
        use Formula::*;
        match self {
            Implies(..) => 1,
            Or(..) => 2,
            And(..) => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        let wrap = |f: &mut fmt::Formatter<'_>, g: &Formula, paren: bool| {
            if paren {
                write!(f, "({g})")
            } else {
                write!(f, "{g}")
            }
        };
        match self {
            Bot => f.write_str("F"),
            Top => f.write_str("T"),
            Var(i) => write!(f, "p{i}"),
            Not(a) => {
                f.write_str("~")?;
                wrap(f, a, a.prec() < 4)
            }
            Box(a) => {
                f.write_str("[]")?;
                wrap(f, a, a.prec() < 4)
            }
            Diamond(a) => {
                f.write_str("<>")?;
                wrap(f, a, a.prec() < 4)
            }
            And(a, b) => {
                wrap(f, a, a.prec() < 3)?;
                f.write_str(" & ")?;
                wrap(f, b, b.prec() <= 3)
            }
            Or(a, b) => {
                wrap(f, a, a.prec() < 2)?;
                f.write_str(" | ")?;
                wrap(f, b, b.prec() <= 2)
            }
            Implies(a, b) => {
                wrap(f, a, a.prec() <= 1)?;
                f.write_str(" -> ")?;
                wrap(f, b, b.prec() < 1)
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Formula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_formula(s)
    }
}

impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = FParser { s: text.as_bytes(), pos: 0 };
    let f = p.implication()?;
    p.ws();
    if p.pos != p.s.len() {
        return p.err("unexpected trailing input");
    }
    Ok(f)
}

struct FParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl FParser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.to_string() })
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn implication(&mut self) -> Result<Formula> {
        let a = self.disjunction()?;
        if self.eat("->") {
            let b = self.implication()?;
            return Ok(Formula::implies(a, b));
        }
        Ok(a)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut a = self.conjunction()?;
        while self.eat("|") {
            a = Formula::or(a, self.conjunction()?);
        }
        Ok(a)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut a = self.unary()?;
        while self.eat("&") {
            a = Formula::and(a, self.unary()?);
        }
        Ok(a)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat("~") {
            return Ok(Formula::negate(self.unary()?));
        }
        if self.eat("[]") {
            return Ok(Formula::boxed(self.unary()?));
        }
        if self.eat("<>") {
            return Ok(Formula::diamond(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        self.ws();
        match self.s.get(self.pos) {
            Some(b'T') => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Some(b'F') => {
                self.pos += 1;
                Ok(Formula::Bot)
            }
            Some(b'p') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if start == self.pos {
                    return self.err("expected a variable index after 'p'");
                }
                let digits = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                match digits.parse() {
                    Ok(i) => Ok(Formula::Var(i)),
                    Err(_) => {
                        self.pos = start;
                        self.err("variable index too large")
                    }
                }
            }
            Some(b'(') => {
                self.pos += 1;
                let f = self.implication()?;
                if !self.eat(")") {
                    return self.err("expected ')'");
                }
                Ok(f)
            }
            Some(_) => self.err("expected a formula"),
            None => self.err("unexpected end of input"),
        }
    }
}

// ---------------------------------------------------------------- tree models

pub(crate) mod var_names {
    use std::collections::BTreeSet;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BTreeSet<u32>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|i| format!("p{i}")))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeSet<u32>, D::Error> {
        let names = Vec::<String>::deserialize(d)?;
        names
            .iter()
            .map(|n| {
                n.strip_prefix('p')
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| serde::de::Error::custom(format!("bad variable name {n:?}")))
            })
            .collect()
    }
}


#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: usize,
    #[serde(with = "var_names", default)]
    pub val: BTreeSet<u32>,
    #[serde(default)]
    pub children: Vec<usize>,
}

/// A finite tree; accessibility is the strict descendant relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeModel {
    pub nodes: Vec<TreeNode>,
    pub root: usize,
}

/// A validated tree with precomputed descendant sets.
#[derive(Clone, Debug)]
pub struct IndexedTree {
    pub ids: Vec<usize>,
    pub val: Vec<BTreeSet<u32>>,
    pub children: Vec<Vec<usize>>,
    pub desc: Vec<Vec<usize>>,
    pub root: usize,
}

impl TreeModel {
    pub fn index(&self) -> Result<IndexedTree> {
        let n = self.nodes.len();
        let mut pos = HashMap::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if pos.insert(node.id, i).is_some() {
                return Err(Error::Input(format!("duplicate node id {}", node.id)));
            }
        }
        let root = *pos
            .get(&self.root)
            .ok_or_else(|| Error::Input(format!("unknown root id {}", self.root)))?;
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        for (i, node) in self.nodes.iter().enumerate() {
            for c in &node.children {
                let j = *pos.get(c).ok_or_else(|| Error::Input(format!("unknown child id {c}")))?;
                if parent[j].replace(i).is_some() || j == root {
                    return Err(Error::Input(format!("node {c} has more than one parent")));
                }
                children[i].push(j);
            }
        }
        let mut order = vec![root];
        let mut k = 0;
        while k < order.len() {
            let i = order[k];
            order.extend(children[i].iter().copied());
            k += 1;
        }
        if order.len() != n {
            return Err(Error::Input("nodes are not all reachable from the root".into()));
        }
        let mut desc = vec![Vec::new(); n];
        for &i in order.iter().rev() {
            let mut d = Vec::new();
            for &c in &children[i] {
                d.push(c);
                d.extend(desc[c].iter().copied());
            }
            desc[i] = d;
        }
        Ok(IndexedTree {
            ids: self.nodes.iter().map(|x| x.id).collect(),
            val: self.nodes.iter().map(|x| x.val.clone()).collect(),
            children,
            desc,
            root,
        })
    }

    /// Height of the tree, which is the rank of its root.
    pub fn rank(&self) -> Result<usize> {
        let t = self.index()?;
        Ok(t.height(t.root))
    }
}

impl IndexedTree {
    pub fn position(&self, id: usize) -> Result<usize> {
        self.ids
            .iter()
            .position(|&x| x == id)
            .ok_or_else(|| Error::Input(format!("unknown node id {id}")))
    }

    pub fn height(&self, i: usize) -> usize {
        self.children[i].iter().map(|&c| 1 + self.height(c)).max().unwrap_or(0)
    }

    /// Kripke truth at position `i`.
    pub fn holds(&self, i: usize, phi: &Formula) -> bool {
        use Formula::*;
        match phi {
            Bot => false,
            Top => true,
            Var(v) => self.val[i].contains(v),
            Not(a) => !self.holds(i, a),
            And(a, b) => self.holds(i, a) && self.holds(i, b),
            Or(a, b) => self.holds(i, a) || self.holds(i, b),
            Implies(a, b) => !self.holds(i, a) || self.holds(i, b),
            Box(a) => self.desc[i].iter().all(|&j| self.holds(j, a)),
            Diamond(a) => self.desc[i].iter().any(|&j| self.holds(j, a)),
        }
    }
}

pub fn check_tree(m: &TreeModel, node: usize, phi: &Formula) -> Result<bool> {
    let t = m.index()?;
    let i = t.position(node)?;
    Ok(t.holds(i, phi))
}

/// [`check_tree`] for several formulas, validating the tree once.
pub fn check_tree_many(m: &TreeModel, node: usize, phis: &[Formula]) -> Result<Vec<bool>> {
    let t = m.index()?;
    let i = t.position(node)?;
    Ok(phis.iter().map(|phi| t.holds(i, phi)).collect())
}

// ---------------------------------------------------------------- tableau

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum N {
    Top,
    Bot,
    Lit(u32, bool),
    And(u32, u32),
    Or(u32, u32),
    Box(u32),
    Dia(u32),
}

#[derive(Default)]
struct Arena {
    nodes: Vec<N>,
    map: HashMap<N, u32>,
}

impl Arena {
    fn intern(&mut self, n: N) -> u32 {
        if let Some(&i) = self.map.get(&n) {
            return i;
        }
        let i = self.nodes.len() as u32;
        self.nodes.push(n);
        self.map.insert(n, i);
        i
    }

    fn nnf(&mut self, f: &Formula, pos: bool) -> u32 {
        use Formula as F;
        let n = match (f, pos) {
            (F::Top, true) | (F::Bot, false) => N::Top,
            (F::Top, false) | (F::Bot, true) => N::Bot,
            (F::Var(v), p) => N::Lit(*v, p),
            (F::Not(a), p) => return self.nnf(a, !p),
            (F::And(a, b), true) | (F::Or(a, b), false) => N::And(self.nnf(a, pos), self.nnf(b, pos)),
            (F::Or(a, b), true) | (F::And(a, b), false) => N::Or(self.nnf(a, pos), self.nnf(b, pos)),
            (F::Implies(a, b), true) => N::Or(self.nnf(a, false), self.nnf(b, true)),
            (F::Implies(a, b), false) => N::And(self.nnf(a, true), self.nnf(b, false)),
            (F::Box(a), true) | (F::Diamond(a), false) => N::Box(self.nnf(a, pos)),
            (F::Diamond(a), true) | (F::Box(a), false) => N::Dia(self.nnf(a, pos)),
        };
        self.intern(n)
    }

    fn neg(&mut self, i: u32) -> u32 {
        let n = match self.nodes[i as usize] {
            N::Top => N::Bot,
            N::Bot => N::Top,
            N::Lit(v, p) => N::Lit(v, !p),
            N::And(a, b) => N::Or(self.neg(a), self.neg(b)),
            N::Or(a, b) => N::And(self.neg(a), self.neg(b)),
            N::Box(a) => N::Dia(self.neg(a)),
            N::Dia(a) => N::Box(self.neg(a)),
        };
        self.intern(n)
    }
}

struct MNode {
    val: BTreeSet<u32>,
    children: Vec<Arc<MNode>>,
}

struct Search {
    arena: Arena,
    memo: HashMap<Vec<u32>, Option<Arc<MNode>>>,
    steps: usize,
    budget: usize,
}

impl Search {
    fn new(budget: usize) -> Self {
        Search { arena: Arena::default(), memo: HashMap::new(), steps: 0, budget }
    }

    fn sat(&mut self, mut set: Vec<u32>) -> Result<Option<Arc<MNode>>> {
        set.sort_unstable();
        set.dedup();
        if let Some(r) = self.memo.get(&set) {
            return Ok(r.clone());
        }
        let r = self.expand(set.clone(), BTreeSet::new())?;
        self.memo.insert(set, r.clone());
        Ok(r)
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::Budget(format!("tableau exceeded {} steps", self.budget)));
        }
        Ok(())
    }

    fn expand(&mut self, mut pending: Vec<u32>, mut done: BTreeSet<u32>) -> Result<Option<Arc<MNode>>> {
        self.tick()?;
        while let Some(f) = pending.pop() {
            if !done.insert(f) {
                continue;
            }
            match self.arena.nodes[f as usize] {
                N::Top | N::Box(_) | N::Dia(_) => {}
                N::Bot => return Ok(None),
                N::Lit(v, p) => {
                    if let Some(&g) = self.arena.map.get(&N::Lit(v, !p)) {
                        if done.contains(&g) {
                            return Ok(None);
                        }
                    }
                }
                N::And(a, b) => {
                    pending.push(b);
                    pending.push(a);
                }
                N::Or(a, b) => {
                    if done.contains(&a) || done.contains(&b) {
                        continue;
                    }
                    for branch in [a, b] {
                        let mut p = pending.clone();
                        p.push(branch);
                        if let Some(m) = self.expand(p, done.clone())? {
                            return Ok(Some(m));
                        }
                    }
                    return Ok(None);
                }
            }
        }
        let mut carried = Vec::new();
        let mut diamonds = Vec::new();
        let mut val = BTreeSet::new();
        for &f in &done {
            match self.arena.nodes[f as usize] {
                N::Box(a) => carried.extend([f, a]),
                N::Dia(a) => diamonds.push(a),
                N::Lit(v, true) => {
                    val.insert(v);
                }
                _ => {}
            }
        }
        let mut children = Vec::new();
        for a in diamonds {
            let na = self.arena.neg(a);
            let guard = self.arena.intern(N::Box(na));
            if done.contains(&guard) {
                return Ok(None);
            }
            let mut succ = carried.clone();
            succ.extend([a, guard]);
            match self.sat(succ)? {
                Some(m) => children.push(m),
                None => return Ok(None),
            }
        }
        Ok(Some(Arc::new(MNode { val, children })))
    }
}

fn flatten(m: &MNode) -> TreeModel {
    fn go(m: &MNode, nodes: &mut Vec<TreeNode>) -> usize {
        let id = nodes.len();
        nodes.push(TreeNode { id, val: m.val.clone(), children: Vec::new() });
        let kids: Vec<usize> = m.children.iter().map(|c| go(c, nodes)).collect();
        nodes[id].children = kids;
        id
    }
    let mut nodes = Vec::new();
    let root = go(m, &mut nodes);
    TreeModel { nodes, root }
}

/// A finite tree whose root satisfies every formula of `gamma`, if one exists.
pub fn satisfy(gamma: &[Formula], budget: usize) -> Result<Option<TreeModel>> {
    let mut s = Search::new(budget);
    let set: Vec<u32> = gamma.iter().map(|f| s.arena.nnf(f, true)).collect();
    let Some(m) = s.sat(set)? else {
        return Ok(None);
    };
    let model = flatten(&m);
    let t = model.index()?;
    for f in gamma {
        if !t.holds(t.root, f) {
            return internal(format!("tableau model does not satisfy {f}"));
        }
    }
    Ok(Some(model))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum ProofResult {
    Theorem,
    Countermodel { model: TreeModel },
}

impl ProofResult {
    pub fn is_theorem(&self) -> bool {
        matches!(self, ProofResult::Theorem)
    }
}

pub fn prove(phi: &Formula, budget: usize) -> Result<ProofResult> {
    match satisfy(&[Formula::negate(phi.clone())], budget)? {
        None => Ok(ProofResult::Theorem),
        Some(model) => {
            if check_tree(&model, model.root, phi)? {
                return internal(format!("countermodel does not refute {phi}"));
            }
            Ok(ProofResult::Countermodel { model })
        }
    }
}

/// Runs [`prove`] on every formula, in parallel under [`Mode::Parallel`].
pub fn prove_many(formulas: &[Formula], budget: usize, mode: Mode) -> Result<Vec<ProofResult>> {
    par::try_map(mode, formulas, |f| prove(f, budget))
}

pub fn consistent(gamma: &[Formula], budget: usize) -> Result<bool> {
    Ok(satisfy(gamma, budget)?.is_some())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CharBound {
    Exactly(usize),
    AtLeast(usize),
}

impl fmt::Display for CharBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharBound::Exactly(n) => write!(f, "{n}"),
            CharBound::AtLeast(n) => write!(f, ">={n}"),
        }
    }
}

/// The largest `n <= cap` with `gamma ∪ {<>^n T}` consistent.
pub fn characteristic_bound(gamma: &[Formula], cap: usize, budget: usize) -> Result<CharBound> {
    if !consistent(gamma, budget)? {
        return domain("characteristic_bound of an inconsistent set");
    }
    let mut with = gamma.to_vec();
    with.push(Formula::Top);
    for n in 1..=cap {
        *with.last_mut().unwrap() = Formula::diamond_power(n);
        if !consistent(&with, budget)? {
            return Ok(CharBound::Exactly(n - 1));
        }
    }
    Ok(CharBound::AtLeast(cap))
}

// ---------------------------------------------------------------- streams

type Gen = Arc<dyn Fn(usize) -> Result<Formula> + Send + Sync>;

/// Two formula generators: `psi(i)` for diamond witnesses and `phi(j)` for boxed
/// contents, plus the valuation of the root.
#[derive(Clone)]
pub struct FormulaStreamPair {
    pub name: String,
    psi: Gen,
    phi: Gen,
    pub root_literals: BTreeSet<u32>,
}

impl fmt::Debug for FormulaStreamPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormulaStreamPair({})", self.name)
    }
}

impl FormulaStreamPair {
    pub fn new(
        name: impl Into<String>,
        psi: impl Fn(usize) -> Result<Formula> + Send + Sync + 'static,
        phi: impl Fn(usize) -> Result<Formula> + Send + Sync + 'static,
        root_literals: BTreeSet<u32>,
    ) -> Self {
        FormulaStreamPair { name: name.into(), psi: Arc::new(psi), phi: Arc::new(phi), root_literals }
    }

    /// Streams given by formula templates in which `{i}` and `{i+k}` stand for
    /// the index and its shifts.
    pub fn from_templates(name: &str, psi: &str, phi: &str, root_literals: BTreeSet<u32>) -> Result<Self> {
        instantiate(psi, 0)?;
        instantiate(phi, 0)?;
        let (psi, phi) = (psi.to_string(), phi.to_string());
        Ok(Self::new(name, move |i| instantiate(&psi, i), move |j| instantiate(&phi, j), root_literals))
    }

    /// Built-in streams: `diamond-chain` is `{<>p0} ∪ {[](p_i -> <>p_{i+1})}`, and
    /// `top` has every formula equal to `T`.
    pub fn named(name: &str) -> Option<Self> {
        match name {
            "diamond-chain" => Self::from_templates(name, "p0", "p{i} -> <>p{i+1}", BTreeSet::new()).ok(),
            "top" => Self::from_templates(name, "T", "T", BTreeSet::new()).ok(),
            _ => None,
        }
    }

    pub fn psi(&self, i: usize) -> Result<Formula> {
        (self.psi)(i)
    }

    pub fn phi(&self, j: usize) -> Result<Formula> {
        (self.phi)(j)
    }
}

fn instantiate(template: &str, i: usize) -> Result<Formula> {
    let mut out = String::new();
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        out.push_str(&rest[..start]);
        let end = rest[start..]
            .find('}')
            .ok_or_else(|| Error::Input(format!("unclosed '{{' in template {template:?}")))?;
        let hole = rest[start + 1..start + end].replace(' ', "");
        let shift = match hole.as_str() {
            "i" => 0,
            h => h
                .strip_prefix("i+")
                .and_then(|k| k.parse::<usize>().ok())
                .ok_or_else(|| Error::Input(format!("bad placeholder {{{h}}} in template")))?,
        };
        out.push_str(&(i + shift).to_string());
        rest = &rest[start + end + 1..];
    }
    out.push_str(rest);
    parse_formula(&out).map_err(|e| Error::Input(format!("template {template:?}: {e}")))
}

/// `{psi_i} ∪ {phi_j & []phi_j : j < i}`.
pub fn gamma_slice(s: &FormulaStreamPair, i: usize) -> Result<Vec<Formula>> {
    let mut out = vec![s.psi(i)?];
    for j in 0..i {
        let p = s.phi(j)?;
        out.push(Formula::and(p.clone(), Formula::boxed(p)));
    }
    Ok(out)
}
