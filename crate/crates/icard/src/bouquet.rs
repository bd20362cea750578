//! Finitely presented ω-bouquets: ranks, daughter enumerations, dominating
//! subsequences and model checking.
//!
//! Nodes of the tree are addressed by paths of `EachOnce` daughter positions.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{domain, Error, Result};
use crate::gl::{self, gamma_slice, Formula, FormulaStreamPair, TreeModel};
use crate::ordinal::OrdTerm;

pub const DEFAULT_SEARCH_BUDGET: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mult {
    Finite(u64),
    Omega,
}

impl Serialize for Mult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Mult::Finite(n) => s.serialize_u64(*n),
            Mult::Omega => s.serialize_str("w"),
        }
    }
}

impl<'de> Deserialize<'de> for Mult {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::Number(n) => match n.as_u64() {
                Some(k) if k >= 1 => Ok(Mult::Finite(k)),
                _ => Err(serde::de::Error::custom("multiplicity must be a positive integer or \"w\"")),
            },
            Value::String(s) if s == "w" => Ok(Mult::Omega),
            other => Err(serde::de::Error::custom(format!("bad multiplicity {other}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Child {
    pub node: Arc<Bouquet>,
    pub mult: Mult,
}

#[derive(Clone, Debug)]
pub enum Schema {
    /// Member `i` is a chain of rank `start + i` with valuation `val` everywhere.
    Chain { start: u64, val: BTreeSet<u32> },
    /// Member `i` is the tableau model of `gamma_slice(stream, i)`.
    Prover { stream: FormulaStreamPair, templates: Option<(String, String)>, budget: usize },
}

pub struct Family {
    pub schema: Schema,
    pub rank: OrdTerm,
    cache: Mutex<Vec<Arc<Bouquet>>>,
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Family").field("schema", &self.schema).field("rank", &self.rank).finish()
    }
}

impl Family {
    pub fn new(schema: Schema, rank: OrdTerm) -> Result<Self> {
        if rank != OrdTerm::omega() {
            return domain(format!("generated families have finite members, so the declared rank must be w, not {rank}"));
        }
        Ok(Family { schema, rank, cache: Mutex::new(Vec::new()) })
    }

    /// The `i`-th generated child, materialized once and cached.
    pub fn member(&self, i: usize) -> Result<Arc<Bouquet>> {
        let mut cache = self.cache.lock().unwrap();
        while cache.len() <= i {
            let next = self.generate(cache.len())?;
            cache.push(next);
        }
        Ok(cache[i].clone())
    }

    pub fn materialized(&self) -> usize {
        self.cache.lock().unwrap().len()
    }

    fn generate(&self, i: usize) -> Result<Arc<Bouquet>> {
        let b = match &self.schema {
            Schema::Chain { start, val } => chain(start + i as u64, val),
            Schema::Prover { stream, budget, .. } => {
                let g = gamma_slice(stream, i)?;
                match gl::satisfy(&g, *budget)? {
                    Some(m) => Bouquet::from_tree(&m)?,
                    None => {
                        return Err(Error::Integrity(format!("slice {i} of stream {} is inconsistent", stream.name)))
                    }
                }
            }
        };
        if b.rank() >= &self.rank {
            return Err(Error::Integrity(format!(
                "generated child {i} has rank {} which is not below the declared {}",
                b.rank(),
                self.rank
            )));
        }
        Ok(b)
    }
}

#[derive(Debug)]
pub struct Bouquet {
    pub id: u64,
    pub val: BTreeSet<u32>,
    pub children: Vec<Child>,
    pub family: Option<Family>,
    rank: OrdTerm,
}

/// A chain of `n + 1` nodes, ids `0..=n` from the top.
pub fn chain(n: u64, val: &BTreeSet<u32>) -> Arc<Bouquet> {
    let mut node = Bouquet::leaf(n, val.clone());
    for id in (0..n).rev() {
        node = Bouquet::new(id, val.clone(), vec![Child { node, mult: Mult::Finite(1) }], None).unwrap();
    }
    node
}

impl Bouquet {
    pub fn leaf(id: u64, val: BTreeSet<u32>) -> Arc<Self> {
        Arc::new(Bouquet { id, val, children: Vec::new(), family: None, rank: OrdTerm::zero() })
    }

    pub fn new(id: u64, val: BTreeSet<u32>, children: Vec<Child>, family: Option<Family>) -> Result<Arc<Self>> {
        let mut rank = OrdTerm::zero();
        for c in &children {
            if c.mult == Mult::Finite(0) {
                return domain("multiplicity must be positive");
            }
            rank = rank.max(c.node.rank.succ());
        }
        if let Some(f) = &family {
            rank = rank.max(f.rank.clone());
        }
        Ok(Arc::new(Bouquet { id, val, children, family, rank }))
    }

    pub fn from_tree(m: &TreeModel) -> Result<Arc<Self>> {
        let t = m.index()?;
        fn build(t: &gl::IndexedTree, i: usize) -> Result<Arc<Bouquet>> {
            let kids = t.children[i]
                .iter()
                .map(|&c| Ok(Child { node: build(t, c)?, mult: Mult::Finite(1) }))
                .collect::<Result<Vec<_>>>()?;
            Bouquet::new(t.ids[i] as u64, t.val[i].clone(), kids, None)
        }
        build(&t, t.root)
    }

    pub fn rank(&self) -> &OrdTerm {
        &self.rank
    }

    /// No generated families and no ω multiplicities anywhere below.
    pub fn is_finite(&self) -> bool {
        self.family.is_none()
            && self.children.iter().all(|c| c.mult != Mult::Omega && c.node.is_finite())
    }

    fn finite_count(&self) -> usize {
        self.children
            .iter()
            .map(|c| match c.mult {
                Mult::Finite(n) => n as usize,
                Mult::Omega => 0,
            })
            .sum()
    }

    fn omega_children(&self) -> Vec<&Arc<Bouquet>> {
        self.children.iter().filter(|c| c.mult == Mult::Omega).map(|c| &c.node).collect()
    }

    /// Number of daughters, `None` when infinite.
    pub fn daughter_count(&self) -> Option<usize> {
        if self.family.is_some() || self.children.iter().any(|c| c.mult == Mult::Omega) {
            None
        } else {
            Some(self.finite_count())
        }
    }

    /// The daughter at `EachOnce` position `i`.
    pub fn daughter(&self, i: usize) -> Result<Arc<Bouquet>> {
        let mut rest = i;
        for c in &self.children {
            if let Mult::Finite(n) = c.mult {
                if rest < n as usize {
                    return Ok(c.node.clone());
                }
                rest -= n as usize;
            }
        }
        let omegas = self.omega_children();
        let streams = omegas.len() + usize::from(self.family.is_some());
        if streams == 0 {
            return domain(format!("node {} has only {} daughters", self.id, self.finite_count()));
        }
        let (s, q) = (rest % streams, rest / streams);
        match &self.family {
            Some(f) if s == 0 => f.member(q),
            Some(_) => Ok(omegas[s - 1].clone()),
            None => Ok(omegas[s].clone()),
        }
    }

    /// The first `EachOnce` position holding a daughter of rank `r` that is not a
    /// generated member.
    pub fn first_position_of_rank(&self, r: &OrdTerm) -> Option<usize> {
        let mut pos = 0;
        for c in &self.children {
            if let Mult::Finite(n) = c.mult {
                if c.node.rank() == r {
                    return Some(pos);
                }
                pos += n as usize;
            }
        }
        let offset = usize::from(self.family.is_some());
        self.omega_children().iter().position(|c| c.rank() == r).map(|s| pos + s + offset)
    }

    pub fn resolve(self: &Arc<Self>, path: &[usize]) -> Result<Arc<Bouquet>> {
        let mut node = self.clone();
        for &p in path {
            if node.daughter_count().is_some_and(|n| p >= n) {
                return Err(Error::Input(format!("node {} has no daughter at position {p}", node.id)));
            }
            node = node.daughter(p)?;
        }
        Ok(node)
    }

    /// Paths of all nodes of depth at most `depth`, visiting at most `prefix`
    /// daughters of each node.
    pub fn paths(self: &Arc<Self>, depth: usize, prefix: usize) -> Result<Vec<Vec<usize>>> {
        let mut out = vec![Vec::new()];
        let mut frontier = vec![(Vec::new(), self.clone())];
        for _ in 0..depth {
            let mut next = Vec::new();
            for (path, node) in frontier {
                let n = node.daughter_count().unwrap_or(usize::MAX).min(prefix);
                for p in 0..n {
                    let mut q: Vec<usize> = path.clone();
                    q.push(p);
                    out.push(q.clone());
                    next.push((q, node.daughter(p)?));
                }
            }
            frontier = next;
        }
        Ok(out)
    }

    pub fn daughters(self: &Arc<Self>, mode: EnumMode) -> Result<DaughterEnum> {
        if mode == EnumMode::InfinitelyOften && self.daughter_count() == Some(0) {
            return domain(format!("node {} is a leaf", self.id));
        }
        Ok(DaughterEnum { node: self.clone(), mode, lead: 0 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumMode {
    EachOnce,
    InfinitelyOften,
}

/// An enumeration of the daughters of one node; `lead` is the `EachOnce`
/// position swapped to the front.
#[derive(Clone, Debug)]
pub struct DaughterEnum {
    node: Arc<Bouquet>,
    pub mode: EnumMode,
    pub lead: usize,
}

impl DaughterEnum {
    pub fn with_lead(mut self, lead: usize) -> Self {
        self.lead = lead;
        self
    }

    pub fn node(&self) -> &Arc<Bouquet> {
        &self.node
    }

    /// Length of the enumeration, `None` when infinite.
    pub fn len(&self) -> Option<usize> {
        match self.mode {
            EnumMode::EachOnce => self.node.daughter_count(),
            EnumMode::InfinitelyOften => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// The `EachOnce` position named at index `i`.
    pub fn position(&self, i: usize) -> Result<usize> {
        let count = self.node.daughter_count();
        let raw = match (self.mode, count) {
            (EnumMode::EachOnce, Some(n)) if i >= n => {
                return domain(format!("enumeration of node {} has length {n}", self.node.id))
            }
            (EnumMode::EachOnce, _) => i,
            (EnumMode::InfinitelyOften, Some(n)) => i % n,
            (EnumMode::InfinitelyOften, None) => {
                let mut b = 0;
                while (b + 1) * (b + 2) / 2 <= i {
                    b += 1;
                }
                i - b * (b + 1) / 2
            }
        };
        Ok(if raw == 0 {
            self.lead
        } else if raw == self.lead {
            0
        } else {
            raw
        })
    }

    pub fn get(&self, i: usize) -> Result<(usize, Arc<Bouquet>)> {
        let p = self.position(i)?;
        Ok((p, self.node.daughter(p)?))
    }

    pub fn rank(&self, i: usize) -> Result<OrdTerm> {
        Ok(self.get(i)?.1.rank().clone())
    }

    /// The `n`-th index (from 0) naming `EachOnce` position `p`.
    pub fn index_of(&self, p: usize, n: usize) -> Result<usize> {
        let target = if p == self.lead {
            0
        } else if p == 0 {
            self.lead
        } else {
            p
        };
        match (self.mode, self.node.daughter_count()) {
            (_, Some(c)) if p >= c => domain(format!("node {} has no daughter {p}", self.node.id)),
            (EnumMode::EachOnce, _) if n > 0 => domain("an EachOnce enumeration names each daughter once"),
            (EnumMode::EachOnce, _) => Ok(target),
            (EnumMode::InfinitelyOften, Some(c)) => Ok(target + n * c),
            (EnumMode::InfinitelyOften, None) => {
                let b = target + n;
                Ok(b * (b + 1) / 2 + target)
            }
        }
    }

    pub fn first_index_of(&self, p: usize) -> Result<usize> {
        self.index_of(p, 0)
    }
}

/// Greedy dominating indices `m_i` over an enumeration whose ranks are cofinal
/// in a limit, extended lazily.
#[derive(Debug)]
pub struct Dominating {
    e: DaughterEnum,
    budget: usize,
    cache: Mutex<Vec<(usize, OrdTerm)>>,
}

pub fn dominating_subsequence(e: DaughterEnum, budget: usize) -> Result<Dominating> {
    if e.len().is_some() {
        return domain("dominating_subsequence needs an infinite enumeration");
    }
    Ok(Dominating { e, budget, cache: Mutex::new(Vec::new()) })
}

impl Dominating {
    /// `(m_i, θ_{m_i})`.
    pub fn get(&self, i: usize) -> Result<(usize, OrdTerm)> {
        let mut cache = self.cache.lock().unwrap();
        while cache.len() <= i {
            let n = cache.len();
            let theta_n = self.e.rank(n)?;
            let (start, floor) = match cache.last() {
                Some((m, t)) => (m + 1, theta_n.max(t.clone())),
                None => (0, theta_n),
            };
            let mut found = None;
            for j in start..start + self.budget {
                let t = self.e.rank(j)?;
                if t > floor {
                    found = Some((j, t));
                    break;
                }
            }
            match found {
                Some(x) => cache.push(x),
                None => {
                    return Err(Error::Integrity(format!(
                        "no dominating index m_{n} within {} positions; ranks are not cofinal",
                        self.budget
                    )))
                }
            }
        }
        Ok(cache[i].clone())
    }

    pub fn prefix(&self, n: usize) -> Result<Vec<usize>> {
        (0..n).map(|i| self.get(i).map(|x| x.0)).collect()
    }

    pub fn enumeration(&self) -> &DaughterEnum {
        &self.e
    }
}

/// Checks the cofinality claim of a generated family on a prefix of `n`
/// dominating indices.
pub fn check_family(b: &Arc<Bouquet>, n: usize, budget: usize) -> Result<()> {
    if b.family.is_none() {
        return Ok(());
    }
    let d = dominating_subsequence(b.daughters(EnumMode::EachOnce)?, budget)?;
    d.prefix(n).map(|_| ())
}

// ---------------------------------------------------------------- model checking

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    TrueUpTo(usize),
    FalseUpTo(usize),
}

impl Truth {
    pub fn value(self) -> bool {
        matches!(self, Truth::True | Truth::TrueUpTo(_))
    }
    pub fn is_exact(self) -> bool {
        matches!(self, Truth::True | Truth::False)
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truth::True => f.write_str("true"),
            Truth::False => f.write_str("false"),
            Truth::TrueUpTo(k) => write!(f, "true up to {k}"),
            Truth::FalseUpTo(k) => write!(f, "false up to {k}"),
        }
    }
}

impl Serialize for Truth {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = match self {
            Truth::True | Truth::False => json!({"value": self.value(), "exact": true}),
            Truth::TrueUpTo(k) | Truth::FalseUpTo(k) => json!({"value": self.value(), "exact": false, "prefix": k}),
        };
        v.serialize(s)
    }
}

#[derive(Clone, Copy)]
struct V {
    value: bool,
    exact: bool,
}

const fn exact(value: bool) -> V {
    V { value, exact: true }
}

struct Checker {
    k: usize,
    budget: usize,
}

impl Checker {
    /// Truth of `phi` at `node`, or of its negation when `pos` is false.
    fn eval(&self, node: &Arc<Bouquet>, phi: &Formula, pos: bool) -> Result<V> {
        use Formula::*;
        let flip = |v: V| V { value: v.value == pos, exact: v.exact };
        let neg = |v: V| V { value: !v.value, exact: v.exact };
        Ok(match phi {
            Bot => exact(!pos),
            Top => exact(pos),
            Var(v) => exact(node.val.contains(v) == pos),
            Not(a) => self.eval(node, a, !pos)?,
            And(a, b) if pos => neg(self.or(node, a, false, b, false)?),
            And(a, b) => self.or(node, a, false, b, false)?,
            Or(a, b) if pos => self.or(node, a, true, b, true)?,
            Or(a, b) => flip(self.or(node, a, true, b, true)?),
            Implies(a, b) if pos => self.or(node, a, false, b, true)?,
            Implies(a, b) => flip(self.or(node, a, false, b, true)?),
            Box(a) => {
                let v = self.diamond(node, a, false)?;
                V { value: v.value != pos, exact: v.exact }
            }
            Diamond(a) => flip(self.diamond(node, a, true)?),
        })
    }

    fn or(&self, node: &Arc<Bouquet>, a: &Formula, pa: bool, b: &Formula, pb: bool) -> Result<V> {
        let x = self.eval(node, a, pa)?;
        if x.value && x.exact {
            return Ok(x);
        }
        let y = self.eval(node, b, pb)?;
        Ok(join(x, y))
    }

    fn nowhere(&self, phi: &Formula, pos: bool) -> Result<bool> {
        let f = if pos { phi.clone() } else { Formula::negate(phi.clone()) };
        Ok(!gl::consistent(std::slice::from_ref(&f), self.budget)?)
    }

    /// Some point strictly below `node` in the derived-set sense satisfies the literal.
    fn diamond(&self, node: &Arc<Bouquet>, phi: &Formula, pos: bool) -> Result<V> {
        if let Some(m) = top_power(phi, pos) {
            return Ok(exact(*node.rank() > OrdTerm::nat(m as u64)));
        }
        if node.rank().is_limit() {
            for c in node.omega_children() {
                let s = self.somewhere(c, phi, pos)?;
                if s.value && s.exact {
                    return Ok(s);
                }
            }
            if self.nowhere(phi, pos)? {
                return Ok(exact(false));
            }
            let value = match (&node.family, self.k) {
                (Some(f), k) if k > 0 => self.somewhere(&f.member(k - 1)?, phi, pos)?.value,
                _ => false,
            };
            return Ok(V { value, exact: false });
        }
        self.below(node, phi, pos)
    }

    /// Some strict descendant satisfies the literal.
    fn below(&self, node: &Arc<Bouquet>, phi: &Formula, pos: bool) -> Result<V> {
        let mut acc = exact(false);
        for c in &node.children {
            acc = join(acc, self.somewhere(&c.node, phi, pos)?);
            if acc.value && acc.exact {
                return Ok(acc);
            }
        }
        if let Some(f) = &node.family {
            for i in 0..self.k {
                acc = join(acc, self.somewhere(&f.member(i)?, phi, pos)?);
                if acc.value && acc.exact {
                    return Ok(acc);
                }
            }
            acc.exact = false;
        }
        if !acc.exact && !acc.value && self.nowhere(phi, pos)? {
            return Ok(exact(false));
        }
        Ok(acc)
    }

    /// The literal holds at `node` or below it.
    fn somewhere(&self, node: &Arc<Bouquet>, phi: &Formula, pos: bool) -> Result<V> {
        let here = self.eval(node, phi, pos)?;
        if here.value && here.exact {
            return Ok(here);
        }
        Ok(join(here, self.below(node, phi, pos)?))
    }
}

/// `m` when the literal is equivalent to `<>^m T` by its shape; `<>^{m+1} T`
/// holds exactly at rank `>= m+1`.
fn top_power(phi: &Formula, pos: bool) -> Option<usize> {
    match (phi, pos) {
        (Formula::Top, true) | (Formula::Bot, false) => Some(0),
        (Formula::Not(a), p) => top_power(a, !p),
        (Formula::Diamond(a), true) => top_power(a, true).map(|m| m + 1),
        _ => None,
    }
}

fn join(x: V, y: V) -> V {
    if (x.value && x.exact) || (y.value && y.exact) {
        exact(true)
    } else {
        V { value: x.value || y.value, exact: x.exact && y.exact }
    }
}

/// Truth of `phi` at the node reached by `path`; generated families are
/// examined up to their first `k` members.
pub fn mc_bouquet(b: &Arc<Bouquet>, path: &[usize], phi: &Formula, k: usize) -> Result<Truth> {
    let node = b.resolve(path)?;
    let v = Checker { k, budget: gl::DEFAULT_BUDGET }.eval(&node, phi, true)?;
    Ok(match (v.value, v.exact) {
        (true, true) => Truth::True,
        (false, true) => Truth::False,
        (true, false) => Truth::TrueUpTo(k),
        (false, false) => Truth::FalseUpTo(k),
    })
}

/// A copy of `b` with every generated family replaced by its first `k`
/// members as ordinary children.
pub fn materialize(b: &Arc<Bouquet>, k: usize) -> Result<Arc<Bouquet>> {
    let mut children = b
        .children
        .iter()
        .map(|c| Ok(Child { node: materialize(&c.node, k)?, mult: c.mult }))
        .collect::<Result<Vec<_>>>()?;
    if let Some(f) = &b.family {
        for i in 0..k {
            children.push(Child { node: materialize(&f.member(i)?, k)?, mult: Mult::Finite(1) });
        }
    }
    Bouquet::new(b.id, b.val.clone(), children, None)
}

/// The root of the bouquet for a formula stream: a generated family whose
/// member `i` satisfies `gamma_slice(s, i)`, with the first `k` members checked
/// and materialized.
pub fn satisfy_stream_prefix(s: &FormulaStreamPair, k: usize, budget: usize) -> Result<Arc<Bouquet>> {
    let family = Family::new(Schema::Prover { stream: s.clone(), templates: None, budget }, OrdTerm::omega())?;
    for i in 0..k {
        family.member(i)?;
    }
    Bouquet::new(0, s.root_literals.clone(), Vec::new(), Some(family))
}

// ---------------------------------------------------------------- JSON

#[derive(Serialize, Deserialize)]
struct NodeJson {
    #[serde(default)]
    id: u64,
    #[serde(with = "gl::var_names", default)]
    val: BTreeSet<u32>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    mult: Mult,
    #[serde(default)]
    children: Vec<NodeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<FamilyJson>,
}

fn one() -> Mult {
    Mult::Finite(1)
}

fn is_one(m: &Mult) -> bool {
    *m == Mult::Finite(1)
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    schema: String,
    #[serde(default)]
    params: Value,
    #[serde(default)]
    rank: Option<OrdTerm>,
}

fn from_json(j: &NodeJson) -> Result<Arc<Bouquet>> {
    let children = j
        .children
        .iter()
        .map(|c| Ok(Child { node: from_json(c)?, mult: c.mult }))
        .collect::<Result<Vec<_>>>()?;
    let family = match &j.family {
        None => None,
        Some(f) => Some(Family::new(schema_from_json(f, &j.val)?, f.rank.clone().unwrap_or_else(OrdTerm::omega))?),
    };
    Bouquet::new(j.id, j.val.clone(), children, family)
}

fn schema_from_json(f: &FamilyJson, root: &BTreeSet<u32>) -> Result<Schema> {
    let p = &f.params;
    let budget = p.get("budget").and_then(Value::as_u64).map_or(gl::DEFAULT_BUDGET, |b| b as usize);
    match f.schema.as_str() {
        "chain" => {
            let start = p.get("start").and_then(Value::as_u64).unwrap_or(0);
            let val = match p.get("val") {
                None => BTreeSet::new(),
                Some(v) => {
                    let names: Vec<String> = serde_json::from_value(v.clone())
                        .map_err(|e| Error::Input(format!("chain val: {e}")))?;
                    names
                        .iter()
                        .map(|n| {
                            n.strip_prefix('p')
                                .and_then(|k| k.parse().ok())
                                .ok_or_else(|| Error::Input(format!("bad variable name {n:?}")))
                        })
                        .collect::<Result<_>>()?
                }
            };
            Ok(Schema::Chain { start, val })
        }
        "prover" => {
            if let Some(name) = p.get("stream").and_then(Value::as_str) {
                let mut stream = FormulaStreamPair::named(name)
                    .ok_or_else(|| Error::Input(format!("unknown stream {name:?}")))?;
                stream.root_literals = root.clone();
                return Ok(Schema::Prover { stream, templates: None, budget });
            }
            match (p.get("psi").and_then(Value::as_str), p.get("phi").and_then(Value::as_str)) {
                (Some(psi), Some(phi)) => Ok(Schema::Prover {
                    stream: FormulaStreamPair::from_templates("custom", psi, phi, root.clone())?,
                    templates: Some((psi.to_string(), phi.to_string())),
                    budget,
                }),
                _ => Err(Error::Input("prover family needs \"stream\" or both \"psi\" and \"phi\"".into())),
            }
        }
        other => Err(Error::Input(format!("unknown family schema {other:?}"))),
    }
}

fn to_json(b: &Bouquet, mult: Mult) -> NodeJson {
    NodeJson {
        id: b.id,
        val: b.val.clone(),
        mult,
        children: b.children.iter().map(|c| to_json(&c.node, c.mult)).collect(),
        family: b.family.as_ref().map(|f| {
            let (schema, params) = match &f.schema {
                Schema::Chain { start, val } => (
                    "chain",
                    json!({"start": start, "val": val.iter().map(|v| format!("p{v}")).collect::<Vec<_>>()}),
                ),
                Schema::Prover { templates: Some((psi, phi)), budget, .. } => {
                    ("prover", json!({"psi": psi, "phi": phi, "budget": budget}))
                }
                Schema::Prover { stream, templates: None, budget } => {
                    ("prover", json!({"stream": stream.name, "budget": budget}))
                }
            };
            FamilyJson { schema: schema.into(), params, rank: Some(f.rank.clone()) }
        }),
    }
}

pub fn parse_bouquet(text: &str) -> Result<Arc<Bouquet>> {
    let j: NodeJson = serde_json::from_str(text).map_err(|e| Error::Input(format!("bouquet JSON: {e}")))?;
    from_json(&j)
}

pub fn bouquet_to_json(b: &Bouquet) -> Value {
    serde_json::to_value(to_json(b, Mult::Finite(1))).expect("bouquet JSON is always serializable")
}

/// Root with a chain family of declared rank ω.
pub fn chain_family(id: u64, start: u64) -> Arc<Bouquet> {
    let f = Family::new(Schema::Chain { start, val: BTreeSet::new() }, OrdTerm::omega()).unwrap();
    Bouquet::new(id, BTreeSet::new(), Vec::new(), Some(f)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        gl::parse_formula(s).unwrap()
    }

    fn leaf() -> Arc<Bouquet> {
        Bouquet::leaf(0, BTreeSet::new())
    }

    fn two_leaves() -> Arc<Bouquet> {
        parse_bouquet(r#"{"id":0,"children":[{"id":1,"val":["p0"]},{"id":2}]}"#).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(leaf().rank(), &OrdTerm::zero());
        for n in 0..6 {
            assert_eq!(chain(n, &BTreeSet::new()).rank(), &OrdTerm::nat(n));
        }
        let b = chain_family(0, 0);
        assert_eq!(b.rank(), &OrdTerm::omega());
        check_family(&b, 10, DEFAULT_SEARCH_BUDGET).unwrap();
    }

    #[test]
    fn enumeration_examples() {
        let b = two_leaves();
        let io = b.daughters(EnumMode::InfinitelyOften).unwrap();
        let ids: Vec<u64> = (0..6).map(|i| io.get(i).unwrap().1.id).collect();
        assert_eq!(ids, vec![1, 2, 1, 2, 1, 2]);
        let eo = b.daughters(EnumMode::EachOnce).unwrap();
        assert_eq!(eo.len(), Some(2));
        assert_eq!(eo.get(1).unwrap().1.id, 2);
        assert!(eo.get(2).is_err());
        let w = parse_bouquet(r#"{"id":0,"children":[{"id":1,"mult":"w"}]}"#).unwrap();
        let eo = w.daughters(EnumMode::EachOnce).unwrap();
        let pos: Vec<usize> = (0..4).map(|i| eo.get(i).unwrap().0).collect();
        assert_eq!(pos, vec![0, 1, 2, 3]);
        assert!(leaf().daughters(EnumMode::InfinitelyOften).is_err());
    }

    #[test]
    fn infinitely_often_dovetails() {
        let b = chain_family(0, 0);
        let io = b.daughters(EnumMode::InfinitelyOften).unwrap();
        let pos: Vec<usize> = (0..10).map(|i| io.position(i).unwrap()).collect();
        assert_eq!(pos, vec![0, 0, 1, 0, 1, 2, 0, 1, 2, 3]);
        assert_eq!(io.first_index_of(2).unwrap(), 5);
        let led = b.daughters(EnumMode::InfinitelyOften).unwrap().with_lead(2);
        assert_eq!(led.position(0).unwrap(), 2);
        assert_eq!(led.position(5).unwrap(), 0);
        assert_eq!(led.first_index_of(0).unwrap(), 5);
    }

    fn ranked(ranks: Vec<u64>) -> Arc<Bouquet> {
        let kids = ranks.iter().map(|&r| Child { node: chain(r, &BTreeSet::new()), mult: Mult::Finite(1) }).collect();
        let f = Family::new(Schema::Chain { start: 1, val: BTreeSet::new() }, OrdTerm::omega()).unwrap();
        Bouquet::new(0, BTreeSet::new(), kids, Some(f)).unwrap()
    }

    #[test]
    fn dominating_examples() {
        let d = dominating_subsequence(chain_family(0, 0).daughters(EnumMode::EachOnce).unwrap(), 100).unwrap();
        assert_eq!(d.prefix(4).unwrap(), vec![1, 2, 3, 4]);
        // One finite child of rank 0, then family ranks 1, 2, 3, ...
        let d = dominating_subsequence(ranked(vec![0]).daughters(EnumMode::EachOnce).unwrap(), 100).unwrap();
        assert_eq!(d.prefix(3).unwrap(), vec![1, 2, 3]);
        let flat = parse_bouquet(r#"{"id":0,"children":[{"id":1,"mult":"w","children":[{"id":2}]}]}"#).unwrap();
        let d = dominating_subsequence(flat.daughters(EnumMode::EachOnce).unwrap(), 50).unwrap();
        assert!(matches!(d.get(0), Err(Error::Integrity(_))));
    }

    #[test]
    fn dominating_greedy_on_alternating_ranks() {
        // Family start 0 interleaved with an ω copy of a leaf: ranks 0,0,1,0,2,0,...
        let j = r#"{"id":0,"children":[{"id":1,"mult":"w"}],"family":{"schema":"chain","params":{"start":0}}}"#;
        let b = parse_bouquet(j).unwrap();
        let e = b.daughters(EnumMode::EachOnce).unwrap();
        let ranks: Vec<u64> = (0..6).map(|i| e.rank(i).unwrap().as_nat().unwrap()).collect();
        assert_eq!(ranks, vec![0, 0, 1, 0, 2, 0]);
        let d = dominating_subsequence(e, 100).unwrap();
        assert_eq!(d.prefix(3).unwrap(), vec![2, 4, 6]);
    }

    #[test]
    fn mc_examples() {
        assert_eq!(mc_bouquet(&leaf(), &[], &f("[]F"), 0).unwrap(), Truth::True);
        let b = two_leaves();
        assert_eq!(mc_bouquet(&b, &[], &f("<>(p0&[]F) & <>(~p0&[]F)"), 0).unwrap(), Truth::True);
        let w = chain_family(0, 0);
        for n in 0..=5 {
            let t = mc_bouquet(&w, &[], &Formula::diamond_power(n), 8).unwrap();
            assert!(t.value(), "<>^{n} T: {t}");
        }
        assert_eq!(mc_bouquet(&w, &[], &f("<>(p0 & ~p0)"), 8).unwrap(), Truth::False);
    }

    #[test]
    fn stream_prefix_examples() {
        let s = FormulaStreamPair::named("diamond-chain").unwrap();
        let b = satisfy_stream_prefix(&s, 3, gl::DEFAULT_BUDGET).unwrap();
        let fam = b.family.as_ref().unwrap();
        assert_eq!(fam.materialized(), 3);
        for i in 0..3 {
            let m = fam.member(i).unwrap();
            assert_eq!(m.rank(), &OrdTerm::nat(i as u64));
            for g in gamma_slice(&s, i).unwrap() {
                assert_eq!(mc_bouquet(&m, &[], &g, 0).unwrap(), Truth::True);
            }
        }
        let t = satisfy_stream_prefix(&FormulaStreamPair::named("top").unwrap(), 4, gl::DEFAULT_BUDGET).unwrap();
        for i in 0..4 {
            assert_eq!(t.family.as_ref().unwrap().member(i).unwrap().rank(), &OrdTerm::zero());
        }
        let z = satisfy_stream_prefix(&s, 0, gl::DEFAULT_BUDGET).unwrap();
        assert_eq!(z.family.as_ref().unwrap().materialized(), 0);
        let bad = FormulaStreamPair::from_templates("bad", "p{i} & ~p{i}", "T", BTreeSet::new()).unwrap();
        assert!(matches!(satisfy_stream_prefix(&bad, 2, 1000), Err(Error::Integrity(m)) if m.contains("slice 0")));
    }

    #[test]
    fn json_round_trip() {
        let j = r#"{"id":0,"val":["p1"],"children":[{"id":1,"mult":"w"},{"id":2,"mult":3,"children":[{"id":3}]}],"family":{"schema":"prover","params":{"stream":"diamond-chain"},"rank":"w"}}"#;
        let b = parse_bouquet(j).unwrap();
        let v = bouquet_to_json(&b);
        let back = parse_bouquet(&v.to_string()).unwrap();
        assert_eq!(bouquet_to_json(&back), v);
        assert_eq!(b.rank(), &OrdTerm::omega());
        assert!(parse_bouquet(r#"{"id":0,"children":[{"id":1,"mult":0}]}"#).is_err());
        assert!(parse_bouquet(r#"{"id":0,"family":{"schema":"chain","rank":"w+1"}}"#).is_err());
    }
}
