//! Surjective d-maps from the ordinal Icard space `(e^λΘ + 1)_λ` onto a
//! finitely presented ω-bouquet of rank Θ.
//!
//! Results are paths of `EachOnce` daughter positions, as in [`crate::bouquet`].

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::Rng;
use serde::Serialize;

use crate::bouquet::{dominating_subsequence, Bouquet, DaughterEnum, Dominating, EnumMode, DEFAULT_SEARCH_BUDGET};
use crate::error::{domain, internal, Error, Result};
use crate::ordinal::{
    add, degree_segment, finite_remainder, fund_seq, hyper_exp, hyper_log, left_subtract, max_limit_exponent,
    omega_power, OrdTerm, Segment,
};
use crate::par::{map, try_map, Mode};
use crate::topology::{basic_nbhd_member, split_lambda, BasicNbhd, SimpleFn};

/// Cap on the number of finite blocks scanned by one λ = 1 step.
pub const DEFAULT_STEP_BUDGET: usize = 1_000_000;

/// Blocks `X_ι = [α_ι, β_ι]` of a successor-stage node of rank Θ+1.
#[derive(Debug, Clone)]
pub struct SuccBlocks {
    pub lambda: OrdTerm,
    pub theta: OrdTerm,
    /// `e^λΘ + 1`.
    pub p: OrdTerm,
    /// `InfinitelyOften`, with a rank-Θ daughter at index 0.
    pub e: DaughterEnum,
}

impl SuccBlocks {
    pub fn base(&self) -> OrdTerm {
        hyper_exp(&self.lambda, &self.theta)
    }

    /// `e^λ θ_k`.
    pub fn top_of(&self, k: usize) -> Result<OrdTerm> {
        Ok(hyper_exp(&self.lambda, &self.e.rank(k)?))
    }

    pub fn beta(&self, iota: &OrdTerm) -> Result<OrdTerm> {
        let k = finite_remainder(iota) as usize;
        Ok(hyper_exp(&iota.succ(), &add(&self.p, &self.top_of(k)?)))
    }

    pub fn alpha(&self, iota: &OrdTerm) -> Result<OrdTerm> {
        if iota.is_zero() {
            return Ok(OrdTerm::zero());
        }
        match iota.pred() {
            None => Ok(hyper_exp(iota, &self.p)),
            Some(prev) => Ok(self.beta(&prev)?.succ()),
        }
    }

    /// The unique `ι` with `α_ι <= xi <= β_ι`.
    pub fn locate(&self, xi: &OrdTerm) -> Result<OrdTerm> {
        let (mu, n0) = match degree_segment(&self.p, xi) {
            Segment::Below(l) if l.is_zero() => (OrdTerm::zero(), 0),
            Segment::UpTo(d) => {
                if d >= self.lambda {
                    return domain(format!("{xi} lies above every block"));
                }
                (d.limit_floor(), finite_remainder(&d).saturating_sub(1))
            }
            Segment::Below(_) => (max_limit_exponent(&self.p, xi, &self.lambda)?, 0),
        };
        for n in n0..n0 + 4 {
            let iota = add(&mu, &OrdTerm::nat(n));
            if iota >= self.lambda {
                break;
            }
            if self.alpha(&iota)? <= *xi && *xi <= self.beta(&iota)? {
                return Ok(iota);
            }
        }
        internal(format!("locate_block_succ: no block found for {xi}"))
    }
}

/// W-sets and breakpoints of a limit-stage node.
#[derive(Debug)]
pub struct LimitBlocks {
    pub lambda: OrdTerm,
    pub d: Dominating,
}

impl LimitBlocks {
    /// `A_i = e^λ θ_{m_i}`.
    pub fn breakpoint(&self, i: usize) -> Result<OrdTerm> {
        Ok(hyper_exp(&self.lambda, &self.d.get(i)?.1))
    }

    pub fn m(&self, i: usize) -> Result<usize> {
        Ok(self.d.get(i)?.0)
    }

    /// `(A_{j+1}, A_j, e^λθ_j)`.
    fn abc(&self, j: usize) -> Result<(OrdTerm, OrdTerm, OrdTerm)> {
        let c = hyper_exp(&self.lambda, &self.d.enumeration().rank(j)?);
        Ok((self.breakpoint(j + 1)?, self.breakpoint(j)?, c))
    }

    pub fn gamma(&self, j: usize, iota: &OrdTerm) -> Result<OrdTerm> {
        let (a, b, _) = self.abc(j)?;
        Ok(add(&a, &hyper_exp(iota, &b.succ())))
    }

    pub fn delta(&self, j: usize, iota: &OrdTerm) -> Result<OrdTerm> {
        let (_, b, c) = self.abc(j)?;
        Ok(add(&self.gamma(j, iota)?, &hyper_exp(iota, &add(&b.succ(), &c))))
    }

    /// Membership in `W_{jι}` straight from its definition.
    pub fn member(&self, j: usize, iota: &OrdTerm, xi: &OrdTerm) -> Result<bool> {
        if *iota >= self.lambda {
            return Ok(false);
        }
        let (a, b, c) = self.abc(j)?;
        let in_zero = self.gamma(j, iota)? < *xi && *xi <= self.delta(j, iota)?;
        let v = hyper_log(iota, xi);
        Ok(in_zero && b < v && v <= add(&a.succ(), &c))
    }

    /// The least `i` with `xi <= A_i`.
    pub fn segment(&self, xi: &OrdTerm) -> Result<usize> {
        for i in 0..DEFAULT_SEARCH_BUDGET {
            if *xi <= self.breakpoint(i)? {
                return Ok(i);
            }
        }
        Err(Error::Budget(format!("no breakpoint above {xi} among {DEFAULT_SEARCH_BUDGET}")))
    }

    /// The `(j, ι)` with `xi ∈ W_{jι}`, if any.
    pub fn locate(&self, xi: &OrdTerm) -> Result<Option<(usize, OrdTerm)>> {
        let i = self.segment(xi)?;
        if i < 2 {
            return Ok(None);
        }
        let j = i - 2;
        let (a, b, _) = self.abc(j)?;
        let rho = left_subtract(&a, xi)?;
        let Segment::UpTo(iota) = degree_segment(&b.succ(), &rho) else {
            return Ok(None);
        };
        if self.member(j, &iota, xi)? {
            Ok(Some((j, iota)))
        } else {
            Ok(None)
        }
    }
}

#[derive(Debug)]
enum Info {
    Leaf,
    Tm0(DaughterEnum),
    Succ(SuccBlocks),
    Limit(LimitBlocks),
}

/// One step of an evaluation; `x` is the local coordinate entering the step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    Head { x: OrdTerm },
    Top { x: OrdTerm },
    Tm0 { x: OrdTerm, block: usize, alpha: OrdTerm, beta: OrdTerm },
    SuccY { x: OrdTerm, iota: OrdTerm, alpha: OrdTerm, beta: OrdTerm },
    SuccZ { x: OrdTerm, iota: OrdTerm, alpha: OrdTerm, beta: OrdTerm, k: usize },
    LimitW { x: OrdTerm, j: usize, iota: OrdTerm },
    LimitH { x: OrdTerm, segment: usize, m: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct Trace {
    pub path: Vec<usize>,
    #[serde(skip)]
    pub node: Option<Arc<Bouquet>>,
    pub steps: Vec<Step>,
}

#[derive(Debug)]
pub struct DMapSpec {
    pub lambda: OrdTerm,
    /// `a` in `λ = a + ω^b`.
    pub head: OrdTerm,
    /// `ω^b`.
    pub tail: OrdTerm,
    pub root: Arc<Bouquet>,
    pub theta: OrdTerm,
    pub top: OrdTerm,
    pub check_ranks: bool,
    pub step_budget: usize,
    info: Mutex<HashMap<usize, Arc<Info>>>,
    /// Nodes whose info is cached, kept alive so cache keys stay unique.
    pinned: Mutex<Vec<Arc<Bouquet>>>,
}

pub fn build(lambda: &OrdTerm, b: &Arc<Bouquet>) -> Result<DMapSpec> {
    let (head, tail, _) = split_lambda(lambda)?;
    let theta = b.rank().clone();
    let spec = DMapSpec {
        lambda: lambda.clone(),
        head,
        tail,
        root: b.clone(),
        top: hyper_exp(lambda, &theta),
        theta,
        check_ranks: cfg!(debug_assertions),
        step_budget: DEFAULT_STEP_BUDGET,
        info: Mutex::new(HashMap::new()),
        pinned: Mutex::new(Vec::new()),
    };
    spec.info(b)?;
    Ok(spec)
}

impl DMapSpec {
    pub fn with_rank_checks(mut self, on: bool) -> Self {
        self.check_ranks = on;
        self
    }

    fn info(&self, node: &Arc<Bouquet>) -> Result<Arc<Info>> {
        let key = Arc::as_ptr(node) as usize;
        if let Some(i) = self.info.lock().unwrap().get(&key) {
            return Ok(i.clone());
        }
        let info = Arc::new(self.make_info(node)?);
        self.pinned.lock().unwrap().push(node.clone());
        self.info.lock().unwrap().insert(key, info.clone());
        Ok(info)
    }

    fn make_info(&self, node: &Arc<Bouquet>) -> Result<Info> {
        let r = node.rank();
        if r.is_zero() {
            return Ok(Info::Leaf);
        }
        if self.tail.is_one() {
            let mode = if r.is_limit() { EnumMode::EachOnce } else { EnumMode::InfinitelyOften };
            return Ok(Info::Tm0(node.daughters(mode)?));
        }
        match r.pred() {
            Some(theta) => {
                let lead = node.first_position_of_rank(&theta).ok_or_else(|| {
                    Error::Integrity(format!("node {} of rank {r} has no daughter of rank {theta}", node.id))
                })?;
                let e = node.daughters(EnumMode::InfinitelyOften)?.with_lead(lead);
                let p = hyper_exp(&self.tail, &theta).succ();
                Ok(Info::Succ(SuccBlocks { lambda: self.tail.clone(), theta, p, e }))
            }
            None => {
                let d = dominating_subsequence(node.daughters(EnumMode::EachOnce)?, DEFAULT_SEARCH_BUDGET)?;
                Ok(Info::Limit(LimitBlocks { lambda: self.tail.clone(), d }))
            }
        }
    }

    /// Successor-stage blocks of the node at `path`, if it is one.
    pub fn succ_blocks(&self, path: &[usize]) -> Result<Option<SuccBlocks>> {
        match &*self.info(&self.root.resolve(path)?)? {
            Info::Succ(s) => Ok(Some(s.clone())),
            _ => Ok(None),
        }
    }

    /// Runs `f` on the limit-stage blocks of the node at `path`, if it is one.
    pub fn with_limit_blocks<T>(&self, path: &[usize], f: impl FnOnce(&LimitBlocks) -> Result<T>) -> Result<Option<T>> {
        match &*self.info(&self.root.resolve(path)?)? {
            Info::Limit(l) => f(l).map(Some),
            _ => Ok(None),
        }
    }

    /// `e^{ω^b}(rank)` for a node, its domain top in local coordinates.
    pub fn local_top(&self, node: &Bouquet) -> OrdTerm {
        hyper_exp(&self.tail, node.rank())
    }

    pub fn eval(&self, xi: &OrdTerm) -> Result<Vec<usize>> {
        Ok(self.eval_traced(xi, false)?.path)
    }

    pub fn eval_node(&self, xi: &OrdTerm) -> Result<(Vec<usize>, Arc<Bouquet>)> {
        let t = self.eval_traced(xi, false)?;
        Ok((t.path, t.node.expect("eval always reaches a node")))
    }

    pub fn eval_traced(&self, xi: &OrdTerm, record: bool) -> Result<Trace> {
        if *xi > self.top {
            return domain(format!("{xi} is above the domain top {}", self.top));
        }
        let x = hyper_log(&self.head, xi);
        let mut steps = Vec::new();
        if record && !self.head.is_zero() {
            steps.push(Step::Head { x: xi.clone() });
        }
        let (path, node) = self.run(&self.root, x, record.then_some(&mut steps))?;
        if self.check_ranks && *node.rank() != hyper_log(&self.lambda, xi) {
            return internal(format!(
                "rank not preserved at {xi}: image rank {} vs {}",
                node.rank(),
                hyper_log(&self.lambda, xi)
            ));
        }
        Ok(Trace { path, node: Some(node), steps })
    }

    /// Evaluates the d-map onto the subbouquet at `node` at local coordinate `x`.
    pub fn eval_local(&self, node: &Arc<Bouquet>, x: &OrdTerm) -> Result<(Vec<usize>, Arc<Bouquet>)> {
        if *x > self.local_top(node) {
            return domain(format!("{x} is above the local top {}", self.local_top(node)));
        }
        self.run(node, x.clone(), None)
    }

    pub fn eval_local_traced(&self, node: &Arc<Bouquet>, x: &OrdTerm) -> Result<Trace> {
        let mut steps = Vec::new();
        let (path, n) = self.run(node, x.clone(), Some(&mut steps))?;
        Ok(Trace { path, node: Some(n), steps })
    }

    fn run(
        &self,
        start: &Arc<Bouquet>,
        mut x: OrdTerm,
        mut trace: Option<&mut Vec<Step>>,
    ) -> Result<(Vec<usize>, Arc<Bouquet>)> {
        let mut node = start.clone();
        let mut path = Vec::new();
        loop {
            if x == self.local_top(&node) {
                if let Some(t) = trace.as_deref_mut() {
                    t.push(Step::Top { x });
                }
                return Ok((path, node));
            }
            let info = self.info(&node)?;
            let (pos, next, nx, step) = match &*info {
                Info::Leaf => return internal(format!("leaf {} reached at {x} > 0", node.id)),
                Info::Tm0(e) => {
                    let mut alpha = OrdTerm::zero();
                    let mut found = None;
                    for i in 0..self.step_budget {
                        let (p, d) = e.get(i)?;
                        let beta = add(&alpha, &hyper_exp(&OrdTerm::one(), d.rank()));
                        if x <= beta {
                            found = Some((i, p, d, alpha, beta));
                            break;
                        }
                        alpha = beta.succ();
                    }
                    let (i, p, d, alpha, beta) = found
                        .ok_or_else(|| Error::Budget(format!("no block below {x} within {} blocks", self.step_budget)))?;
                    let nx = left_subtract(&alpha, &x)?;
                    (p, d, nx, Step::Tm0 { x: x.clone(), block: i, alpha, beta })
                }
                Info::Succ(s) => {
                    let iota = s.locate(&x)?;
                    let (alpha, beta) = (s.alpha(&iota)?, s.beta(&iota)?);
                    let y = hyper_log(&iota.succ(), &x);
                    if y <= s.base() {
                        let (p, d) = s.e.get(0)?;
                        (p, d, y, Step::SuccY { x: x.clone(), iota, alpha, beta })
                    } else {
                        let k = finite_remainder(&iota) as usize;
                        if y > add(&s.p, &s.top_of(k)?) {
                            return internal(format!("{x} in X_{iota} exceeds the Z bound"));
                        }
                        let (p, d) = s.e.get(k)?;
                        let z = hyper_log(&OrdTerm::one(), &y);
                        (p, d, z, Step::SuccZ { x: x.clone(), iota, alpha, beta, k })
                    }
                }
                Info::Limit(l) => match l.locate(&x)? {
                    Some((j, iota)) => {
                        let d = l.d.enumeration().node().daughter(j)?;
                        let nx = hyper_log(&iota.succ(), &x);
                        (j, d, nx, Step::LimitW { x: x.clone(), j, iota })
                    }
                    None => {
                        let i = l.segment(&x)?;
                        let m = l.m(i)?;
                        let d = node.daughter(m)?;
                        (m, d, x.clone(), Step::LimitH { x: x.clone(), segment: i, m })
                    }
                },
            };
            if nx > self.local_top(&next) {
                return internal(format!("step {step:?} leaves the domain of daughter {pos}"));
            }
            if let Some(t) = trace.as_deref_mut() {
                t.push(step);
            }
            path.push(pos);
            node = next;
            x = nx;
        }
    }

    /// An ordinal mapped to the node at `path`, verified by evaluation.
    pub fn preimage_witness(&self, path: &[usize]) -> Result<OrdTerm> {
        let w = hyper_exp(&self.head, &self.local_witness(&self.root, path, 0)?);
        let got = self.eval(&w)?;
        if got != path {
            return internal(format!("witness {w} for {path:?} evaluates to {got:?}"));
        }
        Ok(w)
    }

    /// A local witness for `path` below `node`; `late` selects a later block
    /// for the first step.
    pub fn local_witness(&self, node: &Arc<Bouquet>, path: &[usize], late: usize) -> Result<OrdTerm> {
        let Some((&p, rest)) = path.split_first() else {
            return Ok(self.local_top(node));
        };
        let d = node.resolve(&[p])?;
        let w = self.local_witness(&d, rest, 0)?;
        match &*self.info(node)? {
            Info::Leaf => internal("leaf has no daughters"),
            Info::Tm0(e) => {
                let i = e.index_of(p, late)?;
                let mut alpha = OrdTerm::zero();
                for j in 0..i {
                    alpha = add(&alpha, &hyper_exp(&OrdTerm::one(), &e.rank(j)?)).succ();
                }
                Ok(add(&alpha, &w))
            }
            Info::Succ(s) => {
                if late == 0 && w.is_zero() && p == s.e.lead {
                    return Ok(OrdTerm::zero());
                }
                let (mu, k) = if late == 0 || self.tail == OrdTerm::omega() {
                    (OrdTerm::zero(), s.e.index_of(p, late)?)
                } else {
                    (fund_seq(&self.tail, late as u64)?.limit_floor(), s.e.index_of(p, 0)?)
                };
                let iota = add(&mu, &OrdTerm::nat(k as u64));
                let inner = if w.is_zero() { s.p.clone() } else { add(&s.p, &omega_power(&w)) };
                Ok(hyper_exp(&iota.succ(), &inner))
            }
            Info::Limit(l) => {
                let iota = if late == 0 {
                    OrdTerm::one()
                } else if self.tail == OrdTerm::omega() {
                    OrdTerm::nat(1 + late as u64)
                } else {
                    fund_seq(&self.tail, late as u64)?.limit_floor().succ()
                };
                let (a, b, _) = l.abc(p)?;
                let low = hyper_exp(&iota, &b.succ());
                let high = if w.is_zero() { low.clone() } else { hyper_exp(&iota, &add(&b.succ(), &omega_power(&w))) };
                Ok(add(&add(&a, &low), &high))
            }
        }
    }

    pub fn rank_preservation_check(&self, xi: &OrdTerm) -> Result<bool> {
        let (_, node) = self.eval_node(xi)?;
        Ok(*node.rank() == hyper_log(&self.lambda, xi))
    }

    /// Openness at the top of the subbouquet at `path`: inside `samples` random
    /// basic neighborhoods of the local top, looks for preimages of each of the
    /// first `prefix` daughters. Non-limit nodes must reach every daughter;
    /// limit nodes must reach a final segment of them.
    pub fn local_openness_check<R: Rng + ?Sized>(
        &self,
        path: &[usize],
        samples: usize,
        prefix: usize,
        rng: &mut R,
    ) -> Result<OpennessReport> {
        let node = self.root.resolve(path)?;
        let mut report = OpennessReport { path: path.to_vec(), neighborhoods: 0, preimages: 0, failures: Vec::new() };
        if node.rank().is_zero() {
            return Ok(report);
        }
        let x = hyper_exp(&self.lambda, node.rank());
        let count = node.daughter_count().map_or(prefix, |c| c.min(prefix));
        for _ in 0..samples {
            let r = self.random_radius(&x, rng);
            let nbhd = BasicNbhd::new(x.clone(), r.clone())?;
            report.neighborhoods += 1;
            let mut reached = Vec::new();
            for p in 0..count {
                let mut hit = false;
                for late in 0..24 {
                    let lw = match self.local_witness(&node, &[p], late) {
                        Ok(w) => w,
                        Err(Error::Domain(_)) => break,
                        Err(e) => return Err(e),
                    };
                    let w = hyper_exp(&self.head, &lw);
                    if basic_nbhd_member(&w, &nbhd) {
                        let (got, _) = self.eval_local(&node, &hyper_log(&self.head, &w))?;
                        if got != [p] {
                            report.failures.push(format!("{path:?}: late witness {w} maps to {got:?}, not [{p}]"));
                        }
                        report.preimages += 1;
                        hit = true;
                        break;
                    }
                }
                reached.push(hit);
            }
            let ok = if node.rank().is_limit() {
                let first = reached.iter().position(|&h| h);
                first.is_some_and(|f| reached[f..].iter().all(|&h| h)) || reached.is_empty()
            } else {
                reached.iter().all(|&h| h)
            };
            if !ok {
                report.failures.push(format!("{path:?}: radius {r:?} misses daughters {reached:?}"));
            }
        }
        Ok(report)
    }

    fn random_radius<R: Rng + ?Sized>(&self, x: &OrdTerm, rng: &mut R) -> SimpleFn {
        let mut levels = vec![OrdTerm::zero()];
        if self.lambda > OrdTerm::one() {
            levels.push(OrdTerm::one());
        }
        if !self.head.is_zero() {
            levels.push(self.head.clone());
        }
        if self.tail > OrdTerm::omega() {
            levels.push(add(&self.head, &OrdTerm::omega()));
        }
        let mut r = SimpleFn::new();
        for lvl in levels {
            if lvl >= self.lambda || rng.gen_bool(0.4) {
                continue;
            }
            let v = hyper_log(&lvl, x);
            let mut cands = vec![OrdTerm::zero(), OrdTerm::nat(3), OrdTerm::omega()];
            if let Some(p) = v.pred() {
                cands.push(p);
            } else if v.is_limit() {
                cands.push(fund_seq(&v, 2).unwrap_or_else(|_| OrdTerm::zero()));
            }
            cands.retain(|c| *c < v);
            if !cands.is_empty() {
                r.insert(lvl, cands[rng.gen_range(0..cands.len())].clone());
            }
        }
        r
    }

    /// Random points of the domain; each lands near some block of the
    /// construction.
    pub fn sample_points<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<OrdTerm>> {
        let mut out = Vec::with_capacity(n);
        let mut tries = 0;
        while out.len() < n && tries < 20 * n + 100 {
            tries += 1;
            let local = self.sample_local(&self.root, 3, rng)?;
            let mut xi = hyper_exp(&self.head, &local);
            match rng.gen_range(0..8) {
                0 => xi = xi.succ(),
                1 => xi = add(&xi, &OrdTerm::omega()),
                _ => {}
            }
            if xi <= self.top {
                out.push(xi);
            }
        }
        Ok(out)
    }

    fn iota_candidates<R: Rng + ?Sized>(&self, rng: &mut R) -> OrdTerm {
        let finite = OrdTerm::nat(rng.gen_range(0..4));
        if self.tail == OrdTerm::omega() || rng.gen_bool(0.5) {
            return finite;
        }
        let mu = fund_seq(&self.tail, rng.gen_range(1..3)).map(|m| m.limit_floor()).unwrap_or_else(|_| OrdTerm::zero());
        add(&mu, &finite)
    }

    fn sample_local<R: Rng + ?Sized>(&self, node: &Arc<Bouquet>, depth: usize, rng: &mut R) -> Result<OrdTerm> {
        let top = self.local_top(node);
        if node.rank().is_zero() || depth == 0 || rng.gen_bool(0.1) {
            return Ok(if rng.gen_bool(0.5) { top } else { OrdTerm::zero() });
        }
        let info = self.info(node)?;
        let x = match &*info {
            Info::Leaf => OrdTerm::zero(),
            Info::Tm0(e) => {
                let bound = e.len().unwrap_or(8).min(8);
                let i = rng.gen_range(0..bound.max(1));
                let mut alpha = OrdTerm::zero();
                for j in 0..i {
                    alpha = add(&alpha, &hyper_exp(&OrdTerm::one(), &e.rank(j)?)).succ();
                }
                let d = e.get(i)?.1;
                add(&alpha, &self.sample_local(&d, depth - 1, rng)?)
            }
            Info::Succ(s) => {
                let iota = self.iota_candidates(rng);
                if iota >= self.tail {
                    return Ok(OrdTerm::zero());
                }
                let alpha = s.alpha(&iota)?;
                match rng.gen_range(0..5) {
                    0 => alpha,
                    1 => s.beta(&iota)?,
                    2 => {
                        let y = self.sample_local(&s.e.get(0)?.1, depth - 1, rng)?;
                        add(&alpha, &hyper_exp(&iota.succ(), &y))
                    }
                    _ => {
                        let k = finite_remainder(&iota) as usize;
                        let sigma = self.sample_local(&s.e.get(k)?.1, depth - 1, rng)?;
                        add(&alpha, &hyper_exp(&iota.succ(), &add(&s.p, &sigma)))
                    }
                }
            }
            Info::Limit(l) => {
                let j = rng.gen_range(0..4);
                match rng.gen_range(0..5) {
                    0 => l.breakpoint(j)?,
                    1 => l.gamma(j, &self.iota_candidates(rng))?,
                    2 => l.delta(j, &self.iota_candidates(rng))?,
                    3 => {
                        let m = l.m(j)?;
                        let s = self.sample_local(&node.daughter(m)?, depth - 1, rng)?;
                        if j == 0 {
                            s
                        } else {
                            add(&l.breakpoint(j - 1)?, &s)
                        }
                    }
                    _ => {
                        let iota = self.iota_candidates(rng);
                        let (a, b, _) = l.abc(j)?;
                        let sigma = self.sample_local(&node.daughter(j)?, depth - 1, rng)?;
                        add(&add(&a, &hyper_exp(&iota, &b.succ())), &hyper_exp(&iota, &add(&b.succ(), &sigma)))
                    }
                }
            }
        };
        Ok(if x > top { top } else { x })
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct OpennessReport {
    pub path: Vec<usize>,
    pub neighborhoods: usize,
    pub preimages: usize,
    pub failures: Vec<String>,
}

/// Certificate counts from [`selftest`].
#[derive(Clone, Debug, Default, Serialize)]
pub struct SelfTestReport {
    pub lambda: String,
    pub theta: String,
    pub top: String,
    pub rank_checks: usize,
    pub partition_checks: usize,
    pub w_checks: usize,
    pub roundtrips: usize,
    pub openness_checks: usize,
    pub failures: Vec<String>,
}

impl SelfTestReport {
    fn merge(&mut self, o: SelfTestReport) {
        self.rank_checks += o.rank_checks;
        self.partition_checks += o.partition_checks;
        self.w_checks += o.w_checks;
        self.roundtrips += o.roundtrips;
        self.openness_checks += o.openness_checks;
        self.failures.extend(o.failures);
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks a built d-map: the top maps to the root, rank preservation, the
/// partition and W-disjointness conditions on `samples` random points and the
/// block boundaries they reach, and witness round-trips on every node of depth
/// at most `depth` among the first `prefix` daughters.
pub fn selftest<R: Rng + ?Sized>(
    s: &DMapSpec,
    samples: usize,
    depth: usize,
    prefix: usize,
    rng: &mut R,
) -> Result<SelfTestReport> {
    selftest_with(s, samples, depth, prefix, rng, Mode::default())
}

pub fn selftest_with<R: Rng + ?Sized>(
    s: &DMapSpec,
    samples: usize,
    depth: usize,
    prefix: usize,
    rng: &mut R,
    mode: Mode,
) -> Result<SelfTestReport> {
    let mut rep = SelfTestReport {
        lambda: s.lambda.to_string(),
        theta: s.theta.to_string(),
        top: s.top.to_string(),
        ..Default::default()
    };
    match s.eval(&s.top) {
        Ok(p) if p.is_empty() => {}
        other => rep.failures.push(format!("top maps to {other:?}")),
    }
    let points = s.sample_points(samples, rng)?;
    for part in try_map(mode, &points, |xi| {
        let mut r = SelfTestReport::default();
        check_point(s, xi, &mut r)?;
        Ok(r)
    })? {
        rep.merge(part);
    }
    let paths = s.root.paths(depth, prefix)?;
    for (path, res) in paths.iter().zip(map(mode, &paths, |p| s.preimage_witness(p))) {
        match res {
            Ok(_) => rep.roundtrips += 1,
            Err(e) => rep.failures.push(format!("witness for {path:?}: {e}")),
        }
    }
    for path in s.root.paths(depth.min(1), prefix.min(3))? {
        let o = s.local_openness_check(&path, 2, 4, rng)?;
        rep.openness_checks += o.neighborhoods;
        rep.failures.extend(o.failures);
    }
    Ok(rep)
}

fn check_point(s: &DMapSpec, xi: &OrdTerm, rep: &mut SelfTestReport) -> Result<()> {
    let trace = match s.eval_traced(xi, true) {
        Ok(t) => t,
        Err(e @ (Error::Internal(_) | Error::Integrity(_))) => {
            rep.failures.push(format!("eval({xi}): {e}"));
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    rep.rank_checks += 1;
    let node = trace.node.clone().unwrap();
    if *node.rank() != hyper_log(&s.lambda, xi) {
        rep.failures.push(format!("rank at {xi}: {} vs {}", node.rank(), hyper_log(&s.lambda, xi)));
    }
    // Replay the steps to recover the node at each stage.
    let mut cur = s.root.clone();
    let mut depth = 0;
    for step in &trace.steps {
        match step {
            Step::Head { .. } | Step::Top { .. } => continue,
            Step::Tm0 { alpha, beta, .. } => {
                for b in [alpha.clone(), beta.clone()] {
                    check_local(s, &cur, &b, rep)?;
                }
            }
            Step::SuccY { x, iota, alpha, beta } | Step::SuccZ { x, iota, alpha, beta, .. } => {
                let Info::Succ(blocks) = &*s.info(&cur)? else {
                    return internal("successor step at a non-successor node");
                };
                rep.partition_checks += 1;
                let next_alpha = blocks.alpha(&iota.succ())?;
                let disjoint = *x < next_alpha
                    && next_alpha == beta.succ()
                    && match iota.pred() {
                        Some(p) => blocks.beta(&p)? < *x,
                        None => true,
                    };
                if !(alpha <= x && x <= beta && disjoint) {
                    rep.failures.push(format!("partition at {x}: X_{iota} = [{alpha}, {beta}]"));
                }
                let y = hyper_log(&iota.succ(), x);
                let is_y = y <= blocks.base();
                let k = finite_remainder(iota) as usize;
                let is_z = blocks.base() < y && y <= add(&blocks.p, &blocks.top_of(k)?);
                if is_y == is_z || is_y != matches!(step, Step::SuccY { .. }) {
                    rep.failures.push(format!("Y/Z split at {x} in X_{iota}"));
                }
                for b in [alpha.clone(), beta.clone(), beta.succ()] {
                    if b < s.local_top(&cur) {
                        check_local(s, &cur, &b, rep)?;
                    }
                }
            }
            Step::LimitW { x, .. } | Step::LimitH { x, .. } => {
                let Info::Limit(l) = &*s.info(&cur)? else {
                    return internal("limit step at a non-limit node");
                };
                rep.w_checks += 1;
                let located = l.locate(x)?;
                let i = l.segment(x)?;
                let mut iotas: Vec<OrdTerm> = (0..4).map(OrdTerm::nat).collect();
                if let Some((_, iota)) = &located {
                    iotas.push(iota.clone());
                    iotas.push(iota.succ());
                }
                if s.tail > OrdTerm::omega() {
                    iotas.push(OrdTerm::omega());
                    iotas.push(OrdTerm::omega().succ());
                }
                let mut hits = Vec::new();
                for j in 0..=i {
                    for iota in &iotas {
                        if l.member(j, iota, x)? && !hits.contains(&(j, iota.clone())) {
                            hits.push((j, iota.clone()));
                        }
                    }
                }
                let consistent = match &located {
                    Some(jt) => hits.len() == 1 && hits[0] == *jt,
                    None => hits.is_empty(),
                };
                if !consistent || matches!(step, Step::LimitW { .. }) != located.is_some() {
                    rep.failures.push(format!("W membership at {x}: located {located:?}, direct {hits:?}"));
                }
                if i >= 2 {
                    let j = i - 2;
                    let one = OrdTerm::one();
                    for b in [l.breakpoint(i - 1)?, l.gamma(j, &one)?, l.delta(j, &one)?, l.delta(j, &one)?.succ()] {
                        if b < s.local_top(&cur) {
                            check_local(s, &cur, &b, rep)?;
                        }
                    }
                }
            }
        }
        cur = cur.resolve(&[trace.path[depth]])?;
        depth += 1;
    }
    Ok(())
}

fn check_local(s: &DMapSpec, node: &Arc<Bouquet>, x: &OrdTerm, rep: &mut SelfTestReport) -> Result<()> {
    rep.rank_checks += 1;
    match s.eval_local(node, x) {
        Ok((_, img)) => {
            if *img.rank() != hyper_log(&s.tail, x) {
                rep.failures.push(format!("local rank at {x} below node {}: {}", node.id, img.rank()));
            }
        }
        Err(e @ (Error::Internal(_) | Error::Integrity(_))) => {
            rep.failures.push(format!("local eval({x}) below node {}: {e}", node.id))
        }
        Err(e) => return Err(e),
    }
    Ok(())
}
