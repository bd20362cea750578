//! Icard topologies on ordinals with the left topology: ranks, generalized
//! intervals, basic neighborhoods and convergent sequences.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{domain, internal, Error, Result};
use crate::ordinal::{
    add, end_log, exp_floor, fund_seq, hyper_exp, hyper_log, omega_power, parse_ordinal,
    OrdTerm,
};

/// Splits `lambda > 0` as `a + w^b`, returning `(a, w^b, b)`.
pub fn split_lambda(lambda: &OrdTerm) -> Result<(OrdTerm, OrdTerm, OrdTerm)> {
    if lambda.is_zero() {
        return domain("lambda must be positive");
    }
    let mut parts = lambda.summands().to_vec();
    let (t, c) = parts.pop().unwrap();
    if c > 1 {
        parts.push((t.clone(), c - 1));
    }
    let mut head = OrdTerm::zero();
    for (p, n) in parts {
        head = add(&head, &p.as_term().mul_nat(n));
    }
    let tail = t.as_term();
    let b = end_log(&tail);
    Ok((head, tail, b))
}

/// Rank of `xi` in the ordinal space with the `lambda` Icard topology.
pub fn rank_lambda(lambda: &OrdTerm, xi: &OrdTerm) -> OrdTerm {
    hyper_log(lambda, xi)
}

/// `(lower, upper]_level`; a missing lower bound stands for -1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IcardInterval {
    pub lower: Option<OrdTerm>,
    pub upper: OrdTerm,
    pub level: OrdTerm,
}

impl IcardInterval {
    pub fn new(lower: Option<OrdTerm>, upper: OrdTerm, level: OrdTerm) -> Result<Self> {
        if let Some(l) = &lower {
            if *l >= upper {
                return domain(format!("empty interval: {l} >= {upper}"));
            }
        }
        Ok(IcardInterval { lower, upper, level })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let syntax = |msg: &str| Error::Syntax { pos: 0, msg: msg.to_string() };
        let (body, level) = t.rsplit_once("]_").ok_or_else(|| syntax("expected ']_' before the level"))?;
        let level = parse_ordinal(level)?;
        let lower_none = body.starts_with('[');
        if !lower_none && !body.starts_with('(') {
            return Err(syntax("interval must start with '(' or '['"));
        }
        let inner = &body[1..];
        let mut depth = 0i32;
        let mut split = None;
        for (i, ch) in inner.char_indices() {
            match ch {
                '(' | '[' => depth += 1,
                ')' | ']' => depth -= 1,
                ',' if depth == 0 => {
                    split = Some(i);
                    break;
                }
                _ => {}
            }
        }
        let i = split.ok_or_else(|| syntax("expected ',' between the bounds"))?;
        let (a, b) = (&inner[..i], &inner[i + 1..]);
        let upper = parse_ordinal(b)?;
        let lower = if lower_none {
            if !parse_ordinal(a)?.is_zero() {
                return Err(syntax("a closed interval must start at 0"));
            }
            None
        } else {
            Some(parse_ordinal(a)?)
        };
        IcardInterval::new(lower, upper, level)
    }
}

impl fmt::Display for IcardInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lower {
            None => write!(f, "[0, {}]_{}", self.upper, self.level),
            Some(l) => write!(f, "({}, {}]_{}", l, self.upper, self.level),
        }
    }
}

pub fn interval_member(xi: &OrdTerm, iv: &IcardInterval) -> bool {
    let v = hyper_log(&iv.level, xi);
    iv.lower.as_ref().is_none_or(|l| *l < v) && v <= iv.upper
}

/// A finite map from levels to thresholds.
pub type SimpleFn = BTreeMap<OrdTerm, OrdTerm>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicNbhd {
    pub center: OrdTerm,
    pub r: SimpleFn,
}

impl BasicNbhd {
    pub fn new(center: OrdTerm, r: SimpleFn) -> Result<Self> {
        for (lvl, thr) in &r {
            if *thr >= hyper_log(lvl, &center) {
                return domain(format!("r({lvl}) = {thr} is not below the level-{lvl} log of {center}"));
            }
        }
        Ok(BasicNbhd { center, r })
    }
}

pub fn basic_nbhd_member(xi: &OrdTerm, b: &BasicNbhd) -> bool {
    *xi <= b.center
        && b.r.iter().all(|(lvl, thr)| {
            let v = hyper_log(lvl, xi);
            *thr < v && v <= hyper_log(lvl, &b.center)
        })
}

/// Returns `(eta, gamma)` such that `[0, x]_0 ∩ (eta, e^{w^b} Theta]_gamma` lies inside
/// `B_r(x)` for `x = e^lambda Theta`.
pub fn shrink_nbhd(lambda: &OrdTerm, theta: &OrdTerm, r: &SimpleFn) -> Result<(OrdTerm, OrdTerm)> {
    if theta.is_zero() {
        return domain("shrink_nbhd needs Theta > 0");
    }
    let (a, tail, _) = split_lambda(lambda)?;
    let x = hyper_exp(lambda, theta);
    BasicNbhd::new(x.clone(), r.clone())?;
    let mut gamma = a;
    let mut v = OrdTerm::zero();
    for (lvl, thr) in r {
        if lvl >= lambda {
            return domain(format!("level {lvl} is not below lambda {lambda}"));
        }
        gamma = gamma.max(lvl.clone());
        v = v.max(hyper_exp(lvl, thr));
    }
    let eta = exp_floor(&gamma, &v);
    let top = hyper_exp(&tail, theta);
    if eta >= top || hyper_log(&gamma, &x) != top {
        return internal(format!("shrink_nbhd: eta {eta} does not fit below {top}"));
    }
    Ok((eta, gamma))
}

/// Membership in the shrunken neighborhood returned by [`shrink_nbhd`].
pub fn shrunk_member(y: &OrdTerm, x: &OrdTerm, eta: &OrdTerm, gamma: &OrdTerm, top: &OrdTerm) -> bool {
    let v = hyper_log(gamma, y);
    y <= x && *eta < v && v <= *top
}

/// The `n`-th point of a sequence converging to `e^lambda(Theta+1)`.
pub fn converging_sequence(lambda: &OrdTerm, theta: &OrdTerm, n: u64) -> Result<OrdTerm> {
    let (a, tail, b) = split_lambda(lambda)?;
    if b.is_zero() {
        return Ok(hyper_exp(&a, &omega_power(theta).mul_nat(n)));
    }
    let inner = hyper_exp(&tail, theta).succ();
    Ok(hyper_exp(&a, &hyper_exp(&fund_seq(&tail, n)?, &inner)))
}
