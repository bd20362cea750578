//! Countable ordinals in hyperexponential normal form.
//!
//! A term is a non-increasing sum of additively indecomposable summands, stored
//! with multiplicities. An indecomposable summand is either `1` or `e^a(m)` with
//! `a >= 1` and `m` equal to `1` or additively decomposable. Here `e(x) = -1 + w^x`
//! and `e^a` is its transfinite iterate, so `w^x = e(x)` for `x >= 1`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, internal, Error, Result};

/// An ordinal term in normal form. Structural equality is ordinal equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct OrdTerm(Arc<Vec<(IndecTerm, u64)>>);

/// An additively indecomposable summand.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum IndecTerm {
    One,
    /// `e^degree(mantissa)`.
    Exp(OrdTerm, OrdTerm),
}

impl OrdTerm {
    pub fn zero() -> Self {
        OrdTerm(Arc::new(Vec::new()))
    }

    pub fn one() -> Self {
        Self::nat(1)
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            OrdTerm(Arc::new(vec![(IndecTerm::One, n)]))
        }
    }

    pub fn omega() -> Self {
        Self::indec(IndecTerm::Exp(Self::one(), Self::one()))
    }

    pub fn indec(t: IndecTerm) -> Self {
        OrdTerm(Arc::new(vec![(t, 1)]))
    }

    fn from_summands(v: Vec<(IndecTerm, u64)>) -> Self {
        OrdTerm(Arc::new(v))
    }

    /// The normal form as `(summand, multiplicity)` pairs, strictly decreasing.
    pub fn summands(&self) -> &[(IndecTerm, u64)] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_nat() == Some(1)
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self.0.as_slice() {
            [] => Some(0),
            [(IndecTerm::One, n)] => Some(*n),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_nat().is_some()
    }

    pub fn leading(&self) -> Option<&IndecTerm> {
        self.0.first().map(|(t, _)| t)
    }

    pub fn last(&self) -> Option<&IndecTerm> {
        self.0.last().map(|(t, _)| t)
    }

    /// True for a single summand with multiplicity one.
    pub fn is_indecomposable(&self) -> bool {
        matches!(self.0.as_slice(), [(_, 1)])
    }

    pub fn is_successor(&self) -> bool {
        matches!(self.last(), Some(IndecTerm::One))
    }

    pub fn is_limit(&self) -> bool {
        matches!(self.last(), Some(IndecTerm::Exp(..)))
    }

    /// Number of nodes in the term tree; used to bound random generation.
    pub fn size(&self) -> usize {
        self.0
            .iter()
            .map(|(t, _)| match t {
                IndecTerm::One => 1,
                IndecTerm::Exp(a, m) => 1 + a.size() + m.size(),
            })
            .sum()
    }

    pub fn succ(&self) -> Self {
        add(self, &Self::one())
    }

    pub fn pred(&self) -> Option<Self> {
        if !self.is_successor() {
            return None;
        }
        let mut v = self.0.as_ref().clone();
        let last = v.last_mut().unwrap();
        if last.1 == 1 {
            v.pop();
        } else {
            last.1 -= 1;
        }
        Some(Self::from_summands(v))
    }

    /// `self * n` for a natural `n` (repeated addition).
    pub fn mul_nat(&self, n: u64) -> Self {
        if n == 0 || self.is_zero() {
            return Self::zero();
        }
        let mut v = self.0.as_ref().clone();
        v[0].1 = v[0].1.checked_mul(n).expect("multiplicity overflow");
        Self::from_summands(v)
    }

    /// The leading summand as a term.
    pub fn leading_term(&self) -> Option<Self> {
        self.leading().map(|t| Self::indec(t.clone()))
    }

    /// The largest limit-or-zero ordinal not above `self`.
    pub fn limit_floor(&self) -> Self {
        let mut v = self.0.as_ref().clone();
        if matches!(v.last(), Some((IndecTerm::One, _))) {
            v.pop();
        }
        Self::from_summands(v)
    }
}

impl IndecTerm {
    pub fn as_term(&self) -> OrdTerm {
        OrdTerm::indec(self.clone())
    }
}

pub fn compare(x: &OrdTerm, y: &OrdTerm) -> Ordering {
    for ((a, ca), (b, cb)) in x.0.iter().zip(y.0.iter()) {
        match compare_indec(a, b) {
            Ordering::Equal => match ca.cmp(cb) {
                Ordering::Equal => continue,
                o => return o,
            },
            o => return o,
        }
    }
    x.0.len().cmp(&y.0.len())
}

pub fn compare_indec(a: &IndecTerm, b: &IndecTerm) -> Ordering {
    use IndecTerm::*;
    match (a, b) {
        (One, One) => Ordering::Equal,
        (One, Exp(..)) => Ordering::Less,
        (Exp(..), One) => Ordering::Greater,
        (Exp(da, ma), Exp(db, mb)) => match compare(da, db) {
            Ordering::Equal => compare(ma, mb),
            Ordering::Less => {
                let gap = left_subtract(da, db).expect("degrees ordered");
                mantissa_vs(ma, &Exp(gap, mb.clone()))
            }
            Ordering::Greater => {
                let gap = left_subtract(db, da).expect("degrees ordered");
                mantissa_vs(mb, &Exp(gap, ma.clone())).reverse()
            }
        },
    }
}

// `m` is 1 or decomposable, `g` is an Exp summand; they are never equal.
fn mantissa_vs(m: &OrdTerm, g: &IndecTerm) -> Ordering {
    match m.leading() {
        Some(IndecTerm::One) | None => Ordering::Less,
        Some(m1) => match compare_indec(m1, g) {
            Ordering::Less => Ordering::Less,
            _ => Ordering::Greater,
        },
    }
}

impl Ord for OrdTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(self, other)
    }
}

impl PartialOrd for OrdTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IndecTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_indec(self, other)
    }
}

impl PartialOrd for IndecTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn add(x: &OrdTerm, y: &OrdTerm) -> OrdTerm {
    let Some((y1, yc)) = y.0.first() else {
        return x.clone();
    };
    let mut v = Vec::with_capacity(x.0.len() + y.0.len());
    for (t, c) in x.0.iter() {
        match compare_indec(t, y1) {
            Ordering::Greater => v.push((t.clone(), *c)),
            Ordering::Equal => {
                v.push((t.clone(), c.checked_add(*yc).expect("multiplicity overflow")));
                v.extend(y.0[1..].iter().cloned());
                return OrdTerm::from_summands(v);
            }
            Ordering::Less => break,
        }
    }
    v.extend(y.0.iter().cloned());
    OrdTerm::from_summands(v)
}

/// The unique `g` with `a + g = b`.
pub fn left_subtract(a: &OrdTerm, b: &OrdTerm) -> Result<OrdTerm> {
    let (av, bv) = (a.0.as_slice(), b.0.as_slice());
    let mut i = 0;
    loop {
        if i == av.len() {
            return Ok(OrdTerm::from_summands(bv[i..].to_vec()));
        }
        if i == bv.len() {
            break;
        }
        let ((ta, ca), (tb, cb)) = (&av[i], &bv[i]);
        match compare_indec(ta, tb) {
            Ordering::Equal if ca == cb => i += 1,
            Ordering::Equal if ca < cb => {
                let mut v = vec![(tb.clone(), cb - ca)];
                v.extend(bv[i + 1..].iter().cloned());
                return Ok(OrdTerm::from_summands(v));
            }
            Ordering::Less => return Ok(OrdTerm::from_summands(bv[i..].to_vec())),
            _ => break,
        }
    }
    domain(format!("left_subtract: {a} > {b}"))
}

pub fn omega_power(x: &OrdTerm) -> OrdTerm {
    if x.is_zero() {
        OrdTerm::one()
    } else {
        hyper_exp(&OrdTerm::one(), x)
    }
}

pub fn hyper_exp(a: &OrdTerm, x: &OrdTerm) -> OrdTerm {
    if a.is_zero() {
        return x.clone();
    }
    if x.is_zero() {
        return OrdTerm::zero();
    }
    match x.0.as_slice() {
        [(IndecTerm::One, 1)] => OrdTerm::indec(IndecTerm::Exp(a.clone(), OrdTerm::one())),
        [(IndecTerm::Exp(g, d), 1)] => OrdTerm::indec(IndecTerm::Exp(add(a, g), d.clone())),
        _ => OrdTerm::indec(IndecTerm::Exp(a.clone(), x.clone())),
    }
}

/// `b` for `x = a + w^b`, with `end_log(0) = 0`.
pub fn end_log(x: &OrdTerm) -> OrdTerm {
    hyper_log(&OrdTerm::one(), x)
}

/// The hyperlogarithm `l^xi(x)`, with `l^xi(0) = 0`.
pub fn hyper_log(xi: &OrdTerm, x: &OrdTerm) -> OrdTerm {
    if xi.is_zero() {
        return x.clone();
    }
    match x.last() {
        None | Some(IndecTerm::One) => OrdTerm::zero(),
        Some(IndecTerm::Exp(g, d)) => {
            if xi <= g {
                hyper_exp(&left_subtract(xi, g).unwrap(), d)
            } else {
                hyper_log(&left_subtract(g, xi).unwrap(), d)
            }
        }
    }
}

/// `(degree, mantissa)` with `x = e^degree(mantissa)` and the mantissa 1 or decomposable.
pub fn hnf_decompose(x: &OrdTerm) -> Result<(OrdTerm, OrdTerm)> {
    match x.0.as_slice() {
        [] => domain("hnf_decompose of 0"),
        [(IndecTerm::One, 1)] => Ok((OrdTerm::zero(), OrdTerm::one())),
        [(IndecTerm::Exp(g, d), 1)] => Ok((g.clone(), d.clone())),
        _ => Ok((OrdTerm::zero(), x.clone())),
    }
}

/// The `k` in `x = a*w + k`.
pub fn finite_remainder(x: &OrdTerm) -> u64 {
    match x.0.last() {
        Some((IndecTerm::One, n)) => *n,
        _ => 0,
    }
}

/// Canonical fundamental sequence of a limit term.
pub fn fund_seq(x: &OrdTerm, n: u64) -> Result<OrdTerm> {
    if !x.is_limit() {
        return domain(format!("fund_seq of non-limit {x}"));
    }
    let mut prefix = x.0.as_ref().clone();
    let (last, c) = prefix.pop().unwrap();
    if c > 1 {
        prefix.push((last.clone(), c - 1));
    }
    let IndecTerm::Exp(g, m) = &last else { unreachable!() };
    let tail = if g.is_successor() {
        let h = g.pred().unwrap();
        hyper_exp(&h, &omega_power_fund_seq(m, n)?)
    } else if m.is_successor() {
        let mp = m.pred().unwrap();
        let last = g.last().expect("limit degrees are nonzero").as_term();
        hyper_exp(&fund_seq(g, n)?, &hyper_exp(&last, &mp).succ())
    } else {
        hyper_exp(g, &fund_seq(m, n)?)
    };
    Ok(add(&OrdTerm::from_summands(prefix), &tail))
}

fn omega_power_fund_seq(m: &OrdTerm, n: u64) -> Result<OrdTerm> {
    match m.pred() {
        Some(mp) => Ok(omega_power(&mp).mul_nat(n)),
        None => Ok(omega_power(&fund_seq(m, n)?)),
    }
}

/// The largest `h` with `e^g(h) <= v`.
pub fn exp_floor(g: &OrdTerm, v: &OrdTerm) -> OrdTerm {
    if g.is_zero() {
        return v.clone();
    }
    match v.leading() {
        None | Some(IndecTerm::One) => OrdTerm::zero(),
        Some(IndecTerm::Exp(a, c)) => {
            if g <= a {
                hyper_exp(&left_subtract(g, a).unwrap(), c)
            } else {
                exp_floor(&left_subtract(a, g).unwrap(), c)
            }
        }
    }
}

/// The least `h` with `e^g(h) > v`.
pub fn exp_ceil(g: &OrdTerm, v: &OrdTerm) -> Result<OrdTerm> {
    let f = exp_floor(g, v);
    let h = f.succ();
    if hyper_exp(g, &f) > *v || hyper_exp(g, &h) <= *v {
        return internal(format!("exp_ceil({g}, {v}) failed its check"));
    }
    Ok(h)
}

/// An initial segment of ordinals: `[0, m]` or `[0, l)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Segment {
    UpTo(OrdTerm),
    Below(OrdTerm),
}

impl Segment {
    fn below(l: OrdTerm) -> Self {
        match l.pred() {
            Some(p) => Segment::UpTo(p),
            None => Segment::Below(l),
        }
    }

    pub fn contains(&self, x: &OrdTerm) -> bool {
        match self {
            Segment::UpTo(m) => x <= m,
            Segment::Below(l) => x < l,
        }
    }

    fn has_positive(&self) -> bool {
        self.contains(&OrdTerm::one())
    }

    fn shift_left(&self, g: &OrdTerm) -> Self {
        match self {
            Segment::UpTo(m) => Segment::UpTo(add(g, m)),
            Segment::Below(l) => Segment::below(add(g, l)),
        }
    }

    fn strip_left(&self, g: &OrdTerm) -> Self {
        match self {
            Segment::UpTo(m) => Segment::UpTo(left_subtract(g, m).expect("g in segment")),
            Segment::Below(l) => Segment::below(left_subtract(g, l).expect("g in segment")),
        }
    }
}

/// The set `{i : e^i(s) <= x}` for `s >= 1`; it is always an initial segment.
pub fn degree_segment(s: &OrdTerm, x: &OrdTerm) -> Segment {
    assert!(!s.is_zero(), "degree_segment needs s >= 1");
    if s > x {
        return Segment::Below(OrdTerm::zero());
    }
    let (g0, d) = hnf_decompose(s).unwrap();
    if !g0.is_zero() {
        return degree_segment(&d, x).strip_left(&g0);
    }
    let Some(IndecTerm::Exp(g, c)) = x.leading() else {
        return Segment::UpTo(OrdTerm::zero());
    };
    if !c.is_one() {
        let inner = degree_segment(&d, &c.leading_term().unwrap());
        if inner.has_positive() {
            return inner.shift_left(g);
        }
    }
    if d <= *c {
        return Segment::UpTo(g.clone());
    }
    // `d` is decomposable and `e^i(d) <= e^g(c)` for `0 < i < g` iff `-i+g >= d0`.
    let d0 = match degree_segment(c, &d.leading_term().unwrap()) {
        Segment::UpTo(m) => m.succ(),
        Segment::Below(l) => l,
    };
    let d0 = if d0.is_zero() { OrdTerm::one() } else { d0 };
    let mut best: Option<OrdTerm> = None;
    let mut prefix = OrdTerm::zero();
    let parts = g.summands();
    'outer: for (idx, (t, cnt)) in parts.iter().enumerate() {
        let rest = OrdTerm::from_summands(parts[idx + 1..].to_vec());
        let piece = t.as_term();
        for j in 0..*cnt {
            let tail = add(&piece.mul_nat(cnt - j), &rest);
            if tail < d0 {
                break 'outer;
            }
            prefix = add(&prefix, &piece);
            best = Some(prefix.clone());
        }
    }
    match best {
        Some(p) => Segment::below(p),
        None => Segment::UpTo(OrdTerm::zero()),
    }
}

/// The largest `m <= bound`, `m` zero or a limit, with `e^m(s) <= x`; zero when no
/// limit qualifies.
pub fn max_limit_exponent(s: &OrdTerm, x: &OrdTerm, bound: &OrdTerm) -> Result<OrdTerm> {
    if s.is_zero() {
        return domain("max_limit_exponent needs s >= 1");
    }
    let m = match degree_segment(s, x) {
        Segment::UpTo(m) => std::cmp::min(m, bound.clone()).limit_floor(),
        Segment::Below(l) if l.is_zero() => OrdTerm::zero(),
        Segment::Below(l) if *bound < l => bound.limit_floor(),
        Segment::Below(l) => {
            let mut v = l.summands().to_vec();
            match v.last_mut() {
                Some((IndecTerm::Exp(a, b), c)) if a.is_one() && b.is_one() => {
                    if *c == 1 {
                        v.pop();
                    } else {
                        *c -= 1;
                    }
                    OrdTerm::from_summands(v)
                }
                _ => {
                    return internal(format!(
                        "max_limit_exponent({s}, {x}, {bound}): no maximum below {l}"
                    ))
                }
            }
        }
    };
    let next = add(&m, &OrdTerm::omega());
    let ok_low = m.is_zero() || hyper_exp(&m, s) <= *x;
    let ok_high = next > *bound || hyper_exp(&next, s) > *x;
    if !(ok_low && ok_high && m <= *bound && !m.is_successor()) {
        return internal(format!("max_limit_exponent({s}, {x}, {bound}) = {m} failed its check"));
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Predicates {
    pub is_zero: bool,
    pub is_successor: bool,
    pub is_limit: bool,
    pub is_add_indecomposable: bool,
    pub is_mult_indecomposable: bool,
    pub predecessor: Option<OrdTerm>,
}

pub fn predicates(x: &OrdTerm) -> Predicates {
    let mult = match x.summands() {
        [(IndecTerm::Exp(g, d), 1)] => (g.is_one() && d.is_one()) || *g >= OrdTerm::nat(2),
        _ => false,
    };
    Predicates {
        is_zero: x.is_zero(),
        is_successor: x.is_successor(),
        is_limit: x.is_limit(),
        is_add_indecomposable: x.is_indecomposable(),
        is_mult_indecomposable: mult,
        predecessor: x.pred(),
    }
}

// ---------------------------------------------------------------- text

impl fmt::Display for OrdTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (t, c) in self.0.iter() {
            if let IndecTerm::One = t {
                if !first {
                    f.write_str("+")?;
                }
                first = false;
                write!(f, "{c}")?;
                continue;
            }
            for _ in 0..*c {
                if !first {
                    f.write_str("+")?;
                }
                first = false;
                write!(f, "{t}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for IndecTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndecTerm::One => f.write_str("1"),
            IndecTerm::Exp(a, m) if a.is_one() && m.is_one() => f.write_str("w"),
            IndecTerm::Exp(a, m) if a.is_one() => write!(f, "w^({m})"),
            IndecTerm::Exp(a, m) => write!(f, "e[{a}]({m})"),
        }
    }
}

impl fmt::Debug for OrdTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrdTerm({self})")
    }
}

impl fmt::Debug for IndecTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub fn parse_ordinal(text: &str) -> Result<OrdTerm> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let v = p.expr()?;
    p.ws();
    if p.pos != p.s.len() {
        return p.err("unexpected trailing input");
    }
    Ok(v)
}

impl FromStr for OrdTerm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_ordinal(s)
    }
}

impl Serialize for OrdTerm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for OrdTerm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_ordinal(&s).map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.to_string() })
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected '{}'", c as char))
        }
    }

    fn nat(&mut self) -> Result<u64> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a natural number");
        }
        let digits = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        digits.parse().or_else(|_| {
            self.pos = start;
            self.err("number too large")
        })
    }

    fn expr(&mut self) -> Result<OrdTerm> {
        let mut acc = self.term()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            acc = add(&acc, &self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<OrdTerm> {
        let a = self.atom()?;
        if self.peek() == Some(b'*') {
            self.pos += 1;
            let n = self.nat()?;
            let mut acc = OrdTerm::zero();
            for _ in 0..n {
                acc = add(&acc, &a);
            }
            return Ok(acc);
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<OrdTerm> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(OrdTerm::nat(self.nat()?)),
            Some(b'w') => {
                self.pos += 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.expect(b'(')?;
                    let x = self.expr()?;
                    self.expect(b')')?;
                    Ok(omega_power(&x))
                } else {
                    Ok(OrdTerm::omega())
                }
            }
            Some(b'e') => {
                self.pos += 1;
                self.expect(b'[')?;
                let a = self.expr()?;
                self.expect(b']')?;
                self.expect(b'(')?;
                let x = self.expr()?;
                self.expect(b')')?;
                Ok(hyper_exp(&a, &x))
            }
            Some(b'(') => {
                self.pos += 1;
                let x = self.expr()?;
                self.expect(b')')?;
                Ok(x)
            }
            Some(_) => self.err("expected an ordinal atom"),
            None => self.err("unexpected end of input"),
        }
    }
}


/// Random terms for sampled checks.
pub mod random {
    use super::*;
    use rand::Rng;

    /// A random term whose construction uses at most `budget` recursive steps.
    pub fn term<R: Rng + ?Sized>(rng: &mut R, budget: u32) -> OrdTerm {
        let parts = if budget == 0 { rng.gen_range(0..=1) } else { rng.gen_range(0..=3) };
        let mut acc = OrdTerm::zero();
        for _ in 0..parts {
            acc = add(&acc, &indec(rng, budget));
        }
        acc
    }

    /// A random nonzero term.
    pub fn nonzero<R: Rng + ?Sized>(rng: &mut R, budget: u32) -> OrdTerm {
        let t = term(rng, budget);
        if t.is_zero() {
            indec(rng, budget)
        } else {
            t
        }
    }

    /// A random indecomposable term.
    pub fn indec<R: Rng + ?Sized>(rng: &mut R, budget: u32) -> OrdTerm {
        if budget == 0 || rng.gen_bool(0.3) {
            return OrdTerm::one();
        }
        let deg = match rng.gen_range(0..4) {
            0 => OrdTerm::one(),
            1 => OrdTerm::nat(rng.gen_range(1..4)),
            _ => nonzero(rng, budget / 2),
        };
        let mant = match rng.gen_range(0..3) {
            0 => OrdTerm::one(),
            _ => nonzero(rng, budget / 2),
        };
        hyper_exp(&deg, &mant)
    }
}
