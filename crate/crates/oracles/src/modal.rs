//! A bare formula syntax and exhaustive enumeration by connective count.

use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum F {
    Bot,
    Top,
    Var(u32),
    Not(Arc<F>),
    And(Arc<F>, Arc<F>),
    Or(Arc<F>, Arc<F>),
    Imp(Arc<F>, Arc<F>),
    Box(Arc<F>),
    Dia(Arc<F>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conn {
    Not,
    And,
    Or,
    Imp,
    Box,
    Dia,
}

pub const ALL: [Conn; 6] = [Conn::Not, Conn::And, Conn::Or, Conn::Imp, Conn::Box, Conn::Dia];
pub const BASIS: [Conn; 3] = [Conn::Not, Conn::And, Conn::Box];

impl F {
    pub fn depth(&self) -> usize {
        match self {
            F::Bot | F::Top | F::Var(_) => 0,
            F::Not(a) => a.depth(),
            F::And(a, b) | F::Or(a, b) | F::Imp(a, b) => a.depth().max(b.depth()),
            F::Box(a) | F::Dia(a) => 1 + a.depth(),
        }
    }
}

/// Fully parenthesized text in the icard formula grammar.
impl fmt::Display for F {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            F::Bot => write!(f, "F"),
            F::Top => write!(f, "T"),
            F::Var(i) => write!(f, "p{i}"),
            F::Not(a) => write!(f, "~({a})"),
            F::And(a, b) => write!(f, "({a}) & ({b})"),
            F::Or(a, b) => write!(f, "({a}) | ({b})"),
            F::Imp(a, b) => write!(f, "({a}) -> ({b})"),
            F::Box(a) => write!(f, "[]({a})"),
            F::Dia(a) => write!(f, "<>({a})"),
        }
    }
}

/// All formulas with at most `max` connectives from `conns` over `atoms`
/// whose modal depth is at most `depth`.
pub fn enumerate(atoms: &[F], conns: &[Conn], max: usize, depth: usize) -> Vec<F> {
    let mut by_size: Vec<Vec<Arc<F>>> = vec![atoms.iter().cloned().map(Arc::new).collect()];
    for n in 1..=max {
        let mut level = Vec::new();
        for &c in conns {
            match c {
                Conn::Not | Conn::Box | Conn::Dia => {
                    for a in &by_size[n - 1] {
                        let f = match c {
                            Conn::Not => F::Not(a.clone()),
                            Conn::Box => F::Box(a.clone()),
                            _ => F::Dia(a.clone()),
                        };
                        if f.depth() <= depth {
                            level.push(Arc::new(f));
                        }
                    }
                }
                Conn::And | Conn::Or | Conn::Imp => {
                    for l in 0..n {
                        for a in &by_size[l] {
                            for b in &by_size[n - 1 - l] {
                                let f = match c {
                                    Conn::And => F::And(a.clone(), b.clone()),
                                    Conn::Or => F::Or(a.clone(), b.clone()),
                                    _ => F::Imp(a.clone(), b.clone()),
                                };
                                level.push(Arc::new(f));
                            }
                        }
                    }
                }
            }
        }
        by_size.push(level);
    }
    by_size.into_iter().flatten().map(|f| (*f).clone()).collect()
}

/// A random formula with at most `size` connectives over `vars` variables
/// and the constants.
pub fn random<R: rand::Rng + ?Sized>(rng: &mut R, size: usize, vars: u32) -> F {
    if size == 0 || rng.gen_bool(0.15) {
        return match rng.gen_range(0..vars + 2) {
            0 => F::Bot,
            1 => F::Top,
            v => F::Var(v - 2),
        };
    }
    let sub = |rng: &mut R, n| Arc::new(random(rng, n, vars));
    match rng.gen_range(0..6) {
        0 => F::Not(sub(rng, size - 1)),
        1 => F::Box(sub(rng, size - 1)),
        2 => F::Dia(sub(rng, size - 1)),
        k => {
            let l = rng.gen_range(0..size);
            let (a, b) = (sub(rng, l), sub(rng, size - 1 - l));
            match k {
                3 => F::And(a, b),
                4 => F::Or(a, b),
                _ => F::Imp(a, b),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let atoms = [F::Var(0)];
        assert_eq!(enumerate(&atoms, &[Conn::Not], 3, 0).len(), 4);
        // one atom, binary & only: Catalan numbers 1, 1, 2, 5
        assert_eq!(enumerate(&atoms, &[Conn::And], 3, 0).len(), 9);
        assert!(enumerate(&atoms, &[Conn::Box], 4, 2).iter().all(|f| f.depth() <= 2));
        assert_eq!(enumerate(&atoms, &[Conn::Box], 4, 2).len(), 3);
    }
}
