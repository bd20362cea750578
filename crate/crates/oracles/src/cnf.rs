//! Ordinals below ω^4 as coefficient vectors `[c0, c1, c2, c3]` of ω^0..ω^3.

use std::cmp::Ordering;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cnf4(pub [u64; 4]);

impl Cnf4 {
    /// Every ordinal with all coefficients at most `max`.
    pub fn all(max: u64) -> Vec<Cnf4> {
        let mut out = Vec::new();
        for c3 in 0..=max {
            for c2 in 0..=max {
                for c1 in 0..=max {
                    for c0 in 0..=max {
                        out.push(Cnf4([c0, c1, c2, c3]));
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; 4]
    }

    /// Ordinal sum: the left summands below the leading exponent of `b` vanish.
    pub fn add(&self, b: &Cnf4) -> Cnf4 {
        let Some(k) = (0..4).rev().find(|&i| b.0[i] != 0) else {
            return *self;
        };
        let mut out = [0; 4];
        out[(k + 1)..4].copy_from_slice(&self.0[(k + 1)..4]);
        out[k] = self.0[k] + b.0[k];
        out[..k].copy_from_slice(&b.0[..k]);
        Cnf4(out)
    }

    /// `b` with `x = a + ω^b`; zero for zero.
    pub fn end_log(&self) -> u64 {
        (0..4).find(|&i| self.0[i] != 0).unwrap_or(0) as u64
    }

    /// Text accepted by the icard ordinal parser.
    pub fn text(&self) -> String {
        let mut parts = Vec::new();
        for i in (0..4).rev() {
            let c = self.0[i];
            if c == 0 {
                continue;
            }
            let base = match i {
                0 => String::from("1"),
                1 => String::from("w"),
                _ => format!("w^({i})"),
            };
            parts.push(if i == 0 { c.to_string() } else { format!("{base}*{c}") });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

impl Ord for Cnf4 {
    fn cmp(&self, o: &Self) -> Ordering {
        (0..4).rev().map(|i| self.0[i].cmp(&o.0[i])).find(|c| c.is_ne()).unwrap_or(Ordering::Equal)
    }
}

impl PartialOrd for Cnf4 {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
