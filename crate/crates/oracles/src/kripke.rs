//! Finite trees with the strict-descendant relation, enumerated exhaustively.

use std::collections::HashSet;

use rand::Rng;

use crate::modal::F;

/// Node 0 is the root; `parent[i] < i` for every other node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    pub parent: Vec<usize>,
    /// Bit `v` of `val[i]` is the truth of `p_v` at node `i`.
    pub val: Vec<u32>,
}

impl Tree {
    pub fn len(&self) -> usize {
        self.val.len()
    }

    pub fn is_empty(&self) -> bool {
        self.val.is_empty()
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        (1..self.len()).filter(|&j| self.parent[j - 1] == i).collect()
    }

    fn parent_of(&self, j: usize) -> Option<usize> {
        (j > 0).then(|| self.parent[j - 1])
    }

    /// `j` is a strict descendant of `i`.
    pub fn below(&self, i: usize, j: usize) -> bool {
        let mut k = j;
        while let Some(p) = self.parent_of(k) {
            if p == i {
                return true;
            }
            k = p;
        }
        false
    }

    pub fn holds(&self, i: usize, f: &F) -> bool {
        match f {
            F::Bot => false,
            F::Top => true,
            F::Var(v) => self.val[i] >> v & 1 == 1,
            F::Not(a) => !self.holds(i, a),
            F::And(a, b) => self.holds(i, a) && self.holds(i, b),
            F::Or(a, b) => self.holds(i, a) || self.holds(i, b),
            F::Imp(a, b) => !self.holds(i, a) || self.holds(i, b),
            F::Box(a) => (0..self.len()).filter(|&j| self.below(i, j)).all(|j| self.holds(j, a)),
            F::Dia(a) => (0..self.len()).filter(|&j| self.below(i, j)).any(|j| self.holds(j, a)),
        }
    }

    pub fn height(&self) -> usize {
        (0..self.len()).map(|j| self.depth_of(j)).max().unwrap_or(0)
    }

    fn depth_of(&self, j: usize) -> usize {
        let mut d = 0;
        let mut k = j;
        while let Some(p) = self.parent_of(k) {
            d += 1;
            k = p;
        }
        d
    }

    fn canon(&self, i: usize) -> String {
        let mut kids: Vec<String> = self.children(i).iter().map(|&c| self.canon(c)).collect();
        kids.sort();
        format!("({}{})", self.val[i], kids.concat())
    }

    /// Tree-model JSON in the icard format, ids equal to node indices.
    pub fn json(&self) -> String {
        let nodes: Vec<String> = (0..self.len())
            .map(|i| {
                let val: Vec<String> =
                    (0..32).filter(|v| self.val[i] >> v & 1 == 1).map(|v| format!("\"p{v}\"")).collect();
                let kids: Vec<String> = self.children(i).iter().map(|c| c.to_string()).collect();
                format!(r#"{{"id":{i},"val":[{}],"children":[{}]}}"#, val.join(","), kids.join(","))
            })
            .collect();
        format!(r#"{{"nodes":[{}],"root":0}}"#, nodes.join(","))
    }
}

/// All valued trees with `1..=max_nodes` nodes over `vars` variables, one per
/// isomorphism class.
pub fn all_trees(max_nodes: usize, vars: u32) -> Vec<Tree> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for n in 1..=max_nodes {
        let mut parents = vec![Vec::new()];
        for j in 1..n {
            parents = parents
                .into_iter()
                .flat_map(|p: Vec<usize>| {
                    (0..j).map(move |q| {
                        let mut p = p.clone();
                        p.push(q);
                        p
                    })
                })
                .collect();
        }
        let vals = 1u32 << vars;
        for p in &parents {
            for code in 0..(vals as u64).pow(n as u32) {
                let mut c = code;
                let val = (0..n)
                    .map(|_| {
                        let v = (c % vals as u64) as u32;
                        c /= vals as u64;
                        v
                    })
                    .collect();
                let t = Tree { parent: p.clone(), val };
                if seen.insert(t.canon(0)) {
                    out.push(t);
                }
            }
        }
    }
    out
}

pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, max_nodes: usize, vars: u32) -> Tree {
    let n = rng.gen_range(1..=max_nodes);
    Tree {
        parent: (1..n).map(|j| rng.gen_range(0..j)).collect(),
        val: (0..n).map(|_| rng.gen_range(0..1u32 << vars)).collect(),
    }
}

/// The node reached from `node` by the λ = 1 map at the natural `n`: daughters
/// are cycled in order, each leaf takes one point and the first non-leaf
/// daughter takes every natural from its block start on.
pub fn tm0_natural(t: &Tree, node: usize, n: u64) -> usize {
    let kids = t.children(node);
    if kids.is_empty() {
        return node;
    }
    let mut start = 0;
    for i in 0.. {
        let d = kids[i % kids.len()];
        if t.children(d).is_empty() {
            if n == start {
                return d;
            }
            start += 1;
        } else {
            return tm0_natural(t, d, n - start);
        }
    }
    unreachable!()
}

/// Truth at every node of every tree in `trees`.
pub fn valid_on(trees: &[Tree], f: &F) -> bool {
    trees.iter().all(|t| (0..t.len()).all(|i| t.holds(i, f)))
}
