//! Hall sets and the free nilpotent Lie algebra `f_{m,κ}`.
//!
//! Words are ordered degree first, then by left factor, then by right
//! factor. A bracket `[u, v]` is a Hall word when `u > v` and either `u` is
//! a generator or `u = [x, y]` with `y ≤ v`. Because every word's index in
//! the enumeration equals its rank in that order, comparisons are plain
//! index comparisons.
//!
//! Brackets of Hall words are rewritten into Hall normal form with
//! `[[x, y], v] = [[x, v], y] + [x, [y, v]]` whenever `v < y`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::algebra::{AlgebraVector, StratifiedAlgebra, StructureConstants};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default cap on the number of basis elements of a free algebra.
pub const DEFAULT_DIMENSION_CAP: usize = 2000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HallWord {
    /// 0-based generator index.
    Generator(usize),
    Bracket(Box<HallWord>, Box<HallWord>),
}

impl HallWord {
    pub fn degree(&self) -> usize {
        match self {
            HallWord::Generator(_) => 1,
            HallWord::Bracket(l, r) => l.degree() + r.degree(),
        }
    }

    pub fn bracket(left: HallWord, right: HallWord) -> Self {
        HallWord::Bracket(Box::new(left), Box::new(right))
    }
}

impl fmt::Display for HallWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HallWord::Generator(i) => write!(f, "X{}", i + 1),
            HallWord::Bracket(l, r) => write!(f, "[{l},{r}]"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Node {
    Generator(usize),
    Bracket(usize, usize),
}

type Combo = Vec<(usize, i128)>;

/// The Hall words of degree at most `κ` on `m` generators, in order.
#[derive(Clone, Debug)]
pub struct HallSet {
    generators: usize,
    max_degree: usize,
    nodes: Vec<Node>,
    degrees: Vec<usize>,
    index: HashMap<(usize, usize), usize>,
}

impl HallSet {
    pub fn new(generators: usize, max_degree: usize, cap: usize) -> Result<Self> {
        if generators == 0 || max_degree == 0 {
            return Err(Error::invalid("Hall set needs at least one generator and degree ≥ 1"));
        }
        let mut set = HallSet {
            generators,
            max_degree,
            nodes: (0..generators).map(Node::Generator).collect(),
            degrees: vec![1; generators],
            index: HashMap::new(),
        };
        if generators > cap {
            return Err(Error::ResourceLimit(format!("{generators} generators exceed cap {cap}")));
        }
        for d in 2..=max_degree {
            let mut fresh = Vec::new();
            for u in 0..set.nodes.len() {
                let du = set.degrees[u];
                if du >= d {
                    continue;
                }
                for v in 0..set.nodes.len() {
                    if set.degrees[v] != d - du || u <= v {
                        continue;
                    }
                    let ok = match set.nodes[u] {
                        Node::Generator(_) => true,
                        Node::Bracket(_, y) => y <= v,
                    };
                    if ok {
                        fresh.push((u, v));
                    }
                }
            }
            fresh.sort_unstable();
            if set.nodes.len() + fresh.len() > cap {
                return Err(Error::ResourceLimit(format!(
                    "free algebra on {generators} generators of step {max_degree} exceeds {cap} basis elements"
                )));
            }
            for (u, v) in fresh {
                set.index.insert((u, v), set.nodes.len());
                set.nodes.push(Node::Bracket(u, v));
                set.degrees.push(d);
            }
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    /// Number of Hall words of each degree `1..=κ`.
    pub fn counts_by_degree(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_degree];
        for &d in &self.degrees {
            counts[d - 1] += 1;
        }
        counts
    }

    pub fn word(&self, i: usize) -> HallWord {
        match self.nodes[i] {
            Node::Generator(g) => HallWord::Generator(g),
            Node::Bracket(l, r) => HallWord::bracket(self.word(l), self.word(r)),
        }
    }

    pub fn index_of(&self, word: &HallWord) -> Option<usize> {
        match word {
            HallWord::Generator(g) => (*g < self.generators).then_some(*g),
            HallWord::Bracket(l, r) => {
                let l = self.index_of(l)?;
                let r = self.index_of(r)?;
                self.index.get(&(l, r)).copied()
            }
        }
    }

    /// Expands `[u, v]` for Hall words `u, v` into the Hall basis, dropping
    /// everything of degree above `κ`.
    pub fn bracket(&self, u: usize, v: usize) -> Vec<(usize, i128)> {
        let mut memo = HashMap::new();
        self.expand(u, v, &mut memo)
    }

    fn expand(&self, u: usize, v: usize, memo: &mut HashMap<(usize, usize), Combo>) -> Combo {
        if u == v || self.degrees[u] + self.degrees[v] > self.max_degree {
            return Vec::new();
        }
        if u < v {
            return self.expand(v, u, memo).into_iter().map(|(w, c)| (w, -c)).collect();
        }
        if let Some(hit) = memo.get(&(u, v)) {
            return hit.clone();
        }
        let result = match self.nodes[u] {
            Node::Generator(_) => vec![(self.index[&(u, v)], 1)],
            Node::Bracket(_, y) if y <= v => vec![(self.index[&(u, v)], 1)],
            Node::Bracket(x, y) => {
                // v < y: [[x, y], v] = [[x, v], y] + [x, [y, v]]
                let mut acc: BTreeMap<usize, i128> = BTreeMap::new();
                for (w, c) in self.expand(x, v, memo) {
                    for (z, d) in self.expand(w, y, memo) {
                        *acc.entry(z).or_default() += c * d;
                    }
                }
                for (w, c) in self.expand(y, v, memo) {
                    for (z, d) in self.expand(x, w, memo) {
                        *acc.entry(z).or_default() += c * d;
                    }
                }
                acc.into_iter().filter(|&(_, c)| c != 0).collect()
            }
        };
        memo.insert((u, v), result.clone());
        result
    }

    /// The free nilpotent Lie algebra with this Hall set as adapted basis.
    pub fn to_algebra<S: Scalar>(&self) -> Result<StratifiedAlgebra<S>> {
        let n = self.len();
        let mut constants = StructureConstants::new(n);
        let mut memo = HashMap::new();
        for a in 0..n {
            for b in a + 1..n {
                if self.degrees[a] + self.degrees[b] > self.max_degree {
                    continue;
                }
                let combo = self.expand(a, b, &mut memo);
                let v = AlgebraVector::from_pairs(
                    combo.into_iter().map(|(k, c)| (k, S::from_int(i64::try_from(c).expect("small coefficient")))),
                );
                constants.set(a, b, v)?;
            }
        }
        let labels = (0..n).map(|i| self.word(i).to_string()).collect();
        StratifiedAlgebra::new(
            format!("free({},{})", self.generators, self.max_degree),
            self.counts_by_degree(),
            labels,
            constants,
        )
    }
}

/// `f_{m,κ}` in its Hall basis.
pub fn build_free_nilpotent<S: Scalar>(m: usize, kappa: usize, cap: usize) -> Result<StratifiedAlgebra<S>> {
    if m < 2 {
        return Err(Error::invalid(format!("free algebra needs m ≥ 2, got {m}")));
    }
    if kappa < 1 {
        return Err(Error::invalid("free algebra needs step ≥ 1"));
    }
    HallSet::new(m, kappa, cap)?.to_algebra()
}
