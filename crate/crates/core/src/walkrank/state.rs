use std::collections::HashMap;

use super::codebook::Codebook;
use crate::error::{Error, Result};
use crate::graph::{Adjacency, ObservationSet};
use crate::model::{DiscreteAlphabet, FactorAssignment};
use crate::rng::KeyedStream;

const ABSENT: u32 = u32::MAX;
const MAX_PAIR_TABLE: usize = 4096;
const MAX_CACHED_VALUES: usize = 1 << 16;

/// Which vertices a greedy move may touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreedyFocus {
    /// Any vertex of the chosen side, uniformly.
    Uniform,
    /// The endpoint on the chosen side of a uniformly random violated edge.
    #[default]
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Row,
    Col,
}

/// Alphabet-constrained factors plus the indexed set of violated edges.
///
/// `cost() == violated.len()` at all times; moves update it over the incident
/// edges of the touched vertices only.
#[derive(Debug, Clone)]
pub struct SearchState<'a> {
    obs: &'a ObservationSet,
    adj: Adjacency,
    alphabet: DiscreteAlphabet,
    book: Codebook,
    r: usize,
    delta: f64,
    row_code: Vec<u32>,
    col_code: Vec<u32>,
    violated: Vec<u32>,
    slot: Vec<u32>,
    pair_cache: HashMap<u64, Vec<(u32, u32)>>,
}

impl<'a> SearchState<'a> {
    /// Factors drawn iid uniform over the alphabet.
    pub fn random(
        obs: &'a ObservationSet,
        alphabet: &DiscreteAlphabet,
        r: usize,
        delta: f64,
        rng: &mut KeyedStream,
    ) -> Result<Self> {
        let book = Codebook::new(alphabet, r)?;
        let k = book.len() as u64;
        let row_code = (0..obs.rows()).map(|_| rng.below(k) as u32).collect();
        let col_code = (0..obs.cols()).map(|_| rng.below(k) as u32).collect();
        Ok(Self::build(obs, alphabet.clone(), book, r, delta, row_code, col_code))
    }

    /// Start from explicit factors; every component must be an alphabet point.
    pub fn from_assignment(
        obs: &'a ObservationSet,
        alphabet: &DiscreteAlphabet,
        delta: f64,
        assignment: &FactorAssignment,
    ) -> Result<Self> {
        if (assignment.rows(), assignment.cols()) != (obs.rows(), obs.cols()) {
            return Err(Error::Usage("assignment and observations differ in shape".into()));
        }
        let r = assignment.rank();
        let book = Codebook::new(alphabet, r)?;
        let encode = |v: &[f64]| {
            book.encode(alphabet, v)
                .ok_or_else(|| Error::Config("assignment entry outside the search alphabet".into()))
        };
        let row_code = (0..obs.rows()).map(|i| encode(assignment.row(i))).collect::<Result<_>>()?;
        let col_code = (0..obs.cols()).map(|a| encode(assignment.col(a))).collect::<Result<_>>()?;
        Ok(Self::build(obs, alphabet.clone(), book, r, delta, row_code, col_code))
    }

    fn build(
        obs: &'a ObservationSet,
        alphabet: DiscreteAlphabet,
        book: Codebook,
        r: usize,
        delta: f64,
        row_code: Vec<u32>,
        col_code: Vec<u32>,
    ) -> Self {
        let mut s = SearchState {
            obs,
            adj: obs.adjacency(),
            alphabet,
            book,
            r,
            delta,
            row_code,
            col_code,
            violated: Vec::new(),
            slot: vec![ABSENT; obs.len()],
            pair_cache: HashMap::new(),
        };
        for e in 0..obs.len() {
            s.refresh(e);
        }
        s
    }

    #[inline]
    fn violates(&self, x: u32, y: u32, value: f64) -> bool {
        (self.book.dot(x, y) - value).abs() > self.delta
    }

    #[inline]
    fn edge_violated_now(&self, e: usize) -> bool {
        let (i, a) = self.obs.edges()[e];
        self.violates(self.row_code[i], self.col_code[a], self.obs.values()[e])
    }

    #[inline]
    fn refresh(&mut self, e: usize) {
        let bad = self.edge_violated_now(e);
        let listed = self.slot[e] != ABSENT;
        if bad && !listed {
            self.slot[e] = self.violated.len() as u32;
            self.violated.push(e as u32);
        } else if !bad && listed {
            let pos = self.slot[e] as usize;
            let last = *self.violated.last().expect("listed edge");
            self.violated.swap_remove(pos);
            if last as usize != e {
                self.slot[last as usize] = pos as u32;
            }
            self.slot[e] = ABSENT;
        }
    }

    pub fn cost(&self) -> usize {
        self.violated.len()
    }

    /// Cost recomputed from scratch, ignoring the incremental bookkeeping.
    pub fn recount(&self) -> usize {
        (0..self.obs.len()).filter(|&e| self.edge_violated_now(e)).count()
    }

    pub fn is_violated(&self, e: usize) -> bool {
        self.slot[e] != ABSENT
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn row_vector(&self, i: usize) -> &[f64] {
        self.book.vector(self.row_code[i])
    }

    pub fn col_vector(&self, a: usize) -> &[f64] {
        self.book.vector(self.col_code[a])
    }

    /// Violations among the edges incident to `i` if its vector were `code`.
    fn row_local_cost(&self, i: usize, code: u32, cap: usize) -> usize {
        let mut c = 0;
        for &e in self.adj.row(i) {
            let a = self.obs.edges()[e].1;
            if self.violates(code, self.col_code[a], self.obs.values()[e]) {
                c += 1;
                if c > cap {
                    break;
                }
            }
        }
        c
    }

    fn col_local_cost(&self, a: usize, code: u32, cap: usize) -> usize {
        let mut c = 0;
        for &e in self.adj.col(a) {
            let i = self.obs.edges()[e].0;
            if self.violates(self.row_code[i], code, self.obs.values()[e]) {
                c += 1;
                if c > cap {
                    break;
                }
            }
        }
        c
    }

    /// Replace vertex `index` on `side` by a cost-minimizing vector of the
    /// whole alphabet power, ties broken uniformly. Returns the cost change
    /// (never positive).
    pub fn greedy_at(&mut self, side: Side, index: usize, rng: &mut KeyedStream) -> isize {
        let before = self.cost() as isize;
        let mut best = usize::MAX;
        let mut choice = 0u32;
        let mut ties = 0u64;
        for code in 0..self.book.len() as u32 {
            let c = match side {
                Side::Row => self.row_local_cost(index, code, best),
                Side::Col => self.col_local_cost(index, code, best),
            };
            if c < best {
                best = c;
                choice = code;
                ties = 1;
            } else if c == best {
                ties += 1;
                if rng.below(ties) == 0 {
                    choice = code;
                }
            }
        }
        match side {
            Side::Row => {
                self.row_code[index] = choice;
                for k in 0..self.adj.row(index).len() {
                    let e = self.adj.row(index)[k];
                    self.refresh(e);
                }
            }
            Side::Col => {
                self.col_code[index] = choice;
                for k in 0..self.adj.col(index).len() {
                    let e = self.adj.col(index)[k];
                    self.refresh(e);
                }
            }
        }
        self.cost() as isize - before
    }

    /// Greedy move on a vertex of `side` chosen according to `focus`.
    pub fn greedy_move(&mut self, side: Side, focus: GreedyFocus, rng: &mut KeyedStream) -> isize {
        let index = match focus {
            GreedyFocus::Violated if !self.violated.is_empty() => {
                let e = self.violated[rng.below(self.violated.len() as u64) as usize] as usize;
                let (i, a) = self.obs.edges()[e];
                match side {
                    Side::Row => i,
                    Side::Col => a,
                }
            }
            _ => {
                let count = match side {
                    Side::Row => self.obs.rows(),
                    Side::Col => self.obs.cols(),
                };
                if count == 0 {
                    return 0;
                }
                rng.below(count as u64) as usize
            }
        };
        self.greedy_at(side, index, rng)
    }

    /// Pick a uniformly random violated edge and install a pair of vectors,
    /// uniform among all pairs that satisfy it. Returns the repaired edge.
    pub fn walk_move(&mut self, rng: &mut KeyedStream) -> Result<usize> {
        if self.violated.is_empty() {
            return Err(Error::Usage("walk move needs a violated edge".into()));
        }
        let e = self.violated[rng.below(self.violated.len() as u64) as usize] as usize;
        let (i, a) = self.obs.edges()[e];
        let value = self.obs.values()[e];
        let (x, y) = self
            .pick_satisfying_pair(value, rng)
            .ok_or(Error::InfeasibleEdge { row: i, col: a })?;
        self.row_code[i] = x;
        self.col_code[a] = y;
        for k in 0..self.adj.row(i).len() {
            let f = self.adj.row(i)[k];
            self.refresh(f);
        }
        for k in 0..self.adj.col(a).len() {
            let f = self.adj.col(a)[k];
            self.refresh(f);
        }
        Ok(e)
    }

    fn pick_satisfying_pair(&mut self, value: f64, rng: &mut KeyedStream) -> Option<(u32, u32)> {
        let k = self.book.len() as u32;
        let small = (k as usize) * (k as usize) <= MAX_PAIR_TABLE;
        if small {
            let key = value.to_bits();
            if !self.pair_cache.contains_key(&key) {
                let mut pairs = Vec::new();
                for x in 0..k {
                    for y in 0..k {
                        if !self.violates(x, y, value) {
                            pairs.push((x, y));
                        }
                    }
                }
                if self.pair_cache.len() >= MAX_CACHED_VALUES {
                    self.pair_cache.clear();
                }
                self.pair_cache.insert(key, pairs);
            }
            let pairs = &self.pair_cache[&key];
            if pairs.is_empty() {
                return None;
            }
            return Some(pairs[rng.below(pairs.len() as u64) as usize]);
        }
        // reservoir sample without materializing the pair list
        let mut seen = 0u64;
        let mut pick = None;
        for x in 0..k {
            for y in 0..k {
                if !self.violates(x, y, value) {
                    seen += 1;
                    if rng.below(seen) == 0 {
                        pick = Some((x, y));
                    }
                }
            }
        }
        pick
    }

    pub fn assignment(&self) -> FactorAssignment {
        let mut u = Vec::with_capacity(self.obs.rows() * self.r);
        for &c in &self.row_code {
            u.extend_from_slice(self.book.vector(c));
        }
        let mut v = Vec::with_capacity(self.obs.cols() * self.r);
        for &c in &self.col_code {
            v.extend_from_slice(self.book.vector(c));
        }
        FactorAssignment::with_alphabet(self.obs.rows(), self.obs.cols(), self.r, u, v, self.alphabet.clone())
            .expect("codebook vectors lie in the alphabet")
    }
}
