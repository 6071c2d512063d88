use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::model::GroundTruthInstance;
use crate::rng::{KeyedStream, Role};

/// The revealed entries `E` with their values. Also the edge list of the
/// bipartite graph on rows and columns.
///
/// Edges are kept sorted by `(row, col)` and are pairwise distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet {
    n: usize,
    m: usize,
    edges: Vec<(usize, usize)>,
    values: Vec<f64>,
}

/// Number of revealed entries for `n` rows at `epsilon` per row, ties to even.
pub fn observation_count(n: usize, epsilon: f64) -> usize {
    (n as f64 * epsilon).round_ties_even() as usize
}

/// `count` distinct positions of an `n x m` grid, uniformly at random.
///
/// Partial Fisher-Yates over the virtual index space `0..n*m`: only the
/// displaced slots are stored, so memory is `O(count)`.
pub fn sample_positions(n: usize, m: usize, count: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    let total = (n as u128) * (m as u128);
    if count as u128 > total {
        return Err(Error::Config(format!(
            "cannot reveal {count} distinct entries of a {n}x{m} matrix"
        )));
    }
    let total = total as u64;
    let mut rng = KeyedStream::new(seed, Role::Edges, 0);
    let mut displaced: HashMap<u64, u64> = HashMap::with_capacity(count.min(1 << 20));
    let mut out = Vec::with_capacity(count);
    for t in 0..count as u64 {
        let j = t + rng.below(total - t);
        let at_j = *displaced.get(&j).unwrap_or(&j);
        let at_t = *displaced.get(&t).unwrap_or(&t);
        displaced.insert(j, at_t);
        out.push(((at_j / m as u64) as usize, (at_j % m as u64) as usize));
    }
    out.sort_unstable();
    Ok(out)
}

impl ObservationSet {
    pub fn empty(n: usize, m: usize) -> Self {
        ObservationSet {
            n,
            m,
            edges: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Reveal `round(n * epsilon)` uniformly random entries of `truth`.
    pub fn sample(truth: &GroundTruthInstance, epsilon: f64, seed: u64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be nonnegative, got {epsilon}")));
        }
        let (n, m) = (truth.rows(), truth.cols());
        let edges = sample_positions(n, m, observation_count(n, epsilon), seed)?;
        let values = edges.iter().map(|&(i, a)| truth.entry(i, a)).collect();
        Ok(ObservationSet {
            n,
            m,
            edges,
            values,
        })
    }

    /// Validate and sort explicit `(row, col, value)` entries.
    pub fn from_entries(n: usize, m: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(i, a, _)) = entries.iter().find(|(i, a, _)| *i >= n || *a >= m) {
            return Err(Error::Usage(format!("entry ({i}, {a}) outside a {n}x{m} matrix")));
        }
        entries.sort_unstable_by_key(|&(i, a, _)| (i, a));
        if let Some(w) = entries.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::Usage(format!("duplicate entry ({}, {})", w[0].0, w[0].1)));
        }
        Ok(ObservationSet {
            n,
            m,
            edges: entries.iter().map(|&(i, a, _)| (i, a)).collect(),
            values: entries.iter().map(|e| e.2).collect(),
        })
    }

    /// Same positions, new values (aligned with [`Self::edges`]).
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.edges.len() {
            return Err(Error::Usage(format!(
                "{} values for {} edges",
                values.len(),
                self.edges.len()
            )));
        }
        Ok(ObservationSet {
            values,
            ..self.clone()
        })
    }

    /// Same positions, values read from `truth`.
    pub fn restricted_to(&self, truth: &GroundTruthInstance) -> Result<Self> {
        if (truth.rows(), truth.cols()) != (self.n, self.m) {
            return Err(Error::Usage("instance dimensions differ from the observation grid".into()));
        }
        self.with_values(self.edges.iter().map(|&(i, a)| truth.entry(i, a)).collect())
    }

    /// Withhold `count` uniformly chosen entries: `(training, held_out)`.
    pub fn split_holdout(&self, count: usize, seed: u64) -> Result<(Self, Self)> {
        if count > self.len() {
            return Err(Error::Config(format!(
                "cannot hold out {count} of {} observations",
                self.len()
            )));
        }
        let picked: HashSet<usize> = sample_positions(1, self.len(), count, seed ^ 0x5EED)?
            .into_iter()
            .map(|(_, k)| k)
            .collect();
        let (mut train, mut hold) = (Self::empty(self.n, self.m), Self::empty(self.n, self.m));
        for (k, (&e, &y)) in self.edges.iter().zip(&self.values).enumerate() {
            let target = if picked.contains(&k) { &mut hold } else { &mut train };
            target.edges.push(e);
            target.values.push(y);
        }
        Ok((train, hold))
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Observations per row, `|E| / n`.
    pub fn epsilon(&self) -> f64 {
        self.edges.len() as f64 / self.n as f64
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().zip(&self.values).map(|(&(i, a), &y)| (i, a, y))
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::new(self)
    }
}

/// Incident edge lists (edge indices into the observation set) per row and
/// per column, in CSR form.
#[derive(Debug, Clone)]
pub struct Adjacency {
    row_start: Vec<usize>,
    row_edges: Vec<usize>,
    col_start: Vec<usize>,
    col_edges: Vec<usize>,
}

impl Adjacency {
    fn new(obs: &ObservationSet) -> Self {
        let csr = |count: usize, key: &dyn Fn(usize) -> usize| {
            let mut start = vec![0usize; count + 1];
            for e in 0..obs.len() {
                start[key(e) + 1] += 1;
            }
            for k in 0..count {
                start[k + 1] += start[k];
            }
            let mut fill = start.clone();
            let mut list = vec![0usize; obs.len()];
            for e in 0..obs.len() {
                let slot = &mut fill[key(e)];
                list[*slot] = e;
                *slot += 1;
            }
            (start, list)
        };
        let (row_start, row_edges) = csr(obs.n, &|e| obs.edges[e].0);
        let (col_start, col_edges) = csr(obs.m, &|e| obs.edges[e].1);
        Adjacency {
            row_start,
            row_edges,
            col_start,
            col_edges,
        }
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.row_edges[self.row_start[i]..self.row_start[i + 1]]
    }

    pub fn col(&self, a: usize) -> &[usize] {
        &self.col_edges[self.col_start[a]..self.col_start[a + 1]]
    }
}
