//! Exact completion of rank-1 matrices inside connected components.
//!
//! Within a component of the observation graph every entry is fixed by the
//! 2x2-minor rule `M[j][b] = M[j][a] M[i][b] / M[i][a]`. Rather than closing
//! minors recursively we pick a spanning tree per component and propagate
//! potentials `x_i`, `y_a` with `x_i y_a = M[i][a]`; the completion is then
//! `x_j y_b` for every same-component pair and `0` across components.
//! Magnitudes are carried as logarithms so long ratio chains cannot overflow.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{giant_component_fixed_point, ObservationSet};
use crate::model::{cross_gram, GroundTruthInstance, MatrixView};

/// Relative tolerance on cycle edges, applied to `log |x_i y_a / M[i][a]|`.
pub const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Rank1Completion {
    n: usize,
    m: usize,
    row_label: Vec<usize>,
    col_label: Vec<usize>,
    row_log: Vec<f64>,
    col_log: Vec<f64>,
    row_neg: Vec<bool>,
    col_neg: Vec<bool>,
    components: usize,
}

#[derive(Clone, Copy)]
enum Vertex {
    Row(usize),
    Col(usize),
}

/// Complete a rank-1 matrix from exact, nonzero observations.
pub fn complete_rank1(obs: &ObservationSet) -> Result<Rank1Completion> {
    if let Some((i, a, _)) = obs.iter().find(|(_, _, y)| *y == 0.0) {
        return Err(Error::Unsupported(format!(
            "observed zero at ({i}, {a}); rank-1 completion needs nonzero entries"
        )));
    }
    let (n, m) = (obs.rows(), obs.cols());
    let adj = obs.adjacency();
    let edges = obs.edges();
    let values = obs.values();
    let mut row_label = vec![usize::MAX; n];
    let mut col_label = vec![usize::MAX; m];
    let mut row_log = vec![0.0; n];
    let mut col_log = vec![0.0; m];
    let mut row_neg = vec![false; n];
    let mut col_neg = vec![false; m];
    let mut label = 0;
    let mut queue = VecDeque::new();

    let starts = (0..n).map(Vertex::Row).chain((0..m).map(Vertex::Col));
    for start in starts {
        match start {
            Vertex::Row(i) if row_label[i] != usize::MAX => continue,
            Vertex::Col(a) if col_label[a] != usize::MAX => continue,
            Vertex::Row(i) => row_label[i] = label,
            Vertex::Col(a) => col_label[a] = label,
        }
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            match v {
                Vertex::Row(i) => {
                    for &e in adj.row(i) {
                        let a = edges[e].1;
                        let (lm, neg) = (values[e].abs().ln(), values[e] < 0.0);
                        if col_label[a] == usize::MAX {
                            col_label[a] = label;
                            col_log[a] = lm - row_log[i];
                            col_neg[a] = neg ^ row_neg[i];
                            queue.push_back(Vertex::Col(a));
                        } else {
                            check_cycle(row_log[i] + col_log[a], row_neg[i] ^ col_neg[a], lm, neg, i, a)?;
                        }
                    }
                }
                Vertex::Col(a) => {
                    for &e in adj.col(a) {
                        let i = edges[e].0;
                        let (lm, neg) = (values[e].abs().ln(), values[e] < 0.0);
                        if row_label[i] == usize::MAX {
                            row_label[i] = label;
                            row_log[i] = lm - col_log[a];
                            row_neg[i] = neg ^ col_neg[a];
                            queue.push_back(Vertex::Row(i));
                        } else {
                            check_cycle(row_log[i] + col_log[a], row_neg[i] ^ col_neg[a], lm, neg, i, a)?;
                        }
                    }
                }
            }
        }
        label += 1;
    }

    Ok(Rank1Completion {
        n,
        m,
        row_label,
        col_label,
        row_log,
        col_log,
        row_neg,
        col_neg,
        components: label,
    })
}

fn check_cycle(pred_log: f64, pred_neg: bool, obs_log: f64, obs_neg: bool, row: usize, col: usize) -> Result<()> {
    if pred_neg != obs_neg || (pred_log - obs_log).abs() > CONSISTENCY_TOL {
        return Err(Error::Inconsistent { row, col });
    }
    Ok(())
}

impl Rank1Completion {
    pub fn is_determined(&self, i: usize, a: usize) -> bool {
        self.row_label[i] == self.col_label[a]
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    pub fn row_label(&self) -> &[usize] {
        &self.row_label
    }

    pub fn col_label(&self) -> &[usize] {
        &self.col_label
    }

    /// Row-major flags: `true` where the entry is fixed by the observations.
    pub fn determined_mask(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.n * self.m);
        for i in 0..self.n {
            for a in 0..self.m {
                out.push(self.is_determined(i, a));
            }
        }
        out
    }

    /// Fraction of the `n m` entries that are determined.
    pub fn determined_fraction(&self) -> f64 {
        let mut rows = vec![0usize; self.components];
        let mut cols = vec![0usize; self.components];
        self.row_label.iter().for_each(|&c| rows[c] += 1);
        self.col_label.iter().for_each(|&c| cols[c] += 1);
        let pairs: usize = rows.iter().zip(&cols).map(|(r, c)| r * c).sum();
        pairs as f64 / (self.n * self.m) as f64
    }

    fn row_potential(&self, i: usize) -> f64 {
        let x = self.row_log[i].exp();
        if self.row_neg[i] {
            -x
        } else {
            x
        }
    }

    fn col_potential(&self, a: usize) -> f64 {
        let y = self.col_log[a].exp();
        if self.col_neg[a] {
            -y
        } else {
            y
        }
    }
}

impl MatrixView for Rank1Completion {
    fn rows(&self) -> usize {
        self.n
    }

    fn cols(&self) -> usize {
        self.m
    }

    fn get(&self, i: usize, a: usize) -> f64 {
        if !self.is_determined(i, a) {
            return 0.0;
        }
        let mag = (self.row_log[i] + self.col_log[a]).exp();
        if self.row_neg[i] ^ self.col_neg[a] {
            -mag
        } else {
            mag
        }
    }

    /// Block-diagonal rank-1 structure: `O((n + m) r)` instead of `O(n m r)`.
    fn squared_error_sum(&self, truth: &GroundTruthInstance) -> f64 {
        let r = truth.rank();
        let (u, v) = (truth.row_factors(), truth.col_factors());
        let truth_sq: f64 = cross_gram(u, r, u, r)
            .iter()
            .zip(cross_gram(v, r, v, r))
            .map(|(a, b)| a * b)
            .sum();
        let c = self.components;
        let mut ux = vec![0.0; c * r];
        let mut vy = vec![0.0; c * r];
        let mut xx = vec![0.0; c];
        let mut yy = vec![0.0; c];
        for i in 0..self.n {
            let (l, x) = (self.row_label[i], self.row_potential(i));
            xx[l] += x * x;
            for k in 0..r {
                ux[l * r + k] += u[i * r + k] * x;
            }
        }
        for a in 0..self.m {
            let (l, y) = (self.col_label[a], self.col_potential(a));
            yy[l] += y * y;
            for k in 0..r {
                vy[l * r + k] += v[a * r + k] * y;
            }
        }
        let cross: f64 = ux.iter().zip(&vy).map(|(p, q)| p * q).sum();
        let est_sq: f64 = xx.iter().zip(&yy).map(|(p, q)| p * q).sum();
        (truth_sq - 2.0 * cross + est_sq).max(0.0)
    }
}

/// `sqrt(1 - xi zeta) * D0`: the distortion of recursive completion with zero
/// prediction across components, optimal for symmetric factor laws.
pub fn rank1_optimal_distortion(epsilon: f64, alpha: f64, d0: f64) -> Result<f64> {
    if !(d0 >= 0.0) {
        return Err(Error::Config(format!("D0 must be nonnegative, got {d0}")));
    }
    let g = giant_component_fixed_point(epsilon, alpha, 1e-13)?;
    Ok((1.0 - g.xi * g.zeta).max(0.0).sqrt() * d0)
}
