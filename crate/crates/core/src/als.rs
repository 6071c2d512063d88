//! Regularized alternating descent.
//!
//! Minimizes `sum_E (M_ia - u_i.v_a)^2 + lambda (|U|^2 + |V|^2)` by exact ridge
//! solves, one row or column block at a time: all rows, then all columns.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::clock::Stopwatch;
use crate::error::{Error, Result};
use crate::graph::{Adjacency, ObservationSet};
use crate::model::{DistortionReport, FactorAssignment, GroundTruthInstance, MatrixView};
use crate::rng::{KeyedStream, Role};

/// Relative normal-equation residual a block solve must reach.
pub const RESIDUAL_TOL: f64 = 1e-8;
const MONOTONE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct DescentConfig {
    pub r: usize,
    /// `None` means `0.1 |E| / (n + m)`.
    pub lambda: Option<f64>,
    pub sweeps: usize,
    pub init_scale: f64,
    pub seed: u64,
    /// Entries withheld from fitting; their RMSE is reported every sweep.
    pub holdout: Option<ObservationSet>,
}

impl DescentConfig {
    pub fn new(r: usize) -> Self {
        DescentConfig {
            r,
            lambda: None,
            sweeps: 20,
            init_scale: 0.5,
            seed: 0,
            holdout: None,
        }
    }

    pub fn default_lambda(obs: &ObservationSet) -> f64 {
        let sides = (obs.rows() + obs.cols()).max(1);
        0.1 * obs.len() as f64 / sides as f64
    }

    pub fn resolved_lambda(&self, obs: &ObservationSet) -> f64 {
        self.lambda.unwrap_or_else(|| Self::default_lambda(obs))
    }

    fn validate(&self, obs: &ObservationSet) -> Result<()> {
        if self.r == 0 {
            return Err(Error::Config("rank must be positive".into()));
        }
        if self.sweeps == 0 {
            return Err(Error::Config("at least one sweep is required".into()));
        }
        let lambda = self.resolved_lambda(obs);
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be finite and non-negative, got {lambda}")));
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return Err(Error::Config(format!("init_scale must be non-negative, got {}", self.init_scale)));
        }
        if let Some(h) = &self.holdout {
            if (h.rows(), h.cols()) != (obs.rows(), obs.cols()) {
                return Err(Error::Usage("holdout and observations differ in shape".into()));
            }
        }
        Ok(())
    }
}

pub fn energy(assignment: &FactorAssignment, obs: &ObservationSet, lambda: f64) -> f64 {
    let fit: f64 = obs
        .iter()
        .map(|(i, a, y)| (y - assignment.entry(i, a)).powi(2))
        .sum();
    let norms: f64 = assignment
        .row_factors()
        .iter()
        .chain(assignment.col_factors())
        .map(|x| x * x)
        .sum();
    fit + lambda * norms
}

/// Outcome of one block solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockUpdate {
    pub energy_before: f64,
    pub energy_after: f64,
    /// `|A x - b| / max(|b|, |A| |x|)` for the ridge system `A x = b`.
    pub residual: f64,
}

/// Exact minimizer of the block energy `sum (y_k - x.p_k)^2 + lambda |x|^2`,
/// where `partners` holds the `p_k` row-stacked. Singular systems get the
/// minimal-norm solution.
fn ridge_block(
    current: &[f64],
    partners: &[f64],
    values: &[f64],
    lambda: f64,
    r: usize,
) -> (Vec<f64>, BlockUpdate) {
    let local = |x: &[f64]| -> f64 {
        let fit: f64 = partners
            .chunks_exact(r)
            .zip(values)
            .map(|(p, y)| (y - crate::model::dot(x, p)).powi(2))
            .sum();
        fit + lambda * x.iter().map(|v| v * v).sum::<f64>()
    };
    let mut a = DMatrix::<f64>::identity(r, r) * lambda;
    let mut b = DVector::<f64>::zeros(r);
    for (p, y) in partners.chunks_exact(r).zip(values) {
        for k in 0..r {
            b[k] += y * p[k];
            for l in 0..r {
                a[(k, l)] += p[k] * p[l];
            }
        }
    }
    let x = match a.clone().cholesky() {
        Some(ch) => ch.solve(&b),
        None => {
            let scale = a.amax().max(f64::MIN_POSITIVE);
            a.clone()
                .svd(true, true)
                .solve(&b, scale * 1e-12)
                .unwrap_or_else(|_| DVector::zeros(r))
        }
    };
    let mut x = x;
    // one step of iterative refinement tightens nearly singular solves
    let res = &b - &a * &x;
    if res.norm() > 0.0 {
        if let Some(ch) = a.clone().cholesky() {
            x += ch.solve(&res);
        }
    }
    let residual = {
        let num = (&b - &a * &x).norm();
        let den = b.norm().max(a.norm() * x.norm());
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    };
    let new: Vec<f64> = x.iter().copied().collect();
    let update = BlockUpdate {
        energy_before: local(current),
        energy_after: local(&new),
        residual,
    };
    (new, update)
}

/// Factors being fitted together with the observations they are fitted to.
#[derive(Debug, Clone)]
pub struct DescentState<'a> {
    obs: &'a ObservationSet,
    adj: Adjacency,
    lambda: f64,
    factors: FactorAssignment,
}

impl<'a> DescentState<'a> {
    pub fn new(obs: &'a ObservationSet, factors: FactorAssignment, lambda: f64) -> Result<Self> {
        if (factors.rows(), factors.cols()) != (obs.rows(), obs.cols()) {
            return Err(Error::Usage("factors and observations differ in shape".into()));
        }
        Ok(DescentState {
            obs,
            adj: obs.adjacency(),
            lambda,
            factors,
        })
    }

    pub fn factors(&self) -> &FactorAssignment {
        &self.factors
    }

    pub fn into_factors(self) -> FactorAssignment {
        self.factors
    }

    pub fn energy(&self) -> f64 {
        energy(&self.factors, self.obs, self.lambda)
    }

    fn gather(&self, edges: &[usize], partner_of: impl Fn(usize) -> usize, block: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let r = self.factors.rank();
        let mut partners = Vec::with_capacity(edges.len() * r);
        let mut values = Vec::with_capacity(edges.len());
        for &e in edges {
            let p = partner_of(e);
            partners.extend_from_slice(&block[p * r..(p + 1) * r]);
            values.push(self.obs.values()[e]);
        }
        (partners, values)
    }

    fn solve_row(&self, i: usize) -> (Vec<f64>, BlockUpdate) {
        let (partners, values) = self.gather(self.adj.row(i), |e| self.obs.edges()[e].1, self.factors.col_factors());
        ridge_block(self.factors.row(i), &partners, &values, self.lambda, self.factors.rank())
    }

    fn solve_col(&self, a: usize) -> (Vec<f64>, BlockUpdate) {
        let (partners, values) = self.gather(self.adj.col(a), |e| self.obs.edges()[e].0, self.factors.row_factors());
        ridge_block(self.factors.col(a), &partners, &values, self.lambda, self.factors.rank())
    }

    pub fn update_row(&mut self, i: usize) -> BlockUpdate {
        let (x, update) = self.solve_row(i);
        self.factors.row_mut(i).copy_from_slice(&x);
        update
    }

    pub fn update_col(&mut self, a: usize) -> BlockUpdate {
        let (x, update) = self.solve_col(a);
        self.factors.col_mut(a).copy_from_slice(&x);
        update
    }

    /// All row blocks, solved against the frozen column factors.
    pub fn row_half_sweep(&mut self) -> Vec<BlockUpdate> {
        let solved = crate::par::map(self.factors.rows(), |i| self.solve_row(i));
        let r = self.factors.rank();
        let (u, _) = self.factors.factors_mut();
        solved
            .into_iter()
            .zip(u.chunks_exact_mut(r))
            .map(|((x, up), dst)| {
                dst.copy_from_slice(&x);
                up
            })
            .collect()
    }

    pub fn col_half_sweep(&mut self) -> Vec<BlockUpdate> {
        let solved = crate::par::map(self.factors.cols(), |a| self.solve_col(a));
        let r = self.factors.rank();
        let (_, v) = self.factors.factors_mut();
        solved
            .into_iter()
            .zip(v.chunks_exact_mut(r))
            .map(|((x, up), dst)| {
                dst.copy_from_slice(&x);
                up
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub sweep: usize,
    pub energy: f64,
    pub fit_error: Option<f64>,
    pub prediction_error: Option<f64>,
    pub holdout_error: Option<f64>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct DescentStats {
    pub block_updates: u64,
    pub energy_increases: u64,
    pub max_residual: f64,
}

#[derive(Debug, Clone)]
pub struct DescentRun {
    pub assignment: FactorAssignment,
    pub report: DistortionReport,
    /// Sweep 0 is the initialization.
    pub sweeps: Vec<SweepRecord>,
    pub stats: DescentStats,
}

pub fn initial_factors(n: usize, m: usize, config: &DescentConfig) -> Result<FactorAssignment> {
    let s = config.init_scale;
    let draw = |index: u64, len: usize| {
        let mut rng = KeyedStream::new(config.seed, Role::Init, index);
        (0..len).map(|_| s * (2.0 * rng.next_f64() - 1.0)).collect::<Vec<_>>()
    };
    FactorAssignment::unconstrained(n, m, config.r, draw(0, n * config.r), draw(1, m * config.r))
}

/// Fit `obs` from a random start; `truth`, when known, adds full-matrix errors.
///
/// A block update that raises its local energy beyond rounding, or a solve
/// whose residual exceeds [`RESIDUAL_TOL`], is a numerical failure.
pub fn run_descent(
    truth: Option<&GroundTruthInstance>,
    obs: &ObservationSet,
    config: &DescentConfig,
) -> Result<DescentRun> {
    config.validate(obs)?;
    let clock = Stopwatch::start();
    let lambda = config.resolved_lambda(obs);
    let init = initial_factors(obs.rows(), obs.cols(), config)?;
    let mut state = DescentState::new(obs, init, lambda)?;
    let holdout = config.holdout.as_ref();
    let mut stats = DescentStats::default();

    let record = |state: &DescentState<'_>, sweep: usize, ms: f64| -> Result<SweepRecord> {
        let r = DistortionReport::evaluate(truth, state.factors() as &dyn MatrixView, obs, holdout)?;
        Ok(SweepRecord {
            sweep,
            energy: state.energy(),
            fit_error: r.fit_error,
            prediction_error: r.prediction_error,
            holdout_error: r.holdout_error,
            elapsed_ms: ms,
        })
    };
    let mut sweeps = vec![record(&state, 0, clock.elapsed_ms())?];
    for sweep in 1..=config.sweeps {
        let mut updates = state.row_half_sweep();
        updates.extend(state.col_half_sweep());
        for u in &updates {
            stats.block_updates += 1;
            stats.max_residual = stats.max_residual.max(u.residual);
            if u.energy_after > u.energy_before + MONOTONE_SLACK * (1.0 + u.energy_before) {
                stats.energy_increases += 1;
            }
        }
        if stats.energy_increases > 0 {
            return Err(Error::Numerical {
                message: format!("block energy increased during sweep {sweep}"),
                residual: stats.max_residual,
            });
        }
        if stats.max_residual > RESIDUAL_TOL {
            return Err(Error::Numerical {
                message: format!("ridge solve residual above {RESIDUAL_TOL:e} in sweep {sweep}"),
                residual: stats.max_residual,
            });
        }
        sweeps.push(record(&state, sweep, clock.elapsed_ms())?);
    }
    let assignment = state.into_factors();
    let mut report = DistortionReport::evaluate(truth, &assignment, obs, holdout)?;
    report.steps = config.sweeps as u64;
    report.cost_trajectory = sweeps.iter().map(|s| (s.sweep as u64, s.energy)).collect();
    report.wall_ms = clock.elapsed_ms();
    Ok(DescentRun {
        assignment,
        report,
        sweeps,
        stats,
    })
}
