//! Randomized local search over alphabet-constrained factors.
//!
//! The cost of an assignment is the number of revealed entries it misses by
//! more than `delta`. Each step is, with probability `rho`, a walk move that
//! repairs a random violated edge, and otherwise a greedy move that re-solves
//! one row or column over the full alphabet power. By default the greedy
//! vertex is an endpoint of a random violated edge; uniform vertex choice is
//! available through [`GreedyFocus::Uniform`].

mod codebook;
mod state;

pub use codebook::MAX_CODEWORDS;
pub use state::{GreedyFocus, SearchState, Side};

use serde::Serialize;

use crate::clock::Stopwatch;
use crate::error::{Error, Result};
use crate::graph::ObservationSet;
use crate::model::{DiscreteAlphabet, DistortionReport, FactorAssignment, GroundTruthInstance};
use crate::rng::{KeyedStream, Role};

#[derive(Debug, Clone)]
pub struct WalkRankConfig {
    pub rank: usize,
    pub alphabet: DiscreteAlphabet,
    /// Entry tolerance: an edge is satisfied when `|<u_i, v_a> - M_ia| <= delta`.
    pub delta: f64,
    /// Probability of a walk move while the cost is positive.
    pub rho: f64,
    pub greedy_focus: GreedyFocus,
    /// `None` means `50 n ceil(log2 n)^2`.
    pub max_steps: Option<u64>,
    pub target_cost: usize,
    pub seed: u64,
    pub log_every: u64,
    /// Interval of full recounts that cross-check the incremental cost.
    pub check_every: u64,
}

impl WalkRankConfig {
    pub fn new(rank: usize, alphabet: DiscreteAlphabet) -> Self {
        WalkRankConfig {
            rank,
            alphabet,
            delta: 0.0,
            rho: 0.1,
            greedy_focus: GreedyFocus::Violated,
            max_steps: None,
            target_cost: 0,
            seed: 0,
            log_every: 1000,
            check_every: 1_000_000,
        }
    }

    /// Search a grid of spacing `step` for factors matching a continuous
    /// truth to within `delta`. Rounding both factors onto the grid moves each
    /// product by at most `2 r step`, so the tolerance is widened by that much.
    pub fn for_continuous(rank: usize, delta: f64, step: f64) -> Result<Self> {
        let alphabet = DiscreteAlphabet::with_step(step)?;
        let spacing = alphabet.step().unwrap_or(step);
        let mut c = Self::new(rank, alphabet);
        c.delta = delta + 2.0 * rank as f64 * spacing;
        Ok(c)
    }

    pub fn default_max_steps(n: usize) -> u64 {
        let n = n.max(2) as u64;
        let log = 64 - (n - 1).leading_zeros() as u64;
        50 * n * log * log
    }

    fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::Config("rank must be positive".into()));
        }
        if self.alphabet.is_empty() {
            return Err(Error::Config("empty alphabet".into()));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::Config(format!("delta must be finite and non-negative, got {}", self.delta)));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::Config(format!("rho must lie in [0, 1], got {}", self.rho)));
        }
        if self.log_every == 0 || self.check_every == 0 {
            return Err(Error::Config("log and check intervals must be positive".into()));
        }
        Ok(())
    }
}

/// Move counters; `greedy_increases` must stay zero.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SearchStats {
    pub walk_moves: u64,
    pub greedy_moves: u64,
    pub greedy_increases: u64,
    pub recount_checks: u64,
    pub final_cost: usize,
    pub reached_target: bool,
}

#[derive(Debug, Clone)]
pub struct WalkRankRun {
    pub assignment: FactorAssignment,
    pub report: DistortionReport,
    pub stats: SearchStats,
}

/// Violated-edge count of an arbitrary assignment.
pub fn cost(assignment: &FactorAssignment, obs: &ObservationSet, delta: f64) -> Result<usize> {
    if (assignment.rows(), assignment.cols()) != (obs.rows(), obs.cols()) {
        return Err(Error::Usage("assignment and observations differ in shape".into()));
    }
    Ok(obs
        .iter()
        .filter(|&(i, a, y)| (assignment.entry(i, a) - y).abs() > delta)
        .count())
}

pub fn run_walkrank(
    truth: Option<&GroundTruthInstance>,
    obs: &ObservationSet,
    config: &WalkRankConfig,
) -> Result<WalkRankRun> {
    config.validate()?;
    let clock = Stopwatch::start();
    let mut init = KeyedStream::new(config.seed, Role::Init, 0);
    let mut state = SearchState::random(obs, &config.alphabet, config.rank, config.delta, &mut init)?;
    let mut rng = KeyedStream::new(config.seed, Role::Search, 0);
    let max_steps = config
        .max_steps
        .unwrap_or_else(|| WalkRankConfig::default_max_steps(obs.rows()));
    let (n, m) = (obs.rows() as u64, obs.cols() as u64);

    let mut stats = SearchStats::default();
    let mut trajectory = vec![(0, state.cost() as f64)];
    let mut step = 0u64;
    while step < max_steps && state.cost() > config.target_cost {
        step += 1;
        if config.rho > 0.0 && rng.next_f64() < config.rho {
            state.walk_move(&mut rng)?;
            stats.walk_moves += 1;
        } else {
            let side = if rng.below(n + m) < n { Side::Row } else { Side::Col };
            if state.greedy_move(side, config.greedy_focus, &mut rng) > 0 {
                stats.greedy_increases += 1;
            }
            stats.greedy_moves += 1;
        }
        if step % config.log_every == 0 {
            trajectory.push((step, state.cost() as f64));
        }
        if step % config.check_every == 0 {
            check_cost(&state, &mut stats)?;
        }
    }
    check_cost(&state, &mut stats)?;
    if trajectory.last().map(|t| t.0) != Some(step) {
        trajectory.push((step, state.cost() as f64));
    }
    stats.final_cost = state.cost();
    stats.reached_target = state.cost() <= config.target_cost;

    let assignment = state.assignment();
    let mut report = DistortionReport::evaluate(truth, &assignment, obs, None)?;
    report.steps = step;
    report.cost_trajectory = trajectory;
    report.wall_ms = clock.elapsed_ms();
    Ok(WalkRankRun {
        assignment,
        report,
        stats,
    })
}

fn check_cost(state: &SearchState<'_>, stats: &mut SearchStats) -> Result<()> {
    stats.recount_checks += 1;
    let full = state.recount();
    if full != state.cost() {
        return Err(Error::Numerical {
            message: format!("incremental cost {} disagrees with recount {full}", state.cost()),
            residual: (full as f64 - state.cost() as f64).abs(),
        });
    }
    Ok(())
}
