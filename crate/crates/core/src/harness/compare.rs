//! The three-matrix comparison: real ratings against two synthetic stand-ins
//! revealed on exactly the same positions.

use serde::Serialize;

use super::ingest::RatingTriples;
use crate::als::{run_descent, DescentConfig, SweepRecord};
use crate::error::{Error, Result};
use crate::graph::ObservationSet;
use crate::model::{FactorDistribution, GroundTruthInstance};
use crate::rng::{KeyedStream, Role};

#[derive(Debug, Clone)]
pub struct ComparisonSet {
    pub data: ObservationSet,
    /// iid uniform `[-1, 1]` values.
    pub iid: ObservationSet,
    /// A fresh rank-`r` matrix with uniform `[-1, 1]` factors, read on `E`.
    pub low_rank: ObservationSet,
    pub low_rank_truth: GroundTruthInstance,
}

impl ComparisonSet {
    pub fn labelled(&self) -> [(&'static str, &ObservationSet); 3] {
        [("data", &self.data), ("iid", &self.iid), ("low_rank", &self.low_rank)]
    }
}

pub fn make_comparison_matrices(triples: &RatingTriples, r: usize, seed: u64) -> Result<ComparisonSet> {
    let data = triples.to_observations()?;
    let mut rng = KeyedStream::new(seed, Role::Values, 0);
    let iid = data.with_values(
        (0..data.len())
            .map(|_| 2.0 * rng.next_f64() - 1.0)
            .collect(),
    )?;
    let law = FactorDistribution::uniform_interval();
    let low_rank_truth =
        GroundTruthInstance::generate_shape(data.rows(), data.cols(), r, &law, &law, seed)?;
    let low_rank = data.restricted_to(&low_rank_truth)?;
    Ok(ComparisonSet {
        data,
        iid,
        low_rank,
        low_rank_truth,
    })
}

#[derive(Debug, Clone)]
pub struct CompareOptions {
    pub r: usize,
    pub lambda: Option<f64>,
    pub sweeps: usize,
    /// Entries withheld from each matrix, at the same positions for all three.
    pub holdout: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonCurve {
    pub label: &'static str,
    pub lambda: f64,
    pub sweeps: Vec<SweepRecord>,
}

/// Fit each matrix by alternating descent and track fit and held-out error
/// per sweep. Only the data matrix is expected to predict well if the
/// ratings really are close to low rank; the iid matrix should not.
pub fn run_comparison(triples: &RatingTriples, options: &CompareOptions) -> Result<Vec<ComparisonCurve>> {
    let set = make_comparison_matrices(triples, options.r, options.seed)?;
    if options.holdout == 0 || options.holdout >= set.data.len() {
        return Err(Error::Config(format!(
            "holdout must be between 1 and {} for {} revealed entries",
            set.data.len().saturating_sub(1),
            set.data.len()
        )));
    }
    let mut curves = Vec::with_capacity(3);
    for (label, obs) in set.labelled() {
        let (train, held) = obs.split_holdout(options.holdout, options.seed)?;
        let mut config = DescentConfig::new(options.r);
        config.lambda = options.lambda;
        config.sweeps = options.sweeps;
        config.seed = options.seed;
        config.holdout = Some(held);
        let lambda = config.resolved_lambda(&train);
        let run = run_descent(None, &train, &config)?;
        curves.push(ComparisonCurve {
            label,
            lambda,
            sweeps: run.sweeps,
        });
    }
    Ok(curves)
}
