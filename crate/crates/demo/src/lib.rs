//! Browser bindings for the demo page in `www/`.
//!
//! Each export wraps a plain function returning `rankfill::Result`, so the
//! same code paths run in native tests.

use rankfill::bounds::{discrete_alphabet_bound, lower_bound, theorem1_bound, BoundInputs, MmseForm};
use rankfill::graph::{giant_component_fixed_point, ObservationSet};
use rankfill::model::{DiscreteAlphabet, FactorDistribution, GroundTruthInstance, MatrixView};
use rankfill::rank1::complete_rank1;
use rankfill::walkrank::{run_walkrank, WalkRankConfig};
use wasm_bindgen::prelude::*;

/// Largest matrix side the page will ask for; keeps dense copies small.
pub const MAX_SIDE: usize = 400;

#[wasm_bindgen]
pub struct Completion {
    n: usize,
    truth: Vec<f64>,
    estimate: Vec<f64>,
    revealed: Vec<u8>,
    rmse: f64,
    predicted: f64,
    determined: f64,
}

#[wasm_bindgen]
impl Completion {
    #[wasm_bindgen(getter)]
    pub fn n(&self) -> usize {
        self.n
    }
    /// Row-major `n x n`.
    pub fn truth(&self) -> Vec<f64> {
        self.truth.clone()
    }
    pub fn estimate(&self) -> Vec<f64> {
        self.estimate.clone()
    }
    /// 1 where the entry was revealed.
    pub fn revealed(&self) -> Vec<u8> {
        self.revealed.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn rmse(&self) -> f64 {
        self.rmse
    }
    /// `sqrt(1 - xi zeta)` for square matrices with sign factors.
    #[wasm_bindgen(getter)]
    pub fn predicted(&self) -> f64 {
        self.predicted
    }
    #[wasm_bindgen(getter)]
    pub fn determined(&self) -> f64 {
        self.determined
    }
}

fn check_side(n: usize) -> rankfill::Result<()> {
    if n == 0 || n > MAX_SIDE {
        return Err(rankfill::Error::Config(format!("side must be in 1..={MAX_SIDE}, got {n}")));
    }
    Ok(())
}

pub fn rank_one_completion(n: usize, epsilon: f64, seed: u32) -> rankfill::Result<Completion> {
    check_side(n)?;
    let law = FactorDistribution::signs();
    let truth = GroundTruthInstance::generate(n, 1.0, 1, &law, &law, seed.into())?;
    let obs = ObservationSet::sample(&truth, epsilon, seed.into())?;
    let c = complete_rank1(&obs)?;
    let mut revealed = vec![0u8; n * n];
    for &(i, a) in obs.edges() {
        revealed[i * n + a] = 1;
    }
    let g = giant_component_fixed_point(epsilon, 1.0, 1e-12)?;
    Ok(Completion {
        n,
        truth: truth.dense_product(),
        estimate: (0..n * n).map(|k| c.get(k / n, k % n)).collect(),
        revealed,
        rmse: rankfill::model::rmse(&truth, &c)?,
        predicted: (1.0 - g.xi * g.zeta).max(0.0).sqrt(),
        determined: c.determined_fraction(),
    })
}

#[wasm_bindgen(js_name = rankOneCompletion)]
pub fn rank_one_completion_js(n: usize, epsilon: f64, seed: u32) -> Result<Completion, JsError> {
    rank_one_completion(n, epsilon, seed).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub struct SearchTrace {
    steps: Vec<f64>,
    costs: Vec<f64>,
    rmse: f64,
    final_cost: usize,
    revealed: usize,
}

#[wasm_bindgen]
impl SearchTrace {
    pub fn steps(&self) -> Vec<f64> {
        self.steps.clone()
    }
    /// Violated revealed entries after each logged step.
    pub fn costs(&self) -> Vec<f64> {
        self.costs.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn rmse(&self) -> f64 {
        self.rmse
    }
    #[wasm_bindgen(getter, js_name = finalCost)]
    pub fn final_cost(&self) -> usize {
        self.final_cost
    }
    #[wasm_bindgen(getter)]
    pub fn revealed(&self) -> usize {
        self.revealed
    }
}

/// Sign factors of rank `r`, searched over the sign alphabet.
pub fn walkrank_search(n: usize, r: usize, epsilon: f64, seed: u32, max_steps: u32) -> rankfill::Result<SearchTrace> {
    check_side(n)?;
    let law = FactorDistribution::signs();
    let truth = GroundTruthInstance::generate(n, 1.0, r, &law, &law, seed.into())?;
    let obs = ObservationSet::sample(&truth, epsilon, seed.into())?;
    let mut config = WalkRankConfig::new(r, DiscreteAlphabet::signs());
    config.seed = seed.into();
    config.max_steps = Some(max_steps.into());
    config.log_every = (u64::from(max_steps) / 200).max(1);
    let run = run_walkrank(Some(&truth), &obs, &config)?;
    let (steps, costs) = run
        .report
        .cost_trajectory
        .iter()
        .map(|&(s, c)| (s as f64, c))
        .unzip();
    Ok(SearchTrace {
        steps,
        costs,
        rmse: run.report.rmse.unwrap_or(f64::NAN),
        final_cost: run.stats.final_cost,
        revealed: obs.len(),
    })
}

#[wasm_bindgen(js_name = walkrankSearch)]
pub fn walkrank_search_js(n: usize, r: usize, epsilon: f64, seed: u32, max_steps: u32) -> Result<SearchTrace, JsError> {
    walkrank_search(n, r, epsilon, seed, max_steps).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub struct BoundCurves {
    epsilon: Vec<f64>,
    theorem1: Vec<f64>,
    discrete: Vec<f64>,
    lower: Vec<f64>,
}

#[wasm_bindgen]
impl BoundCurves {
    pub fn epsilon(&self) -> Vec<f64> {
        self.epsilon.clone()
    }
    pub fn theorem1(&self) -> Vec<f64> {
        self.theorem1.clone()
    }
    pub fn discrete(&self) -> Vec<f64> {
        self.discrete.clone()
    }
    pub fn lower(&self) -> Vec<f64> {
        self.lower.clone()
    }
}

/// Upper and lower distortion bounds for sign factors, square matrices,
/// exact fit, on `points` values of epsilon spaced evenly up to `eps_max`.
pub fn bound_curves(r: usize, eps_max: f64, points: usize) -> rankfill::Result<BoundCurves> {
    if points < 2 || !(eps_max > 0.0) {
        return Err(rankfill::Error::Config("need at least two points and eps_max > 0".into()));
    }
    let law = FactorDistribution::signs();
    let mut out = BoundCurves {
        epsilon: Vec::with_capacity(points),
        theorem1: Vec::with_capacity(points),
        discrete: Vec::with_capacity(points),
        lower: Vec::with_capacity(points),
    };
    for k in 0..points {
        let eps = eps_max * (k + 1) as f64 / points as f64;
        let inputs = BoundInputs::new(r, eps, 1.0, 0.0, law.clone(), law.clone());
        out.epsilon.push(eps);
        out.theorem1.push(theorem1_bound(&inputs)?.clamped());
        out.discrete.push(discrete_alphabet_bound(r, 2, inputs.eps_tilde(), 0.0)?);
        out.lower.push(lower_bound(&inputs, MmseForm::Squared)?.value);
    }
    Ok(out)
}

#[wasm_bindgen(js_name = boundCurves)]
pub fn bound_curves_js(r: usize, eps_max: f64, points: usize) -> Result<BoundCurves, JsError> {
    bound_curves(r, eps_max, points).map_err(|e| JsError::new(&e.to_string()))
}
