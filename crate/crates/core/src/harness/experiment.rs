use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::als::{run_descent, DescentConfig};
use crate::bounds::{
    continuous_bound_preset, discrete_alphabet_bound, lower_bound_with, mmse_constant,
    theorem1_bound, BoundInputs, MmseForm,
};
use crate::clock::Stopwatch;
use crate::error::{Error, Result};
use crate::graph::ObservationSet;
use crate::model::{
    column_count, DiscreteAlphabet, DistortionReport, FactorDistribution, GroundTruthInstance,
    MatrixView,
};
use crate::rank1::{complete_rank1, rank1_optimal_distortion};
use crate::walkrank::{run_walkrank, GreedyFocus, WalkRankConfig};

/// Stamped on every output row.
pub const VERSION: &str = concat!("rankfill-", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Rank1,
    Walkrank,
    Als,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorLaw {
    #[default]
    Signs,
    Ternary,
    /// Uniform over the `k`-point grid of `[-1, 1]`.
    UniformGrid(usize),
    UniformInterval,
}

impl FactorLaw {
    pub fn distribution(&self) -> Result<FactorDistribution> {
        Ok(match self {
            FactorLaw::Signs => FactorDistribution::signs(),
            FactorLaw::Ternary => FactorDistribution::ternary(),
            FactorLaw::UniformGrid(k) => FactorDistribution::uniform_over(DiscreteAlphabet::uniform(*k)?),
            FactorLaw::UniformInterval => FactorDistribution::uniform_interval(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub n: Vec<usize>,
    #[serde(default = "one_f64")]
    pub alpha: Vec<f64>,
    #[serde(default = "one_usize")]
    pub r: Vec<usize>,
    pub epsilon: Vec<f64>,
}

fn one_f64() -> Vec<f64> {
    vec![1.0]
}

fn one_usize() -> Vec<usize> {
    vec![1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WalkRankParams {
    pub delta: f64,
    pub rho: f64,
    /// `None` means the size-dependent default budget.
    pub max_steps: Option<u64>,
    pub greedy_focus: GreedyFocus,
    /// Grid spacing for searching continuous factor laws.
    pub grid_step: Option<f64>,
}

impl Default for WalkRankParams {
    fn default() -> Self {
        WalkRankParams {
            delta: 0.0,
            rho: 0.1,
            max_steps: None,
            greedy_focus: GreedyFocus::default(),
            grid_step: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlsParams {
    pub lambda: Option<f64>,
    pub sweeps: usize,
    pub init_scale: f64,
}

impl Default for AlsParams {
    fn default() -> Self {
        let d = DescentConfig::new(1);
        AlsParams {
            lambda: d.lambda,
            sweeps: d.sweeps,
            init_scale: d.init_scale,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub grid: Grid,
    pub algorithm: Algorithm,
    #[serde(default)]
    pub factors: FactorLaw,
    #[serde(default)]
    pub walkrank: WalkRankParams,
    #[serde(default)]
    pub als: AlsParams,
    #[serde(default = "ten")]
    pub instances_per_point: usize,
    #[serde(default)]
    pub seed_base: u64,
    /// Report wall-clock milliseconds; off by default so output is reproducible.
    #[serde(default)]
    pub timing: bool,
    #[serde(default)]
    pub output: Option<std::path::PathBuf>,
}

fn ten() -> usize {
    10
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub r: usize,
    pub epsilon: f64,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("experiment spec: {e}")))
    }

    /// Grid points in output order: `n`, then `alpha`, `r`, `epsilon`.
    pub fn points(&self) -> Vec<GridPoint> {
        let g = &self.grid;
        let mut out = Vec::new();
        for &n in &g.n {
            for &alpha in &g.alpha {
                for &r in &g.r {
                    for &epsilon in &g.epsilon {
                        out.push(GridPoint {
                            n,
                            m: column_count(n, alpha),
                            alpha,
                            r,
                            epsilon,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.instances_per_point == 0 {
            return Err(Error::Config("instances_per_point must be at least 1".into()));
        }
        let law = self.factors.distribution()?;
        for p in self.points() {
            if p.n == 0 || p.r == 0 {
                return Err(Error::Config(format!("grid point n={} r={} is empty", p.n, p.r)));
            }
            if !(p.alpha > 0.0 && p.alpha.is_finite()) || p.m == 0 {
                return Err(Error::Config(format!("alpha={} gives no columns at n={}", p.alpha, p.n)));
            }
            if !(p.epsilon >= 0.0 && p.epsilon.is_finite()) {
                return Err(Error::Config(format!("epsilon must be non-negative, got {}", p.epsilon)));
            }
            match self.algorithm {
                Algorithm::Walkrank => {
                    self.walkrank_config(p.r, &law, 0)?;
                }
                Algorithm::Als => {
                    if !(self.als.init_scale > 0.0) || self.als.lambda.is_some_and(|l| !(l >= 0.0)) {
                        return Err(Error::Config("invalid alternating-descent parameters".into()));
                    }
                }
                Algorithm::Rank1 => {}
            }
        }
        Ok(())
    }

    fn walkrank_config(&self, r: usize, law: &FactorDistribution, seed: u64) -> Result<WalkRankConfig> {
        let p = &self.walkrank;
        let mut c = match (law.support(), p.grid_step) {
            (_, Some(step)) => WalkRankConfig::for_continuous(r, p.delta, step)?,
            (Some(alphabet), None) => {
                let mut c = WalkRankConfig::new(r, alphabet.clone());
                c.delta = p.delta;
                c
            }
            (None, None) => {
                return Err(Error::Config(
                    "walkrank on a continuous factor law needs walkrank.grid_step".into(),
                ))
            }
        };
        if !(0.0..=1.0).contains(&p.rho) {
            return Err(Error::Config(format!("rho must lie in [0, 1], got {}", p.rho)));
        }
        c.rho = p.rho;
        c.greedy_focus = p.greedy_focus;
        c.max_steps = p.max_steps;
        c.seed = seed;
        Ok(c)
    }

    /// First 16 hex digits of the SHA-256 of the spec (without `output`).
    pub fn config_hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = None;
        let json = serde_json::to_string(&canonical).expect("spec serializes");
        Sha256::digest(json.as_bytes())[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub r: usize,
    pub epsilon: f64,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub rmse: Option<f64>,
    pub fit_error: Option<f64>,
    pub prediction_error: Option<f64>,
    pub steps: Option<u64>,
    pub wall_ms: Option<f64>,
    pub bound_theorem1: Option<f64>,
    pub bound_discrete: Option<f64>,
    pub bound_lower: Option<f64>,
    pub error: Option<String>,
    pub config_hash: String,
    pub version: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub r: usize,
    pub epsilon: f64,
    pub algorithm: Algorithm,
    pub instances: usize,
    pub failures: usize,
    pub rmse_mean: Option<f64>,
    pub rmse_stderr: Option<f64>,
    pub fit_error_mean: Option<f64>,
    pub fit_error_stderr: Option<f64>,
    pub prediction_error_mean: Option<f64>,
    pub prediction_error_stderr: Option<f64>,
    pub steps_mean: Option<f64>,
    pub bound_theorem1: Option<f64>,
    pub bound_discrete: Option<f64>,
    pub bound_lower: Option<f64>,
    pub bound_rank1_optimal: Option<f64>,
    pub config_hash: String,
    pub version: &'static str,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub rows: Vec<ExperimentRow>,
    pub summary: Vec<SummaryRow>,
}

#[derive(Debug, Clone, Copy, Default)]
struct PointBounds {
    theorem1: Option<f64>,
    discrete: Option<f64>,
    lower: Option<f64>,
    rank1_optimal: Option<f64>,
}

fn point_bounds(p: &GridPoint, law: &FactorDistribution, delta: f64, c_tilde: Option<f64>) -> PointBounds {
    let inputs = BoundInputs::new(p.r, p.epsilon, p.alpha, delta, law.clone(), law.clone());
    let et = inputs.eps_tilde();
    let discrete = match law.support() {
        Some(a) => discrete_alphabet_bound(p.r, a.len(), et, delta).ok(),
        None => continuous_bound_preset(p.r, et, delta).ok(),
    };
    let rank1_optimal = (p.r == 1)
        .then(|| rank1_optimal_distortion(p.epsilon, p.alpha, law.second_moment()).ok())
        .flatten();
    PointBounds {
        theorem1: theorem1_bound(&inputs).ok().map(|b| b.clamped()),
        discrete,
        lower: c_tilde.map(|c| lower_bound_with(&inputs, c).value),
        rank1_optimal,
    }
}

struct Measured {
    report: DistortionReport,
}

fn run_one(spec: &ExperimentSpec, law: &FactorDistribution, p: &GridPoint, seed: u64) -> Result<Measured> {
    let truth = GroundTruthInstance::generate_shape(p.n, p.m, p.r, law, law, seed)?;
    let obs = ObservationSet::sample(&truth, p.epsilon, seed)?;
    let report = match spec.algorithm {
        Algorithm::Rank1 => {
            let c = complete_rank1(&obs)?;
            let mut report = DistortionReport::evaluate(Some(&truth), &c as &dyn MatrixView, &obs, None)?;
            report.steps = obs.len() as u64;
            report
        }
        Algorithm::Walkrank => {
            let config = spec.walkrank_config(p.r, law, seed)?;
            run_walkrank(Some(&truth), &obs, &config)?.report
        }
        Algorithm::Als => {
            let mut config = DescentConfig::new(p.r);
            config.lambda = spec.als.lambda;
            config.sweeps = spec.als.sweeps;
            config.init_scale = spec.als.init_scale;
            config.seed = seed;
            run_descent(Some(&truth), &obs, &config)?.report
        }
    };
    Ok(Measured { report })
}

fn mean_stderr(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (Some(mean), None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (Some(mean), Some((var / k).sqrt()))
}

/// Run every grid point and instance. Instance `k` uses seed `seed_base + k`
/// at every point, for instance generation, sampling and the solver alike.
///
/// A failing instance becomes a row with an `error` message and empty
/// metrics; only an invalid spec aborts the run.
pub fn run_experiment(spec: &ExperimentSpec, jobs: Option<usize>) -> Result<ExperimentOutput> {
    spec.validate()?;
    let law = spec.factors.distribution()?;
    let points = spec.points();
    let hash = spec.config_hash();
    let delta = match spec.algorithm {
        Algorithm::Walkrank => spec.walkrank.delta,
        _ => 0.0,
    };

    // The MMSE constant depends only on r; enumerate it once per rank.
    let mut c_tilde = BTreeMap::new();
    if law.support().is_some() {
        for p in &points {
            c_tilde
                .entry(p.r)
                .or_insert_with(|| mmse_constant(p.r, &law, &law, MmseForm::Squared).ok());
        }
    }
    let bounds = crate::par::map_on(points.len(), jobs, |k| {
        let p = &points[k];
        point_bounds(p, &law, delta, c_tilde.get(&p.r).copied().flatten())
    })?;

    let per_point = spec.instances_per_point;
    let rows = crate::par::map_on(points.len() * per_point, jobs, |job| {
        let (p, b) = (&points[job / per_point], &bounds[job / per_point]);
        let seed = spec.seed_base.wrapping_add((job % per_point) as u64);
        let clock = Stopwatch::start();
        let outcome = run_one(spec, &law, p, seed);
        let wall_ms = spec.timing.then(|| clock.elapsed_ms());
        let mut row = ExperimentRow {
            n: p.n,
            m: p.m,
            alpha: p.alpha,
            r: p.r,
            epsilon: p.epsilon,
            algorithm: spec.algorithm,
            seed,
            rmse: None,
            fit_error: None,
            prediction_error: None,
            steps: None,
            wall_ms,
            bound_theorem1: b.theorem1,
            bound_discrete: b.discrete,
            bound_lower: b.lower,
            error: None,
            config_hash: hash.clone(),
            version: VERSION,
        };
        match outcome {
            Ok(Measured { report }) => {
                row.rmse = report.rmse;
                row.fit_error = report.fit_error;
                row.prediction_error = report.prediction_error;
                row.steps = Some(report.steps);
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        row
    })?;

    let summary = points
        .iter()
        .zip(&bounds)
        .zip(rows.chunks(per_point.max(1)))
        .map(|((p, b), chunk)| {
            let ok: Vec<&ExperimentRow> = chunk.iter().filter(|r| r.error.is_none()).collect();
            let collect = |f: fn(&ExperimentRow) -> Option<f64>| -> Vec<f64> {
                ok.iter().filter_map(|r| f(r)).collect()
            };
            let (rmse_mean, rmse_stderr) = mean_stderr(&collect(|r| r.rmse));
            let (fit_error_mean, fit_error_stderr) = mean_stderr(&collect(|r| r.fit_error));
            let (prediction_error_mean, prediction_error_stderr) =
                mean_stderr(&collect(|r| r.prediction_error));
            let (steps_mean, _) = mean_stderr(&collect(|r| r.steps.map(|s| s as f64)));
            SummaryRow {
                n: p.n,
                m: p.m,
                alpha: p.alpha,
                r: p.r,
                epsilon: p.epsilon,
                algorithm: spec.algorithm,
                instances: chunk.len(),
                failures: chunk.len() - ok.len(),
                rmse_mean,
                rmse_stderr,
                fit_error_mean,
                fit_error_stderr,
                prediction_error_mean,
                prediction_error_stderr,
                steps_mean,
                bound_theorem1: b.theorem1,
                bound_discrete: b.discrete,
                bound_lower: b.lower,
                bound_rank1_optimal: b.rank1_optimal,
                config_hash: hash.clone(),
                version: VERSION,
            }
        })
        .collect();
    Ok(ExperimentOutput { rows, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Header plus one record per row; `\n` line endings, quoting only where
/// needed. An empty slice still yields the header.
pub fn write_records<T: Serialize>(rows: &[T], header: &[&str], out: impl Write, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(header).map_err(csv_error)?;
            for row in rows {
                w.serialize(row).map_err(csv_error)?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

pub const ROW_COLUMNS: [&str; 18] = [
    "n",
    "m",
    "alpha",
    "r",
    "epsilon",
    "algorithm",
    "seed",
    "rmse",
    "fit_error",
    "prediction_error",
    "steps",
    "wall_ms",
    "bound_theorem1",
    "bound_discrete",
    "bound_lower",
    "error",
    "config_hash",
    "version",
];

pub const SUMMARY_COLUMNS: [&str; 21] = [
    "n",
    "m",
    "alpha",
    "r",
    "epsilon",
    "algorithm",
    "instances",
    "failures",
    "rmse_mean",
    "rmse_stderr",
    "fit_error_mean",
    "fit_error_stderr",
    "prediction_error_mean",
    "prediction_error_stderr",
    "steps_mean",
    "bound_theorem1",
    "bound_discrete",
    "bound_lower",
    "bound_rank1_optimal",
    "config_hash",
    "version",
];

pub fn write_rows(rows: &[ExperimentRow], out: impl Write, format: OutputFormat) -> Result<()> {
    write_records(rows, &ROW_COLUMNS, out, format)
}

pub fn write_summary(rows: &[SummaryRow], out: impl Write, format: OutputFormat) -> Result<()> {
    write_records(rows, &SUMMARY_COLUMNS, out, format)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(json: &str) -> ExperimentSpec {
        ExperimentSpec::from_json(json).unwrap()
    }

    fn csv_text(rows: &[ExperimentRow]) -> String {
        let mut buf = Vec::new();
        write_rows(rows, &mut buf, OutputFormat::Csv).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_grid_gives_header_only() {
        let s = spec(r#"{"grid": {"n": [100], "epsilon": []}, "algorithm": "rank1"}"#);
        let out = run_experiment(&s, None).unwrap();
        assert!(out.rows.is_empty() && out.summary.is_empty());
        assert_eq!(csv_text(&out.rows), ROW_COLUMNS.join(",") + "\n");
    }

    #[test]
    fn serialized_columns_match_header() {
        let s = spec(r#"{"grid": {"n": [50], "epsilon": [2.0]}, "algorithm": "rank1", "instances_per_point": 2}"#);
        let out = run_experiment(&s, Some(2)).unwrap();
        let text = csv_text(&out.rows);
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
        assert_eq!(header, ROW_COLUMNS);
        let records: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
        assert_eq!(records.len(), 2);
        assert_eq!(&records[0][5], "rank1");
        assert_eq!(&records[1][6], "1");
        assert_eq!(&records[0][11], "", "wall_ms blank without timing");
        assert_eq!(&records[0][15], "", "no error");
        assert!(!text.contains('\r'));

        let mut buf = Vec::new();
        write_summary(&out.summary, &mut buf, OutputFormat::Csv).unwrap();
        let mut reader = csv::Reader::from_reader(buf.as_slice());
        assert_eq!(reader.headers().unwrap().len(), SUMMARY_COLUMNS.len());
        assert_eq!(reader.records().count(), 1);
    }

    #[test]
    fn output_is_bit_identical_across_job_counts() {
        let s = spec(
            r#"{"grid": {"n": [60, 90], "r": [1, 2], "epsilon": [3.0, 6.0]},
                "algorithm": "walkrank", "instances_per_point": 3, "seed_base": 40,
                "walkrank": {"max_steps": 3000}}"#,
        );
        let a = csv_text(&run_experiment(&s, Some(1)).unwrap().rows);
        let b = csv_text(&run_experiment(&s, Some(4)).unwrap().rows);
        let c = csv_text(&run_experiment(&s, None).unwrap().rows);
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.lines().count(), 1 + 2 * 2 * 2 * 3);
    }

    #[test]
    fn rows_follow_grid_then_instance_order() {
        let s = spec(r#"{"grid": {"n": [40, 20], "epsilon": [1.0, 3.0]}, "algorithm": "rank1", "instances_per_point": 2, "seed_base": 7}"#);
        let out = run_experiment(&s, Some(3)).unwrap();
        let keys: Vec<(usize, f64, u64)> = out.rows.iter().map(|r| (r.n, r.epsilon, r.seed)).collect();
        assert_eq!(
            keys,
            vec![
                (40, 1.0, 7),
                (40, 1.0, 8),
                (40, 3.0, 7),
                (40, 3.0, 8),
                (20, 1.0, 7),
                (20, 1.0, 8),
                (20, 3.0, 7),
                (20, 3.0, 8)
            ]
        );
    }

    #[test]
    fn failures_are_recorded_not_fatal() {
        // ternary factors put zeros among the observations
        let s = spec(r#"{"grid": {"n": [30], "epsilon": [3.0]}, "algorithm": "rank1", "factors": "ternary", "instances_per_point": 2}"#);
        let out = run_experiment(&s, None).unwrap();
        assert!(out.rows.iter().all(|r| r.error.as_deref().is_some_and(|e| e.contains("zero"))));
        assert!(out.rows.iter().all(|r| r.rmse.is_none()));
        assert_eq!(out.summary[0].failures, 2);
        assert_eq!(out.summary[0].rmse_mean, None);
    }

    #[test]
    fn invalid_specs_are_config_errors() {
        let bad = [
            r#"{"grid": {"n": [10], "epsilon": [1.0]}, "algorithm": "rank1", "instances_per_point": 0}"#,
            r#"{"grid": {"n": [0], "epsilon": [1.0]}, "algorithm": "rank1"}"#,
            r#"{"grid": {"n": [10], "epsilon": [-1.0]}, "algorithm": "rank1"}"#,
            r#"{"grid": {"n": [10], "epsilon": [1.0]}, "algorithm": "walkrank", "factors": "uniform_interval"}"#,
            r#"{"grid": {"n": [10], "epsilon": [1.0]}, "algorithm": "walkrank", "walkrank": {"rho": 2.0}}"#,
        ];
        for text in bad {
            assert!(matches!(run_experiment(&spec(text), None), Err(Error::Config(_))), "{text}");
        }
        assert!(ExperimentSpec::from_json(r#"{"grid": {"n": [1], "epsilon": [1]}, "algorithm": "svd"}"#).is_err());
        assert!(ExperimentSpec::from_json(r#"{"grid": {"n": [1], "epsilon": [1]}, "algorithm": "als", "typo": 1}"#).is_err());
        let s = spec(r#"{"grid": {"n": [10], "epsilon": [1.0]}, "algorithm": "rank1"}"#);
        assert!(matches!(run_experiment(&s, Some(0)), Err(Error::Config(_))));
    }

    #[test]
    fn config_hash_ignores_output_path_only() {
        let a = spec(r#"{"grid": {"n": [10], "epsilon": [1.0]}, "algorithm": "als"}"#);
        let mut b = a.clone();
        b.output = Some("elsewhere.csv".into());
        assert_eq!(a.config_hash(), b.config_hash());
        assert_eq!(a.config_hash().len(), 16);
        b.seed_base = 1;
        assert_ne!(a.config_hash(), b.config_hash());
    }

    #[test]
    fn companion_bounds() {
        let s = spec(r#"{"grid": {"n": [40], "epsilon": [2.0, 100.0]}, "algorithm": "rank1", "instances_per_point": 1}"#);
        let out = run_experiment(&s, None).unwrap();
        let (low, high) = (&out.summary[0], &out.summary[1]);
        // r = 1, signs: the trivial ceiling at small eps, informative at large
        assert_eq!(low.bound_theorem1, Some(2.0));
        assert!(high.bound_theorem1.unwrap() < 2.0);
        let r1 = low.bound_rank1_optimal.unwrap();
        assert!(low.bound_lower.unwrap() <= r1 + 1e-12 && r1 < 1.0);
        assert!(high.bound_rank1_optimal.unwrap() < 1e-6);
    }

    #[test]
    fn timing_fills_wall_ms() {
        let s = spec(r#"{"grid": {"n": [30], "epsilon": [2.0]}, "algorithm": "als", "instances_per_point": 1, "timing": true, "als": {"sweeps": 2}}"#);
        let out = run_experiment(&s, None).unwrap();
        assert!(out.rows[0].wall_ms.is_some());
        assert_eq!(out.rows[0].steps, Some(2));
        let mut buf = Vec::new();
        write_rows(&out.rows, &mut buf, OutputFormat::Json).unwrap();
        let parsed: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(parsed[0]["algorithm"], "als");
    }
}
