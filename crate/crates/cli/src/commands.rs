use std::io::Write;
use std::path::Path;

use rankfill::als::{run_descent, DescentConfig};
use rankfill::bounds::{
    continuous_bound_preset, discrete_alphabet_bound, lower_bound, lower_bound_coarse,
    simplified_upper_bound_for, theorem1_bound, tight_upper_bound, BoundInputs, MmseForm,
    TightOptions,
};
use rankfill::graph::ObservationSet;
use rankfill::harness::{
    emit_triples, ingest_triples, run_comparison, run_experiment, write_records, write_rows,
    write_summary, CompareOptions, Delimiter, ExperimentSpec, OutputFormat, RatingTriples,
};
use rankfill::model::{DistortionReport, FactorAssignment, GroundTruthInstance, MatrixView};
use rankfill::rank1::{complete_rank1, rank1_optimal_distortion};
use rankfill::walkrank::{run_walkrank, WalkRankConfig};
use rankfill::{Error, Result};
use serde::Serialize;

use crate::io::{self, FactorFile};
use crate::{AlgorithmArg, Cli, Command};

pub fn run(cli: Cli) -> Result<()> {
    let format: OutputFormat = cli.format.into();
    let seed = cli.seed.unwrap_or(0);
    let out = cli.out.as_deref();
    match cli.command {
        Command::Generate {
            n,
            alpha,
            rank,
            factors,
        } => {
            let law = factors.distribution()?;
            let truth = GroundTruthInstance::generate(n, alpha, rank, &law, &law, seed)?;
            match format {
                OutputFormat::Json => {
                    let mut w = io::sink(out)?;
                    serde_json::to_writer(&mut w, &FactorFile::of_instance(&truth))
                        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
                    writeln!(w)?;
                    w.flush()?;
                }
                OutputFormat::Csv => {
                    let (n, m) = (truth.rows(), truth.cols());
                    let entries = (0..n)
                        .flat_map(|i| (0..m).map(move |a| (i, a)))
                        .map(|(i, a)| (i, a, truth.entry(i, a)))
                        .collect();
                    write_triples(entries, n, m, out)?;
                }
            }
        }
        Command::Sample { instance, epsilon } => {
            let truth = FactorFile::read_instance(&instance)?;
            let obs = ObservationSet::sample(&truth, epsilon, seed)?;
            match format {
                OutputFormat::Csv => write_triples(obs.iter().collect(), obs.rows(), obs.cols(), out)?,
                OutputFormat::Json => {
                    #[derive(Serialize)]
                    struct Sampled {
                        rows: usize,
                        cols: usize,
                        epsilon: f64,
                        entries: Vec<(usize, usize, f64)>,
                    }
                    let s = Sampled {
                        rows: obs.rows(),
                        cols: obs.cols(),
                        epsilon,
                        entries: obs.iter().collect(),
                    };
                    let mut w = io::sink(out)?;
                    serde_json::to_writer(&mut w, &s).map_err(|e| Error::Io(std::io::Error::other(e)))?;
                    writeln!(w)?;
                    w.flush()?;
                }
            }
        }
        Command::Complete {
            triples,
            algorithm,
            rank,
            instance,
            alphabet,
            delta,
            rho,
            max_steps,
            lambda,
            sweeps,
            holdout,
            factors_out,
        } => {
            let truth = instance.as_deref().map(FactorFile::read_instance).transpose()?;
            let shape = truth.as_ref().map(|t| (t.rows(), t.cols()));
            let data = ingest_triples(&triples.input, &io::ingest_options(&triples, shape))?;
            let obs = data.to_observations()?;
            let (train, held) = if holdout > 0 {
                let (t, h) = obs.split_holdout(holdout, seed)?;
                (t, Some(h))
            } else {
                (obs, None)
            };
            let truth = truth.as_ref();

            let mut final_cost = None;
            let (estimate, steps): (Estimate, u64) = match algorithm {
                AlgorithmArg::Rank1 => {
                    if factors_out.is_some() {
                        return Err(Error::Usage("rank1 completion has no factor output".into()));
                    }
                    (Estimate::Rank1(complete_rank1(&train)?), train.len() as u64)
                }
                AlgorithmArg::Walkrank => {
                    let support = alphabet.distribution()?.support().cloned().ok_or_else(|| {
                        Error::Config("walkrank needs a finite alphabet (signs, ternary or grid:K)".into())
                    })?;
                    let mut config = WalkRankConfig::new(rank, support);
                    config.delta = delta;
                    config.rho = rho;
                    config.max_steps = max_steps;
                    config.seed = seed;
                    let run = run_walkrank(truth, &train, &config)?;
                    final_cost = Some(run.stats.final_cost);
                    (Estimate::Factors(run.assignment), run.report.steps)
                }
                AlgorithmArg::Als => {
                    let mut config = DescentConfig::new(rank);
                    config.lambda = lambda;
                    config.sweeps = sweeps;
                    config.seed = seed;
                    let run = run_descent(truth, &train, &config)?;
                    (Estimate::Factors(run.assignment), run.report.steps)
                }
            };
            let report = DistortionReport::evaluate(truth, estimate.view(), &train, held.as_ref())?;
            if let (Some(path), Estimate::Factors(f)) = (&factors_out, &estimate) {
                FactorFile {
                    n: f.rows(),
                    m: f.cols(),
                    r: f.rank(),
                    u: f.row_factors().to_vec(),
                    v: f.col_factors().to_vec(),
                }
                .write(path)?;
            }
            let summary = CompletionSummary {
                algorithm: algorithm_name(algorithm),
                rows: train.rows(),
                cols: train.cols(),
                revealed: train.len(),
                rank,
                rmse: report.rmse,
                fit_error: report.fit_error,
                prediction_error: report.prediction_error,
                holdout_error: report.holdout_error,
                steps,
                final_cost,
            };
            write_records(&[summary], &CompletionSummary::COLUMNS, io::sink(out)?, format)?;
        }
        Command::Bounds {
            rank,
            epsilon,
            alpha,
            delta,
            factors,
            tight,
            starts,
        } => {
            let law = factors.distribution()?;
            let inputs = BoundInputs::new(rank, epsilon, alpha, delta, law.clone(), law.clone());
            inputs.validate()?;
            let et = inputs.eps_tilde();
            let mut rows = Vec::new();
            let t1 = theorem1_bound(&inputs)?;
            rows.push(BoundRow::new(
                "theorem1",
                Ok(t1.clamped()),
                if t1.trivial {
                    "trivial ceiling 2r + delta"
                } else if !t1.is_informative() {
                    "formula above the ceiling, clamped to 2r + delta"
                } else {
                    ""
                },
            ));
            rows.push(BoundRow::new("simplified", simplified_upper_bound_for(&inputs), ""));
            match law.support() {
                Some(a) => rows.push(BoundRow::new(
                    "discrete_alphabet",
                    discrete_alphabet_bound(rank, a.len(), et, delta),
                    "",
                )),
                None => rows.push(BoundRow::new(
                    "continuous",
                    continuous_bound_preset(rank, et, delta),
                    "grid of ceil(4 sqrt(eps_tilde)) + 1 points",
                )),
            }
            rows.push(BoundRow::new(
                "lower",
                lower_bound(&inputs, MmseForm::Squared).map(|b| b.value),
                "",
            ));
            rows.push(BoundRow::new(
                "lower_literal",
                lower_bound(&inputs, MmseForm::Literal).map(|b| b.value),
                "unsquared conditional residual",
            ));
            rows.push(BoundRow::new(
                "lower_coarse",
                lower_bound_coarse(&inputs, MmseForm::Squared).map(f64::sqrt),
                "",
            ));
            if rank == 1 {
                rows.push(BoundRow::new(
                    "rank1_optimal",
                    rank1_optimal_distortion(epsilon, alpha, law.second_moment()),
                    "",
                ));
            }
            if tight {
                let options = TightOptions {
                    starts,
                    seed,
                    ..TightOptions::default()
                };
                let note = "best coupling found; a lower estimate of the supremum";
                rows.push(BoundRow::new(
                    "tight",
                    tight_upper_bound(&inputs, &options).map(|b| b.value),
                    note,
                ));
            }
            write_records(&rows, &BoundRow::COLUMNS, io::sink(out)?, format)?;
        }
        Command::Experiment {
            config,
            instances,
            timing,
            summary,
        } => {
            let text = std::fs::read_to_string(&config)?;
            let mut spec = ExperimentSpec::from_json(&text)?;
            if let Some(s) = cli.seed {
                spec.seed_base = s;
            }
            if let Some(k) = instances {
                spec.instances_per_point = k;
            }
            spec.timing |= timing;
            let destination = out.map(Path::to_path_buf).or_else(|| spec.output.clone());
            let result = run_experiment(&spec, cli.jobs)?;
            write_rows(&result.rows, io::sink(destination.as_deref())?, format)?;
            if let Some(path) = summary.or_else(|| destination.as_deref().map(io::summary_path)) {
                write_summary(&result.summary, io::sink(Some(&path))?, format)?;
            }
        }
        Command::Compare {
            triples,
            rank,
            lambda,
            sweeps,
            holdout,
        } => {
            let data = ingest_triples(&triples.input, &io::ingest_options(&triples, None))?;
            let curves = run_comparison(
                &data,
                &CompareOptions {
                    r: rank,
                    lambda,
                    sweeps,
                    holdout,
                    seed,
                },
            )?;
            let rows: Vec<CompareRow> = curves
                .iter()
                .flat_map(|c| {
                    c.sweeps.iter().map(move |s| CompareRow {
                        matrix: c.label,
                        sweep: s.sweep,
                        lambda: c.lambda,
                        energy: s.energy,
                        fit_error: s.fit_error,
                        holdout_error: s.holdout_error,
                    })
                })
                .collect();
            write_records(&rows, &CompareRow::COLUMNS, io::sink(out)?, format)?;
        }
    }
    Ok(())
}


fn write_triples(entries: Vec<(usize, usize, f64)>, rows: usize, cols: usize, out: Option<&Path>) -> Result<()> {
    let t = RatingTriples {
        rows,
        cols,
        entries,
        value_range: (-1.0, 1.0),
    };
    let mut w = io::sink(out)?;
    emit_triples(&t, &mut w, Delimiter::Comma, 0)?;
    w.flush()?;
    Ok(())
}

fn algorithm_name(a: AlgorithmArg) -> &'static str {
    match a {
        AlgorithmArg::Rank1 => "rank1",
        AlgorithmArg::Walkrank => "walkrank",
        AlgorithmArg::Als => "als",
    }
}

enum Estimate {
    Rank1(rankfill::rank1::Rank1Completion),
    Factors(FactorAssignment),
}

impl Estimate {
    fn view(&self) -> &dyn MatrixView {
        match self {
            Estimate::Rank1(c) => c,
            Estimate::Factors(f) => f,
        }
    }
}

#[derive(Serialize)]
struct CompletionSummary {
    algorithm: &'static str,
    rows: usize,
    cols: usize,
    revealed: usize,
    rank: usize,
    rmse: Option<f64>,
    fit_error: Option<f64>,
    prediction_error: Option<f64>,
    holdout_error: Option<f64>,
    steps: u64,
    final_cost: Option<usize>,
}

impl CompletionSummary {
    const COLUMNS: [&'static str; 11] = [
        "algorithm",
        "rows",
        "cols",
        "revealed",
        "rank",
        "rmse",
        "fit_error",
        "prediction_error",
        "holdout_error",
        "steps",
        "final_cost",
    ];
}

#[derive(Serialize)]
struct BoundRow {
    bound: &'static str,
    value: Option<f64>,
    note: String,
}

impl BoundRow {
    const COLUMNS: [&'static str; 3] = ["bound", "value", "note"];

    fn new(bound: &'static str, value: Result<f64>, note: &str) -> Self {
        match value {
            Ok(v) => BoundRow {
                bound,
                value: Some(v),
                note: note.to_string(),
            },
            Err(e) => BoundRow {
                bound,
                value: None,
                note: e.to_string(),
            },
        }
    }
}

#[derive(Serialize)]
struct CompareRow {
    matrix: &'static str,
    sweep: usize,
    lambda: f64,
    energy: f64,
    fit_error: Option<f64>,
    holdout_error: Option<f64>,
}

impl CompareRow {
    const COLUMNS: [&'static str; 6] = ["matrix", "sweep", "lambda", "energy", "fit_error", "holdout_error"];
}
