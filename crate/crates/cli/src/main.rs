use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod io;

use rankfill::harness::{Delimiter, OutputFormat};

#[derive(Parser, Debug)]
#[command(name = "rankfill", version, about = "Random low-rank matrix completion experiments")]
struct Cli {
    /// Seed for every random stream the command uses
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads (default: one per core)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DelimiterArg {
    Comma,
    Tab,
    Whitespace,
}

impl From<DelimiterArg> for Delimiter {
    fn from(d: DelimiterArg) -> Self {
        match d {
            DelimiterArg::Comma => Delimiter::Comma,
            DelimiterArg::Tab => Delimiter::Tab,
            DelimiterArg::Whitespace => Delimiter::Whitespace,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Rank1,
    Walkrank,
    Als,
}

/// How to read a triple file.
#[derive(Args, Debug, Clone)]
struct TripleArgs {
    /// Triple file: `row<delim>col<delim>value` per line, `#` comments
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = DelimiterArg::Comma)]
    delimiter: DelimiterArg,
    /// Index base of the file, 0 or 1
    #[arg(long, default_value_t = 0)]
    base: usize,
    /// Map raw values in LO:HI onto [-1, 1] (e.g. 1:5 for star ratings)
    #[arg(long, value_parser = io::parse_range, conflicts_with = "infer_range")]
    range: Option<(f64, f64)>,
    /// Map the observed min..max onto [-1, 1]
    #[arg(long)]
    infer_range: bool,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a random rank-r instance (JSON factors, or CSV triples of the full matrix)
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        /// signs, ternary, grid:K or interval
        #[arg(long, default_value = "signs", value_parser = io::parse_law)]
        factors: rankfill::harness::FactorLaw,
    },
    /// Reveal round(n * epsilon) uniformly random entries of an instance
    Sample {
        /// Instance written by `generate --format json`
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        epsilon: f64,
    },
    /// Complete a triple file and report fit (and full error given the instance)
    Complete {
        #[command(flatten)]
        triples: TripleArgs,
        #[arg(long, value_enum)]
        algorithm: AlgorithmArg,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        /// Ground truth for scoring; also fixes the matrix shape
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Factor alphabet for walkrank: signs, ternary or grid:K
        #[arg(long, default_value = "signs", value_parser = io::parse_law)]
        alphabet: rankfill::harness::FactorLaw,
        /// Allowed absolute error per revealed entry (walkrank)
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Probability of a walk move (walkrank)
        #[arg(long, default_value_t = 0.1)]
        rho: f64,
        #[arg(long)]
        max_steps: Option<u64>,
        /// Ridge weight (als); default 0.1 |E| / (n + m)
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 20)]
        sweeps: usize,
        /// Withhold this many revealed entries and report their error (als)
        #[arg(long, default_value_t = 0)]
        holdout: usize,
        /// Also write the estimated factors as JSON
        #[arg(long)]
        factors_out: Option<PathBuf>,
    },
    /// Evaluate the analytic distortion bounds at one parameter point
    Bounds {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, default_value = "signs", value_parser = io::parse_law)]
        factors: rankfill::harness::FactorLaw,
        /// Also run the (slow) coupling optimizer
        #[arg(long)]
        tight: bool,
        #[arg(long, default_value_t = 32)]
        starts: usize,
    },
    /// Run a sweep described by a JSON experiment spec
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Override instances_per_point
        #[arg(long)]
        instances: Option<usize>,
        /// Record wall-clock time per row
        #[arg(long)]
        timing: bool,
        /// Where to write the per-point aggregate (default: next to --out)
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Fit ratings, iid noise and a random rank-r matrix on the same revealed set
    Compare {
        #[command(flatten)]
        triples: TripleArgs,
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 30)]
        sweeps: usize,
        #[arg(long, default_value_t = 1000)]
        holdout: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rankfill: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
