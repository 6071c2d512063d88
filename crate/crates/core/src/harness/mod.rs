//! Experiment sweeps, rating-file ingestion and flat CSV/JSON output.

mod compare;
mod experiment;
mod ingest;

pub use compare::{make_comparison_matrices, run_comparison, CompareOptions, ComparisonCurve, ComparisonSet};
pub use experiment::{
    run_experiment, write_records, write_rows, write_summary, AlsParams, Algorithm, ExperimentOutput,
    ExperimentRow, ExperimentSpec, FactorLaw, Grid, GridPoint, OutputFormat, SummaryRow, WalkRankParams,
    ROW_COLUMNS, SUMMARY_COLUMNS, VERSION,
};
pub use ingest::{emit_triples, ingest_triples, parse_triples, Delimiter, IngestOptions, RatingTriples};
