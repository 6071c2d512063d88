use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rankfill::harness::{FactorLaw, IngestOptions};
use rankfill::model::GroundTruthInstance;
use rankfill::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::TripleArgs;

pub fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower end {lo:?}"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper end {hi:?}"))?;
    if !(lo < hi) {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

pub fn parse_law(s: &str) -> std::result::Result<FactorLaw, String> {
    match s {
        "signs" => Ok(FactorLaw::Signs),
        "ternary" => Ok(FactorLaw::Ternary),
        "interval" => Ok(FactorLaw::UniformInterval),
        _ => match s.strip_prefix("grid:").map(str::parse::<usize>) {
            Some(Ok(k)) if k >= 2 => Ok(FactorLaw::UniformGrid(k)),
            _ => Err(format!("expected signs, ternary, interval or grid:K (K >= 2), got {s:?}")),
        },
    }
}

/// `--out` file, or stdout.
pub fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

/// `results.csv` -> `results.summary.csv`.
pub fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}.summary.{}", ext.to_string_lossy()),
        None => format!("{stem}.summary"),
    };
    out.with_file_name(name)
}

pub fn ingest_options(t: &TripleArgs, shape: Option<(usize, usize)>) -> IngestOptions {
    IngestOptions {
        delimiter: t.delimiter.into(),
        index_base: t.base,
        value_range: t.range,
        rescale: t.range.is_some() || t.infer_range,
        rows: t.rows.or(shape.map(|s| s.0)),
        cols: t.cols.or(shape.map(|s| s.1)),
    }
}

/// Factors on disk: `u` holds the `n` rows of `U`, `v` the `m` columns of
/// `V`, each flattened to length-`r` chunks.
#[derive(Debug, Serialize, Deserialize)]
pub struct FactorFile {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl FactorFile {
    pub fn of_instance(t: &GroundTruthInstance) -> Self {
        FactorFile {
            n: t.rows(),
            m: t.cols(),
            r: t.rank(),
            u: t.row_factors().to_vec(),
            v: t.col_factors().to_vec(),
        }
    }

    pub fn read_instance(path: &Path) -> Result<GroundTruthInstance> {
        let text = std::fs::read_to_string(path)?;
        let f: FactorFile = serde_json::from_str(&text).map_err(|e| Error::Data {
            line: Some(e.line()),
            message: format!("{}: {e}", path.display()),
        })?;
        GroundTruthInstance::from_factors(f.n, f.m, f.r, f.u, f.v)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut w, self).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}
