use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ObservationSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Delimiter {
    #[default]
    Comma,
    Tab,
    /// Any run of spaces or tabs.
    Whitespace,
}

impl Delimiter {
    fn split<'a>(&self, line: &'a str) -> Vec<&'a str> {
        match self {
            Delimiter::Comma => line.split(',').map(str::trim).collect(),
            Delimiter::Tab => line.split('\t').map(str::trim).collect(),
            Delimiter::Whitespace => line.split_whitespace().collect(),
        }
    }

    fn as_str(&self) -> &'static str {
        match self {
            Delimiter::Comma => ",",
            Delimiter::Tab => "\t",
            Delimiter::Whitespace => " ",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestOptions {
    pub delimiter: Delimiter,
    /// 0 or 1.
    pub index_base: usize,
    /// Raw value range mapped onto `[-1, 1]`; the observed min and max when absent.
    pub value_range: Option<(f64, f64)>,
    /// Off: keep values as written (already on the model's scale).
    pub rescale: bool,
    /// Matrix shape; one past the largest index when absent.
    pub rows: Option<usize>,
    pub cols: Option<usize>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            delimiter: Delimiter::Comma,
            index_base: 0,
            value_range: None,
            rescale: true,
            rows: None,
            cols: None,
        }
    }
}

/// Revealed ratings, zero-based, values rescaled to `[-1, 1]` unless
/// ingestion was told otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingTriples {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, f64)>,
    /// The raw range that was mapped onto `[-1, 1]` (or merely checked).
    pub value_range: (f64, f64),
}

impl RatingTriples {
    pub fn to_observations(&self) -> Result<ObservationSet> {
        ObservationSet::from_entries(self.rows, self.cols, self.entries.clone())
    }
}

/// `2 (v - lo) / (hi - lo) - 1`, exact identity on `(-1, 1)`.
fn rescale(v: f64, (lo, hi): (f64, f64)) -> f64 {
    if (lo, hi) == (-1.0, 1.0) {
        v
    } else {
        2.0 * (v - lo) / (hi - lo) - 1.0
    }
}

pub fn ingest_triples(path: &Path, options: &IngestOptions) -> Result<RatingTriples> {
    let file = File::open(path).map_err(|e| Error::Data {
        line: None,
        message: format!("{}: {e}", path.display()),
    })?;
    parse_triples(BufReader::new(file), options)
}

pub fn parse_triples(reader: impl BufRead, options: &IngestOptions) -> Result<RatingTriples> {
    if options.index_base > 1 {
        return Err(Error::Config(format!(
            "index base must be 0 or 1, got {}",
            options.index_base
        )));
    }
    if let Some((lo, hi)) = options.value_range {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!("empty value range ({lo}, {hi})")));
        }
    }

    // (line, row, col, raw value)
    let mut raw = Vec::new();
    let mut seen = HashSet::new();
    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields = options.delimiter.split(text);
        if fields.len() != 3 {
            return Err(Error::data(
                line_no,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        let index = |s: &str, what: &str| -> Result<usize> {
            let x: usize = s
                .parse()
                .map_err(|_| Error::data(line_no, format!("bad {what} index {s:?}")))?;
            x.checked_sub(options.index_base).ok_or_else(|| {
                Error::data(line_no, format!("{what} index {x} below base {}", options.index_base))
            })
        };
        let i = index(fields[0], "row")?;
        let a = index(fields[1], "column")?;
        let v: f64 = fields[2]
            .parse()
            .map_err(|_| Error::data(line_no, format!("bad value {:?}", fields[2])))?;
        if !v.is_finite() {
            return Err(Error::data(line_no, "value is not finite"));
        }
        if options.rows.is_some_and(|n| i >= n) || options.cols.is_some_and(|m| a >= m) {
            return Err(Error::data(line_no, format!("index ({i}, {a}) out of range")));
        }
        if !seen.insert((i, a)) {
            return Err(Error::data(line_no, format!("duplicate entry ({i}, {a})")));
        }
        raw.push((line_no, i, a, v));
    }

    let lo = raw.iter().map(|e| e.3).fold(f64::INFINITY, f64::min);
    let hi = raw.iter().map(|e| e.3).fold(f64::NEG_INFINITY, f64::max);
    let range = match options.value_range {
        Some(r) => r,
        None if !options.rescale => (lo.min(hi), hi.max(lo)),
        None if lo < hi => (lo, hi),
        None => {
            return Err(Error::Data {
                line: None,
                message: "cannot infer a value range from fewer than two distinct values".into(),
            })
        }
    };
    let mut entries = Vec::with_capacity(raw.len());
    for &(line_no, i, a, v) in &raw {
        if v < range.0 || v > range.1 {
            return Err(Error::data(
                line_no,
                format!("value {v} outside range [{}, {}]", range.0, range.1),
            ));
        }
        entries.push((i, a, if options.rescale { rescale(v, range) } else { v }));
    }
    let rows = options
        .rows
        .unwrap_or_else(|| raw.iter().map(|e| e.1 + 1).max().unwrap_or(0));
    let cols = options
        .cols
        .unwrap_or_else(|| raw.iter().map(|e| e.2 + 1).max().unwrap_or(0));
    Ok(RatingTriples {
        rows,
        cols,
        entries,
        value_range: range,
    })
}

/// Write entries as stored, one per line. Reading the output back with
/// `rescale` off and the same delimiter and base reproduces them exactly.
pub fn emit_triples(
    triples: &RatingTriples,
    out: &mut impl Write,
    delimiter: Delimiter,
    index_base: usize,
) -> Result<()> {
    let d = delimiter.as_str();
    writeln!(out, "# {} x {}", triples.rows, triples.cols)?;
    for &(i, a, v) in &triples.entries {
        writeln!(out, "{}{d}{}{d}{v:?}", i + index_base, a + index_base)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, options: &IngestOptions) -> Result<RatingTriples> {
        parse_triples(text.as_bytes(), options)
    }

    #[test]
    fn rescales_rating_endpoints_and_midpoint() {
        let opts = IngestOptions {
            index_base: 1,
            value_range: Some((1.0, 5.0)),
            ..Default::default()
        };
        let t = parse("1,2,5\n", &opts).unwrap();
        assert_eq!(t.entries, vec![(0, 1, 1.0)]);

        let opts = IngestOptions {
            delimiter: Delimiter::Whitespace,
            value_range: Some((1.0, 5.0)),
            ..Default::default()
        };
        let t = parse("3 7 3\n", &opts).unwrap();
        assert_eq!(t.entries, vec![(3, 7, 0.0)]);
        assert_eq!((t.rows, t.cols), (4, 8));
    }

    #[test]
    fn comments_blank_lines_and_tabs() {
        let opts = IngestOptions {
            delimiter: Delimiter::Tab,
            value_range: Some((0.0, 2.0)),
            ..Default::default()
        };
        let t = parse("# header\n\n0\t0\t0\n  # indented\n1\t2\t2\n", &opts).unwrap();
        assert_eq!(t.entries, vec![(0, 0, -1.0), (1, 2, 1.0)]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let opts = IngestOptions {
            value_range: Some((1.0, 5.0)),
            ..Default::default()
        };
        let line_of = |text: &str| match parse(text, &opts) {
            Err(Error::Data { line, .. }) => line,
            other => panic!("expected a data error, got {other:?}"),
        };
        assert_eq!(line_of("0,0,1\n0,1\n"), Some(2));
        assert_eq!(line_of("# c\n0,0,1\nx,1,2\n"), Some(3));
        assert_eq!(line_of("0,0,1\n0,0,2\n"), Some(2));
        assert_eq!(line_of("0,0,9\n"), Some(1));
        assert_eq!(line_of("0,0,nan\n"), Some(1));

        let based = IngestOptions {
            index_base: 1,
            value_range: Some((1.0, 5.0)),
            ..Default::default()
        };
        assert!(matches!(parse("0,1,1\n", &based), Err(Error::Data { line: Some(1), .. })));
        let shaped = IngestOptions {
            rows: Some(2),
            cols: Some(2),
            value_range: Some((1.0, 5.0)),
            ..Default::default()
        };
        assert!(matches!(parse("2,0,1\n", &shaped), Err(Error::Data { line: Some(1), .. })));
        let bad_base = IngestOptions {
            index_base: 2,
            ..Default::default()
        };
        assert!(matches!(parse("", &bad_base), Err(Error::Config(_))));
    }

    #[test]
    fn inferred_range() {
        let t = parse("0,0,2\n0,1,4\n1,0,3\n", &IngestOptions::default()).unwrap();
        assert_eq!(t.value_range, (2.0, 4.0));
        assert_eq!(t.entries[2], (1, 0, 0.0));
        assert!(parse("0,0,2\n", &IngestOptions::default()).is_err());
    }

    #[test]
    fn emit_then_ingest_round_trips() {
        let source = IngestOptions {
            index_base: 1,
            value_range: Some((1.0, 5.0)),
            ..Default::default()
        };
        let text = "1,1,1\n1,3,2.5\n2,2,4\n3,1,3.7\n4,4,5\n";
        let t = parse(text, &source).unwrap();
        for delimiter in [Delimiter::Comma, Delimiter::Tab, Delimiter::Whitespace] {
            for base in [0, 1] {
                let mut buf = Vec::new();
                emit_triples(&t, &mut buf, delimiter, base).unwrap();
                let back = parse_triples(
                    buf.as_slice(),
                    &IngestOptions {
                        delimiter,
                        index_base: base,
                        value_range: None,
                        rescale: false,
                        rows: Some(t.rows),
                        cols: Some(t.cols),
                    },
                )
                .unwrap();
                assert_eq!(back.entries, t.entries);
                assert_eq!((back.rows, back.cols), (t.rows, t.cols));
            }
        }
    }

    #[test]
    fn raw_values_are_kept() {
        let opts = IngestOptions {
            rescale: false,
            ..Default::default()
        };
        let t = parse("0,0,2.5\n1,1,-3\n", &opts).unwrap();
        assert_eq!(t.entries, vec![(0, 0, 2.5), (1, 1, -3.0)]);
        assert_eq!(t.value_range, (-3.0, 2.5));
        // the identity range is exact too
        let unit = IngestOptions {
            value_range: Some((-1.0, 1.0)),
            ..Default::default()
        };
        assert_eq!(parse("0,0,0.1\n", &unit).unwrap().entries, vec![(0, 0, 0.1)]);
    }

    #[test]
    fn observations_from_triples() {
        let t = parse("1,0,1\n0,1,-1\n", &IngestOptions::default()).unwrap();
        let obs = t.to_observations().unwrap();
        assert_eq!(obs.edges(), &[(0, 1), (1, 0)]);
        assert_eq!(obs.values(), &[-1.0, 1.0]);
    }
}
