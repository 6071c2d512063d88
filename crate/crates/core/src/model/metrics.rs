use serde::Serialize;

use super::assignment::FactorAssignment;
use super::instance::GroundTruthInstance;
use crate::error::{Error, Result};
use crate::graph::ObservationSet;

/// Read access to an estimated `n x m` matrix.
pub trait MatrixView {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn get(&self, i: usize, a: usize) -> f64;

    /// `sum_{i,a} (M[i][a] - self[i][a])^2` over the whole grid.
    ///
    /// The default visits every entry; structured estimates override it.
    fn squared_error_sum(&self, truth: &GroundTruthInstance) -> f64 {
        let mut acc = 0.0;
        for i in 0..truth.rows() {
            for a in 0..truth.cols() {
                let d = truth.entry(i, a) - self.get(i, a);
                acc += d * d;
            }
        }
        acc
    }
}

/// A plain row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Usage(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_view(view: &dyn MatrixView) -> Self {
        let mut data = Vec::with_capacity(view.rows() * view.cols());
        for i in 0..view.rows() {
            for a in 0..view.cols() {
                data.push(view.get(i, a));
            }
        }
        DenseMatrix {
            rows: view.rows(),
            cols: view.cols(),
            data,
        }
    }
}

impl MatrixView for DenseMatrix {
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }
    fn get(&self, i: usize, a: usize) -> f64 {
        self.data[i * self.cols + a]
    }
}

impl MatrixView for GroundTruthInstance {
    fn rows(&self) -> usize {
        GroundTruthInstance::rows(self)
    }
    fn cols(&self) -> usize {
        GroundTruthInstance::cols(self)
    }
    fn get(&self, i: usize, a: usize) -> f64 {
        self.entry(i, a)
    }
    fn squared_error_sum(&self, truth: &GroundTruthInstance) -> f64 {
        factored_squared_distance(
            truth.row_factors(),
            truth.col_factors(),
            truth.rank(),
            self.row_factors(),
            self.col_factors(),
            self.rank(),
        )
    }
}

impl MatrixView for FactorAssignment {
    fn rows(&self) -> usize {
        FactorAssignment::rows(self)
    }
    fn cols(&self) -> usize {
        FactorAssignment::cols(self)
    }
    fn get(&self, i: usize, a: usize) -> f64 {
        self.entry(i, a)
    }
    fn squared_error_sum(&self, truth: &GroundTruthInstance) -> f64 {
        factored_squared_distance(
            truth.row_factors(),
            truth.col_factors(),
            truth.rank(),
            self.row_factors(),
            self.col_factors(),
            self.rank(),
        )
    }
}

/// `X^T Y` for row-stacked vectors of widths `rx` and `ry`.
pub(crate) fn cross_gram(x: &[f64], rx: usize, y: &[f64], ry: usize) -> Vec<f64> {
    let mut g = vec![0.0; rx * ry];
    for (xt, yt) in x.chunks_exact(rx).zip(y.chunks_exact(ry)) {
        for k in 0..rx {
            let xk = xt[k];
            for l in 0..ry {
                g[k * ry + l] += xk * yt[l];
            }
        }
    }
    g
}

fn frobenius_inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `||U V^T - W Z^T||_F^2` through `r x r` Gram matrices, `O((n + m) r^2)`.
pub(crate) fn factored_squared_distance(
    u: &[f64],
    v: &[f64],
    r: usize,
    w: &[f64],
    z: &[f64],
    s: usize,
) -> f64 {
    let uu = cross_gram(u, r, u, r);
    let vv = cross_gram(v, r, v, r);
    let uw = cross_gram(u, r, w, s);
    let vz = cross_gram(v, r, z, s);
    let ww = cross_gram(w, s, w, s);
    let zz = cross_gram(z, s, z, s);
    let d = frobenius_inner(&uu, &vv) - 2.0 * frobenius_inner(&uw, &vz) + frobenius_inner(&ww, &zz);
    d.max(0.0)
}

fn check_dims(truth: &GroundTruthInstance, est: &dyn MatrixView) -> Result<()> {
    if (truth.rows(), truth.cols()) != (est.rows(), est.cols()) {
        return Err(Error::Usage(format!(
            "estimate is {}x{}, truth is {}x{}",
            est.rows(),
            est.cols(),
            truth.rows(),
            truth.cols()
        )));
    }
    Ok(())
}

fn check_obs_dims(truth_dims: (usize, usize), obs: &ObservationSet) -> Result<()> {
    if (obs.rows(), obs.cols()) != truth_dims {
        return Err(Error::Usage(format!(
            "observations index a {}x{} grid, expected {}x{}",
            obs.rows(),
            obs.cols(),
            truth_dims.0,
            truth_dims.1
        )));
    }
    Ok(())
}

/// Root mean square error over all `n m` entries.
pub fn rmse(truth: &GroundTruthInstance, estimate: &dyn MatrixView) -> Result<f64> {
    check_dims(truth, estimate)?;
    let nm = (truth.rows() * truth.cols()) as f64;
    Ok((estimate.squared_error_sum(truth) / nm).sqrt())
}

/// RMSE restricted to the observed positions, against the observed values.
pub fn observed_rmse(estimate: &dyn MatrixView, obs: &ObservationSet) -> Result<f64> {
    check_obs_dims((estimate.rows(), estimate.cols()), obs)?;
    if obs.is_empty() {
        return Err(Error::Usage("error over an empty observation set is undefined".into()));
    }
    let s: f64 = obs
        .iter()
        .map(|(i, a, y)| {
            let d = y - estimate.get(i, a);
            d * d
        })
        .sum();
    Ok((s / obs.len() as f64).sqrt())
}

/// `(fit, prediction)`: RMSE over `E`, and over the complement of `E` (or over
/// `holdout` when one is given).
pub fn fit_and_prediction_error(
    truth: &GroundTruthInstance,
    estimate: &dyn MatrixView,
    obs: &ObservationSet,
    holdout: Option<&ObservationSet>,
) -> Result<(f64, f64)> {
    check_dims(truth, estimate)?;
    check_obs_dims((truth.rows(), truth.cols()), obs)?;
    if obs.is_empty() {
        return Err(Error::Usage("fit error is undefined when no entry is revealed".into()));
    }
    let fit_sum: f64 = obs
        .edges()
        .iter()
        .map(|&(i, a)| {
            let d = truth.entry(i, a) - estimate.get(i, a);
            d * d
        })
        .sum();
    let fit = (fit_sum / obs.len() as f64).sqrt();
    let pred = match holdout {
        Some(h) => observed_rmse(estimate, h)?,
        None => {
            let hidden = truth.rows() * truth.cols() - obs.len();
            if hidden == 0 {
                return Err(Error::Usage(
                    "prediction error is undefined when every entry is revealed".into(),
                ));
            }
            let total = estimate.squared_error_sum(truth);
            ((total - fit_sum).max(0.0) / hidden as f64).sqrt()
        }
    };
    Ok((fit, pred))
}

/// Distortion measurements plus solver telemetry.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DistortionReport {
    /// Full-grid RMSE; needs the ground truth.
    pub rmse: Option<f64>,
    /// RMSE over the revealed entries.
    pub fit_error: Option<f64>,
    /// RMSE over the unrevealed entries; needs the ground truth.
    pub prediction_error: Option<f64>,
    /// RMSE over an explicitly withheld subset.
    pub holdout_error: Option<f64>,
    pub steps: u64,
    pub cost_trajectory: Vec<(u64, f64)>,
    pub wall_ms: f64,
}

impl DistortionReport {
    /// Measure whatever the available data allows.
    pub fn evaluate(
        truth: Option<&GroundTruthInstance>,
        estimate: &dyn MatrixView,
        obs: &ObservationSet,
        holdout: Option<&ObservationSet>,
    ) -> Result<Self> {
        let mut report = DistortionReport::default();
        match truth {
            Some(t) => {
                check_dims(t, estimate)?;
                check_obs_dims((t.rows(), t.cols()), obs)?;
                let nm = t.rows() * t.cols();
                let total = estimate.squared_error_sum(t);
                report.rmse = Some((total / nm as f64).sqrt());
                let fit_sum: f64 = obs
                    .edges()
                    .iter()
                    .map(|&(i, a)| (t.entry(i, a) - estimate.get(i, a)).powi(2))
                    .sum();
                if !obs.is_empty() {
                    report.fit_error = Some((fit_sum / obs.len() as f64).sqrt());
                }
                if nm > obs.len() {
                    let hidden = (nm - obs.len()) as f64;
                    report.prediction_error = Some(((total - fit_sum).max(0.0) / hidden).sqrt());
                }
            }
            None => {
                if !obs.is_empty() {
                    report.fit_error = Some(observed_rmse(estimate, obs)?);
                }
            }
        }
        if let Some(h) = holdout.filter(|h| !h.is_empty()) {
            report.holdout_error = Some(observed_rmse(estimate, h)?);
        }
        Ok(report)
    }

    /// Relative gap in `rmse^2 nm = fit^2 |E| + pred^2 (nm - |E|)`, when all
    /// three errors are defined.
    pub fn decomposition_gap(&self, nm: usize, revealed: usize) -> Option<f64> {
        let (r, f, p) = (self.rmse?, self.fit_error?, self.prediction_error?);
        let lhs = r * r * nm as f64;
        let rhs = f * f * revealed as f64 + p * p * (nm - revealed) as f64;
        Some((lhs - rhs).abs() / lhs.max(f64::MIN_POSITIVE))
    }
}
