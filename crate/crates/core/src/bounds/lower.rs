use std::collections::HashMap;

use serde::Serialize;

use super::BoundInputs;
use crate::error::{Error, Result};
use crate::model::FactorDistribution;

const MAX_ENUMERATION: f64 = 1e8;

/// `P{Poisson(lambda) < k}`.
pub fn poisson_cdf_below(lambda: f64, k: usize) -> f64 {
    let mut term = (-lambda).exp();
    let mut sum = 0.0;
    for j in 0..k {
        sum += term;
        term *= lambda / (j + 1) as f64;
    }
    sum.min(1.0)
}

/// Which residual the MMSE constant averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MmseForm {
    /// `E |u0.(v0 - v')|^2`.
    #[default]
    Squared,
    /// `E u0.(v0 - v')`, which vanishes for any unbiased estimate.
    Literal,
}

/// Vectors of `support^r` with their product weights.
fn vectors(d: &FactorDistribution, r: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    let atoms = d
        .atoms()
        .ok_or_else(|| Error::Unsupported("the MMSE constant needs discrete factor laws".into()))?;
    let mut out = vec![(Vec::with_capacity(r), 1.0)];
    for _ in 0..r {
        let mut next = Vec::with_capacity(out.len() * atoms.len());
        for (v, w) in &out {
            for &(x, p) in &atoms {
                let mut v2 = v.clone();
                v2.push(x);
                next.push((v2, w * p));
            }
        }
        out = next;
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Residual of estimating a target vector (law `target`) from its products
/// with `r - 1` known neighbours (law `neighbour`), measured against a fresh
/// partner of law `partner`.
fn residual(
    r: usize,
    neighbour: &FactorDistribution,
    target: &FactorDistribution,
    partner: &FactorDistribution,
    form: MmseForm,
) -> Result<f64> {
    let nb = vectors(neighbour, r)?;
    let tg = vectors(target, r)?;
    let known = r - 1;
    let configs = (nb.len() as f64).powi(known as i32) * tg.len() as f64;
    if configs > MAX_ENUMERATION {
        return Err(Error::Unsupported(format!(
            "MMSE enumeration over {configs:.0} configurations exceeds the limit"
        )));
    }
    let (mu, var) = (partner.mean(), partner.variance());
    // E[(u0.w)^2] = var |w|^2 + mu^2 (sum w)^2 for u0 with iid entries
    let quad = |w: &[f64]| {
        let s: f64 = w.iter().sum();
        var * dot(w, w) + mu * mu * s * s
    };

    let mut total = 0.0;
    let mut idx = vec![0usize; known];
    loop {
        let weight: f64 = idx.iter().map(|&k| nb[k].1).product();
        // group targets by the products they would reveal
        let mut groups: HashMap<Vec<i64>, (f64, Vec<f64>, f64)> = HashMap::new();
        for (v, w) in &tg {
            let key: Vec<i64> = idx.iter().map(|&k| (dot(&nb[k].0, v) * 1e9).round() as i64).collect();
            let g = groups.entry(key).or_insert_with(|| (0.0, vec![0.0; r], 0.0));
            g.0 += w;
            for (acc, x) in g.1.iter_mut().zip(v) {
                *acc += w * x;
            }
            g.2 += w * quad(v);
        }
        for (_, (w, sum, second)) in groups {
            let mean: Vec<f64> = sum.iter().map(|s| s / w).collect();
            total += weight
                * match form {
                    // sum_v w (v - m)' S (v - m) = sum_v w v'Sv - W m'Sm
                    MmseForm::Squared => second - w * quad(&mean),
                    // E[u0] . sum_v w (v - m)
                    MmseForm::Literal => mu * (sum.iter().sum::<f64>() - w * mean.iter().sum::<f64>()),
                };
        }
        // advance the neighbour odometer
        let mut k = 0;
        while k < known {
            idx[k] += 1;
            if idx[k] < nb.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == known {
            break;
        }
    }
    Ok(match form {
        MmseForm::Squared => total.max(0.0),
        MmseForm::Literal => total,
    })
}

/// `min` of the two residual terms: column vector estimated from `r - 1`
/// known rows, and row vector estimated from `r - 1` known columns.
pub fn mmse_constant(r: usize, p0: &FactorDistribution, q0: &FactorDistribution, form: MmseForm) -> Result<f64> {
    if r == 0 {
        return Err(Error::Config("rank must be positive".into()));
    }
    let col = residual(r, p0, q0, p0, form)?;
    let row = residual(r, q0, p0, q0, form)?;
    Ok(col.min(row))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBound {
    pub value: f64,
    /// `P{row degree < r}`.
    pub xi: f64,
    /// `P{column degree < r}`.
    pub zeta: f64,
    pub c_tilde: f64,
}

/// `sqrt((1 - (1 - xi)(1 - zeta)) c_tilde)` with Poisson degree laws of
/// means `epsilon` (rows) and `epsilon / alpha` (columns).
pub fn lower_bound(inputs: &BoundInputs, form: MmseForm) -> Result<LowerBound> {
    inputs.validate()?;
    let c_tilde = mmse_constant(inputs.r, &inputs.p0, &inputs.q0, form)?;
    Ok(lower_bound_with(inputs, c_tilde))
}

pub(crate) fn lower_bound_with(inputs: &BoundInputs, c_tilde: f64) -> LowerBound {
    let xi = poisson_cdf_below(inputs.epsilon, inputs.r);
    let zeta = poisson_cdf_below(inputs.epsilon / inputs.alpha, inputs.r);
    let frac = 1.0 - (1.0 - xi) * (1.0 - zeta);
    LowerBound {
        value: (frac * c_tilde).max(0.0).sqrt(),
        xi,
        zeta,
        c_tilde,
    }
}

/// The coarser `c_tilde e^-epsilon`.
pub fn lower_bound_coarse(inputs: &BoundInputs, form: MmseForm) -> Result<f64> {
    inputs.validate()?;
    Ok(mmse_constant(inputs.r, &inputs.p0, &inputs.q0, form)? * (-inputs.epsilon).exp())
}
