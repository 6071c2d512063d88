//! Distortion bounds for random rank-`r` matrices observed on `epsilon n`
//! random entries.
//!
//! `eps_tilde = epsilon / ((1 + alpha) r)` is the number of observations per
//! degree of freedom. All logarithms are natural.

mod coupling;
mod lower;
mod tight;

pub use coupling::{entropy, CouplingPair, CouplingSpace};
pub use lower::{lower_bound, lower_bound_coarse, mmse_constant, poisson_cdf_below, LowerBound, MmseForm};
pub use tight::{tight_upper_bound, TightBound, TightOptions};
pub(crate) use lower::lower_bound_with;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DiscreteAlphabet, FactorDistribution};

/// Below this `eps_tilde` the closed-form Theorem 1 chain does not close.
pub const THEOREM1_MIN_EPS_TILDE: f64 = 1.5;

#[derive(Debug, Clone)]
pub struct BoundInputs {
    pub r: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub delta_tol: f64,
    /// Alphabet of the estimate's factors; defaults to the union of the
    /// supports of `p0` and `q0`.
    pub alphabet: Option<DiscreteAlphabet>,
    pub p0: FactorDistribution,
    pub q0: FactorDistribution,
}

impl BoundInputs {
    pub fn new(r: usize, epsilon: f64, alpha: f64, delta_tol: f64, p0: FactorDistribution, q0: FactorDistribution) -> Self {
        BoundInputs {
            r,
            epsilon,
            alpha,
            delta_tol,
            alphabet: None,
            p0,
            q0,
        }
    }

    /// Both factors uniform on the `n`-point grid of `[-1, 1]`.
    pub fn uniform_grid(r: usize, n: usize, epsilon: f64, alpha: f64, delta_tol: f64) -> Result<Self> {
        let p = FactorDistribution::uniform_over(DiscreteAlphabet::uniform(n)?);
        Ok(Self::new(r, epsilon, alpha, delta_tol, p.clone(), p))
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::Config("rank must be positive".into()));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be finite and non-negative, got {}", self.epsilon)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.delta_tol >= 0.0 && self.delta_tol.is_finite()) {
            return Err(Error::Config(format!("delta must be finite and non-negative, got {}", self.delta_tol)));
        }
        Ok(())
    }

    pub fn eps_tilde(&self) -> f64 {
        eps_tilde(self.epsilon, self.alpha, self.r)
    }

    pub fn estimate_alphabet(&self) -> Result<DiscreteAlphabet> {
        if let Some(a) = &self.alphabet {
            return Ok(a.clone());
        }
        match (self.p0.support(), self.q0.support()) {
            (Some(a), Some(b)) => {
                let mut pts: Vec<f64> = a.points().iter().chain(b.points()).copied().collect();
                pts.sort_by(f64::total_cmp);
                pts.dedup();
                DiscreteAlphabet::new(pts)
            }
            _ => Err(Error::Unsupported(
                "continuous factor laws need an explicit estimate alphabet".into(),
            )),
        }
    }
}

pub fn eps_tilde(epsilon: f64, alpha: f64, r: usize) -> f64 {
    epsilon / ((1.0 + alpha) * r as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    /// The closed form did not apply and `value` is the trivial `2r + delta`.
    pub trivial: bool,
    /// Largest possible RMSE for factors in `[-1, 1]`: `2r + delta`.
    pub ceiling: f64,
}

impl BoundValue {
    pub fn clamped(&self) -> f64 {
        self.value.min(self.ceiling)
    }

    /// Whether the bound says anything beyond the trivial ceiling.
    pub fn is_informative(&self) -> bool {
        !self.trivial && self.value < self.ceiling
    }
}

/// `delta + 2r ln(10 eps_tilde) / sqrt(eps_tilde)`, or the trivial bound
/// `2r + delta` when `eps_tilde <= 1.5`.
pub fn theorem1_bound(inputs: &BoundInputs) -> Result<BoundValue> {
    inputs.validate()?;
    let r = inputs.r as f64;
    let et = inputs.eps_tilde();
    let ceiling = 2.0 * r + inputs.delta_tol;
    if et <= THEOREM1_MIN_EPS_TILDE {
        return Ok(BoundValue {
            value: ceiling,
            trivial: true,
            ceiling,
        });
    }
    Ok(BoundValue {
        value: inputs.delta_tol + 2.0 * r * (10.0 * et).ln() / et.sqrt(),
        trivial: false,
        ceiling,
    })
}

/// `max_{p in D(p0)} H(p) - H(p0)`: the conditional law of the estimate
/// vector can be uniform over all of `alphabet^r`.
pub fn max_entropy_gap(alphabet: &DiscreteAlphabet, r: usize) -> f64 {
    r as f64 * (alphabet.len() as f64).ln()
}

/// Largest possible `|u.v - u0.v0|` with `u, v` over `alphabet^r` and
/// `u0, v0` over the supports of `p0`, `q0`.
pub fn max_entry_gap(alphabet: &DiscreteAlphabet, p0: &FactorDistribution, q0: &FactorDistribution, r: usize) -> Result<f64> {
    let range = |a: &[f64], b: &[f64]| {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in a {
            for y in b {
                lo = lo.min(x * y);
                hi = hi.max(x * y);
            }
        }
        (r as f64 * lo, r as f64 * hi)
    };
    let support = |d: &FactorDistribution| -> Result<Vec<f64>> {
        d.atoms()
            .map(|a| a.into_iter().map(|(x, _)| x).collect())
            .ok_or_else(|| Error::Unsupported("continuous factor law".into()))
    };
    let (ps, qs) = (support(p0)?, support(q0)?);
    let (lo_hat, hi_hat) = range(alphabet.points(), alphabet.points());
    let (lo0, hi0) = range(&ps, &qs);
    Ok((hi_hat - lo0).max(hi0 - lo_hat))
}

/// `sqrt(dbar^2 - (dbar^2 - delta^2) exp(-(hbar_p + alpha hbar_q) / epsilon))`.
pub fn simplified_upper_bound(hbar_p: f64, hbar_q: f64, dbar: f64, inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let delta = inputs.delta_tol;
    if !(hbar_p >= 0.0 && hbar_q >= 0.0) {
        return Err(Error::Config("entropy gaps must be non-negative".into()));
    }
    if delta > dbar {
        return Err(Error::Config(format!("delta {delta} exceeds the largest entry gap {dbar}")));
    }
    let h = hbar_p + inputs.alpha * hbar_q;
    let decay = if h == 0.0 { 1.0 } else { (-h / inputs.epsilon).exp() };
    let d2 = dbar * dbar;
    Ok((d2 - (d2 - delta * delta) * decay).max(0.0).sqrt())
}

/// [`simplified_upper_bound`] with the entropy gaps and `dbar` of the inputs'
/// discrete laws.
pub fn simplified_upper_bound_for(inputs: &BoundInputs) -> Result<f64> {
    let a = inputs.estimate_alphabet()?;
    let h = max_entropy_gap(&a, inputs.r);
    let dbar = max_entry_gap(&a, &inputs.p0, &inputs.q0, inputs.r)?;
    simplified_upper_bound(h, h, dbar, inputs)
}

/// `sqrt(delta^2 + (4 r^2 - delta^2)(1 - exp(-ln N / eps_tilde)))`.
pub fn discrete_alphabet_bound(r: usize, n: usize, eps_tilde: f64, delta_tol: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Config("alphabet size must be positive".into()));
    }
    if !(eps_tilde > 0.0) {
        return Err(Error::Config(format!("eps_tilde must be positive, got {eps_tilde}")));
    }
    let four_r2 = 4.0 * (r * r) as f64;
    let d2 = delta_tol * delta_tol;
    let spread = -(-(n as f64).ln() / eps_tilde).exp_m1();
    Ok((d2 + (four_r2 - d2) * spread).max(0.0).sqrt())
}

/// Bound for factors in `[-1, 1]` through the grid of spacing `delta_step`:
/// the discrete bound at tolerance `delta + 2 r delta_step`, plus `2 r delta_step`.
pub fn continuous_bound(r: usize, eps_tilde: f64, delta_tol: f64, delta_step: f64) -> Result<f64> {
    if !(delta_step > 0.0 && delta_step <= 2.0) {
        return Err(Error::Config(format!("grid step must lie in (0, 2], got {delta_step}")));
    }
    let n = (2.0 / delta_step).round() as usize + 1;
    let err = 2.0 * r as f64 * delta_step;
    Ok(discrete_alphabet_bound(r, n, eps_tilde, delta_tol + err)? + err)
}

/// Grid size `ceil(4 sqrt(eps_tilde)) + 1` used to close Theorem 1.
pub fn theorem1_grid_size(eps_tilde: f64) -> usize {
    (4.0 * eps_tilde.sqrt()).ceil() as usize + 1
}

/// [`continuous_bound`] at the grid of [`theorem1_grid_size`].
pub fn continuous_bound_preset(r: usize, eps_tilde: f64, delta_tol: f64) -> Result<f64> {
    let n = theorem1_grid_size(eps_tilde);
    continuous_bound(r, eps_tilde, delta_tol, 2.0 / (n - 1) as f64)
}
