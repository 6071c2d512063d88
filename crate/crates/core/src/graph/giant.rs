//! Relative size of the giant component of the random bipartite graph.
//!
//! A row has on average `eps` incident observations and a column `eps / alpha`.
//! A vertex joins the giant component when one of its neighbours does, which
//! gives the coupled system
//!
//! ```text
//! xi   = 1 - exp(-eps * zeta)
//! zeta = 1 - exp(-(eps / alpha) * xi)
//! ```
//!
//! with `xi` the fraction of rows and `zeta` the fraction of columns. A positive
//! solution exists iff `eps^2 / alpha > 1`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Below the threshold; `(0, 0)` is the only solution.
    Subcritical,
    FixedPoint,
    Bisection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GiantComponentSolution {
    pub xi: f64,
    pub zeta: f64,
    pub iterations: usize,
    /// `|xi - F(zeta)| + |zeta - G(xi)|` at the returned point.
    pub residual: f64,
    pub method: SolveMethod,
}

const MAX_ITERATIONS: usize = 1_000_000;

struct Degrees {
    row: f64,
    col: f64,
}

impl Degrees {
    fn new(epsilon: f64, alpha: f64, tol: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be nonnegative, got {epsilon}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be positive, got {alpha}")));
        }
        if !(tol > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Degrees {
            row: epsilon,
            col: epsilon / alpha,
        })
    }

    fn subcritical(&self) -> bool {
        self.row * self.col <= 1.0
    }

    fn row_update(&self, zeta: f64) -> f64 {
        -(-self.row * zeta).exp_m1()
    }

    fn col_update(&self, xi: f64) -> f64 {
        -(-self.col * xi).exp_m1()
    }

    fn residual(&self, xi: f64, zeta: f64) -> f64 {
        (xi - self.row_update(zeta)).abs() + (zeta - self.col_update(xi)).abs()
    }

    fn solution(&self, xi: f64, zeta: f64, iterations: usize, method: SolveMethod) -> GiantComponentSolution {
        GiantComponentSolution {
            xi,
            zeta,
            iterations,
            residual: self.residual(xi, zeta),
            method,
        }
    }

    fn zero(&self) -> GiantComponentSolution {
        self.solution(0.0, 0.0, 0, SolveMethod::Subcritical)
    }
}

/// Largest solution of the coupled system, by iteration from `(1, 1)`.
///
/// The map is increasing and concave, so the iterates decrease monotonically
/// onto the top fixed point. Iteration stops once the a-posteriori error
/// estimate `step * L / (1 - L)` (with `L` the observed contraction ratio)
/// drops below `tol`; if that does not happen within the iteration cap the
/// scalar bisection takes over.
pub fn giant_component_fixed_point(epsilon: f64, alpha: f64, tol: f64) -> Result<GiantComponentSolution> {
    let deg = Degrees::new(epsilon, alpha, tol)?;
    if deg.subcritical() {
        return Ok(deg.zero());
    }
    let (mut xi, mut zeta) = (1.0_f64, 1.0_f64);
    let mut last_step = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        let nxi = deg.row_update(zeta);
        let nzeta = deg.col_update(nxi);
        let step = (nxi - xi).abs().max((nzeta - zeta).abs());
        xi = nxi;
        zeta = nzeta;
        if step == 0.0 {
            return Ok(deg.solution(xi, zeta, it, SolveMethod::FixedPoint));
        }
        let ratio = step / last_step;
        if last_step.is_finite() && ratio < 1.0 && step * ratio / (1.0 - ratio) <= tol {
            return Ok(deg.solution(xi, zeta, it, SolveMethod::FixedPoint));
        }
        last_step = step;
    }
    let mut sol = giant_component_bisection(epsilon, alpha, tol)?;
    sol.iterations += MAX_ITERATIONS;
    Ok(sol)
}

/// Largest solution by bisection on the scalar equation
/// `xi = F(G(xi))`, independent of the fixed-point iteration.
pub fn giant_component_bisection(epsilon: f64, alpha: f64, tol: f64) -> Result<GiantComponentSolution> {
    let deg = Degrees::new(epsilon, alpha, tol)?;
    if deg.subcritical() {
        return Ok(deg.zero());
    }
    // h is convex with h(0) = 0, h'(0) < 0 and h(1) > 0: one positive root,
    // negative below it.
    let h = |x: f64| x - deg.row_update(deg.col_update(x));
    let mut lo = 0.5;
    let mut halvings = 0;
    while h(lo) >= 0.0 {
        lo *= 0.5;
        halvings += 1;
        if lo < f64::MIN_POSITIVE {
            return Err(Error::Numerical {
                message: format!("no sign change found below the root at eps={epsilon}, alpha={alpha}"),
                residual: h(lo).abs(),
            });
        }
    }
    let mut hi = 1.0;
    let mut iterations = halvings;
    while hi - lo > tol * 1e-3 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let xi = 0.5 * (lo + hi);
    let zeta = deg.col_update(xi);
    let sol = deg.solution(xi, zeta, iterations, SolveMethod::Bisection);
    if hi - lo > tol {
        return Err(Error::Numerical {
            message: format!("bisection bracket stalled at width {:e}", hi - lo),
            residual: sol.residual,
        });
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subcritical_is_zero() {
        let s = giant_component_fixed_point(0.9, 1.0, 1e-12).unwrap();
        assert_eq!((s.xi, s.zeta), (0.0, 0.0));
        assert_eq!(s.method, SolveMethod::Subcritical);
        let s = giant_component_fixed_point(1.0, 1.0, 1e-12).unwrap();
        assert_eq!(s.xi, 0.0);
    }

    #[test]
    fn large_epsilon_saturates() {
        let s = giant_component_fixed_point(50.0, 1.0, 1e-14).unwrap();
        assert!((1.0 - s.xi) < 1e-10 && (1.0 - s.zeta) < 1e-10);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(giant_component_fixed_point(-1.0, 1.0, 1e-9).is_err());
        assert!(giant_component_fixed_point(2.0, 0.0, 1e-9).is_err());
        assert!(giant_component_fixed_point(2.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn near_threshold_still_converges() {
        let s = giant_component_fixed_point(1.001, 1.0, 1e-12).unwrap();
        let b = giant_component_bisection(1.001, 1.0, 1e-13).unwrap();
        assert!(s.xi > 0.0);
        assert!((s.xi - b.xi).abs() < 1e-10, "{s:?} {b:?}");
        assert!(s.iterations > 100);
    }
}
