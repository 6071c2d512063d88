use crate::error::{Error, Result};

/// A finite, strictly increasing set of factor values inside `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteAlphabet {
    points: Vec<f64>,
    step: Option<f64>,
}

impl DiscreteAlphabet {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config("alphabet must contain at least one point".into()));
        }
        if points.iter().any(|p| !p.is_finite() || p.abs() > 1.0) {
            return Err(Error::Config("alphabet points must lie in [-1, 1]".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("alphabet points must be strictly increasing".into()));
        }
        Ok(DiscreteAlphabet { points, step: None })
    }

    /// The uniform grid `{-1, -1+δ, ..., 1}` with `size` points, `δ = 2/(size-1)`.
    ///
    /// Points are computed as `(2k - (N-1)) / (N-1)` so the grid is exactly
    /// symmetric and contains `0` whenever `N` is odd. A single point alphabet
    /// is `{0}`.
    pub fn uniform(size: usize) -> Result<Self> {
        match size {
            0 => Err(Error::Config("alphabet size must be positive".into())),
            1 => Ok(DiscreteAlphabet {
                points: vec![0.0],
                step: None,
            }),
            _ => {
                let d = (size - 1) as f64;
                let points = (0..size).map(|k| (2.0 * k as f64 - d) / d).collect();
                Ok(DiscreteAlphabet {
                    points,
                    step: Some(2.0 / d),
                })
            }
        }
    }

    /// Grid with spacing at most `delta`: `N = 2/δ + 1` when `2/δ` is an
    /// integer, otherwise the next finer grid.
    pub fn with_step(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 2.0) {
            return Err(Error::Config(format!("quantization step {delta} outside (0, 2]")));
        }
        let cells = 2.0 / delta;
        let cells = if (cells - cells.round()).abs() < 1e-9 {
            cells.round()
        } else {
            cells.ceil()
        };
        Self::uniform(cells as usize + 1)
    }

    /// `{-1, +1}`
    pub fn signs() -> Self {
        Self::uniform(2).expect("static alphabet")
    }

    /// `{-1, 0, +1}`
    pub fn ternary() -> Self {
        Self::uniform(3).expect("static alphabet")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn step(&self) -> Option<f64> {
        self.step
    }

    pub fn index_of(&self, x: f64) -> Option<usize> {
        self.points.iter().position(|&p| p == x)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.index_of(x).is_some()
    }

    /// Index of the nearest point; exact ties go to the point of larger
    /// magnitude (round half away from zero).
    pub fn nearest_index(&self, x: f64) -> usize {
        let pts = &self.points;
        let hi = pts.partition_point(|&p| p < x);
        if hi == 0 {
            return 0;
        }
        if hi == pts.len() {
            return pts.len() - 1;
        }
        let lo = hi - 1;
        let dl = x - pts[lo];
        let dh = pts[hi] - x;
        if (dl - dh).abs() <= 1e-12 * (1.0 + x.abs()) {
            if pts[hi].abs() >= pts[lo].abs() {
                hi
            } else {
                lo
            }
        } else if dl < dh {
            lo
        } else {
            hi
        }
    }

    pub fn nearest(&self, x: f64) -> f64 {
        self.points[self.nearest_index(x)]
    }

    pub fn max_abs(&self) -> f64 {
        self.points.iter().fold(0.0_f64, |m, p| m.max(p.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_matches_step() {
        let a = DiscreteAlphabet::uniform(5).unwrap();
        assert_eq!(a.points(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(a.step(), Some(0.5));
        let b = DiscreteAlphabet::with_step(0.1).unwrap();
        assert_eq!(b.len(), 21);
        assert_eq!(b.points()[10], 0.0);
        // 2/0.3 is not an integer: the grid is refined, never coarsened
        let c = DiscreteAlphabet::with_step(0.3).unwrap();
        assert!(c.step().unwrap() <= 0.3);
    }

    #[test]
    fn rejects_bad_points() {
        assert!(DiscreteAlphabet::new(vec![0.0, 0.0]).is_err());
        assert!(DiscreteAlphabet::new(vec![-1.5, 0.0]).is_err());
        assert!(DiscreteAlphabet::new(vec![]).is_err());
        assert!(DiscreteAlphabet::with_step(0.0).is_err());
        assert!(DiscreteAlphabet::with_step(2.5).is_err());
    }

    #[test]
    fn ties_round_away_from_zero() {
        let a = DiscreteAlphabet::uniform(5).unwrap();
        assert_eq!(a.nearest(0.25), 0.5);
        assert_eq!(a.nearest(-0.25), -0.5);
        assert_eq!(a.nearest(0.99), 1.0);
        assert_eq!(a.nearest(7.0), 1.0);
        assert_eq!(a.nearest(-0.1), 0.0);
        let even = DiscreteAlphabet::uniform(4).unwrap();
        // 0 is equidistant from -1/3 and 1/3; equal magnitude picks the upper
        assert_eq!(even.nearest(0.0), 1.0 / 3.0);
    }
}
