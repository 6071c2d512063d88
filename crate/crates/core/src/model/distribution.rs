use rand::Rng;

use super::alphabet::DiscreteAlphabet;
use crate::error::{Error, Result};

/// Law of a single factor entry.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorDistribution {
    Discrete {
        alphabet: DiscreteAlphabet,
        weights: Vec<f64>,
    },
    /// Uniform density on `[-1, 1]`.
    UniformInterval,
}

impl FactorDistribution {
    pub fn discrete(alphabet: DiscreteAlphabet, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != alphabet.len() {
            return Err(Error::Config(format!(
                "{} weights for an alphabet of {} points",
                weights.len(),
                alphabet.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Config("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("weights sum to {total}, not 1")));
        }
        Ok(FactorDistribution::Discrete { alphabet, weights })
    }

    pub fn uniform_over(alphabet: DiscreteAlphabet) -> Self {
        let w = 1.0 / alphabet.len() as f64;
        let weights = vec![w; alphabet.len()];
        FactorDistribution::Discrete { alphabet, weights }
    }

    /// Uniform on `{-1, +1}`.
    pub fn signs() -> Self {
        Self::uniform_over(DiscreteAlphabet::signs())
    }

    /// Uniform on `{-1, 0, +1}`.
    pub fn ternary() -> Self {
        Self::uniform_over(DiscreteAlphabet::ternary())
    }

    pub fn uniform_interval() -> Self {
        FactorDistribution::UniformInterval
    }

    pub fn support(&self) -> Option<&DiscreteAlphabet> {
        match self {
            FactorDistribution::Discrete { alphabet, .. } => Some(alphabet),
            FactorDistribution::UniformInterval => None,
        }
    }

    pub fn weights(&self) -> Option<&[f64]> {
        match self {
            FactorDistribution::Discrete { weights, .. } => Some(weights),
            FactorDistribution::UniformInterval => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            FactorDistribution::UniformInterval => 2.0 * rng.gen::<f64>() - 1.0,
            FactorDistribution::Discrete { alphabet, weights } => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (p, w) in alphabet.points().iter().zip(weights) {
                    acc += w;
                    if u < acc {
                        return *p;
                    }
                }
                // rounding slack in the cumulative sum: last point with mass
                let last = weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
                alphabet.points()[last]
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            FactorDistribution::UniformInterval => 0.0,
            FactorDistribution::Discrete { alphabet, weights } => {
                alphabet.points().iter().zip(weights).map(|(p, w)| p * w).sum()
            }
        }
    }

    pub fn second_moment(&self) -> f64 {
        match self {
            FactorDistribution::UniformInterval => 1.0 / 3.0,
            FactorDistribution::Discrete { alphabet, weights } => {
                alphabet.points().iter().zip(weights).map(|(p, w)| p * p * w).sum()
            }
        }
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.second_moment() - m * m
    }

    /// Whether the law is invariant under `x -> -x`.
    pub fn is_symmetric(&self) -> bool {
        match self {
            FactorDistribution::UniformInterval => true,
            FactorDistribution::Discrete { alphabet, weights } => {
                let pts = alphabet.points();
                (0..pts.len()).all(|k| {
                    match alphabet.index_of(-pts[k]) {
                        Some(j) => (weights[k] - weights[j]).abs() <= 1e-12,
                        None => weights[k] == 0.0,
                    }
                })
            }
        }
    }

    pub fn has_mass_at_zero(&self) -> bool {
        match self {
            FactorDistribution::UniformInterval => false,
            FactorDistribution::Discrete { alphabet, weights } => alphabet
                .index_of(0.0)
                .map(|k| weights[k] > 0.0)
                .unwrap_or(false),
        }
    }

    /// Support points with positive mass and their weights.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            FactorDistribution::UniformInterval => None,
            FactorDistribution::Discrete { alphabet, weights } => Some(
                alphabet
                    .points()
                    .iter()
                    .zip(weights)
                    .filter(|(_, w)| **w > 0.0)
                    .map(|(p, w)| (*p, *w))
                    .collect(),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{KeyedStream, Role};

    #[test]
    fn weights_must_sum_to_one() {
        let a = DiscreteAlphabet::ternary();
        assert!(FactorDistribution::discrete(a.clone(), vec![0.5, 0.5, 0.1]).is_err());
        assert!(FactorDistribution::discrete(a.clone(), vec![0.5, 0.5]).is_err());
        assert!(FactorDistribution::discrete(a.clone(), vec![-0.1, 0.6, 0.5]).is_err());
        assert!(FactorDistribution::discrete(a, vec![0.25, 0.5, 0.25]).is_ok());
    }

    #[test]
    fn moments() {
        assert_eq!(FactorDistribution::signs().second_moment(), 1.0);
        assert!((FactorDistribution::ternary().second_moment() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(FactorDistribution::uniform_interval().mean(), 0.0);
        assert!(FactorDistribution::signs().is_symmetric());
        let skew =
            FactorDistribution::discrete(DiscreteAlphabet::signs(), vec![0.3, 0.7]).unwrap();
        assert!(!skew.is_symmetric());
        assert!((skew.mean() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn sampling_frequencies() {
        let d = FactorDistribution::discrete(DiscreteAlphabet::ternary(), vec![0.2, 0.3, 0.5])
            .unwrap();
        let mut rng = KeyedStream::new(3, Role::Values, 0);
        let mut counts = [0usize; 3];
        for _ in 0..100_000 {
            let x = d.sample(&mut rng);
            counts[(x + 1.0) as usize] += 1;
        }
        for (c, w) in counts.iter().zip([0.2_f64, 0.3, 0.5]) {
            let sigma = (1e5 * w * (1.0 - w)).sqrt();
            assert!((*c as f64 - 1e5 * w).abs() < 4.0 * sigma);
        }
    }
}
