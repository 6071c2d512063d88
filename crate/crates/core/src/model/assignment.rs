use super::alphabet::DiscreteAlphabet;
use super::instance::{dot, GroundTruthInstance};
use crate::error::{Error, Result};

/// Candidate factors `{u_i}`, `{v_a}`; the object every solver mutates.
///
/// Same layout as [`GroundTruthInstance`]: `u` is `n` rows of length `r`,
/// `v` is `m` columns of length `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorAssignment {
    n: usize,
    m: usize,
    r: usize,
    u: Vec<f64>,
    v: Vec<f64>,
    alphabet: Option<DiscreteAlphabet>,
}

impl FactorAssignment {
    /// Bounded factors: every entry must lie in `[-1, 1]`.
    pub fn new(n: usize, m: usize, r: usize, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let a = Self::unconstrained(n, m, r, u, v)?;
        if !a.is_bounded() {
            return Err(Error::Config("factor entries must lie in [-1, 1]".into()));
        }
        Ok(a)
    }

    /// Real-valued factors with no range constraint (ridge solutions).
    pub fn unconstrained(n: usize, m: usize, r: usize, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if r == 0 {
            return Err(Error::Config("rank must be at least 1".into()));
        }
        if u.len() != n * r || v.len() != m * r {
            return Err(Error::Usage(format!(
                "factor lengths {} and {} do not match {n}x{r} and {m}x{r}",
                u.len(),
                v.len()
            )));
        }
        Ok(FactorAssignment {
            n,
            m,
            r,
            u,
            v,
            alphabet: None,
        })
    }

    /// Factors constrained to `alphabet`; every component must be a point of it.
    pub fn with_alphabet(
        n: usize,
        m: usize,
        r: usize,
        u: Vec<f64>,
        v: Vec<f64>,
        alphabet: DiscreteAlphabet,
    ) -> Result<Self> {
        let mut a = Self::new(n, m, r, u, v)?;
        if a.u.iter().chain(&a.v).any(|x| !alphabet.contains(*x)) {
            return Err(Error::Config("factor entry outside the alphabet".into()));
        }
        a.alphabet = Some(alphabet);
        Ok(a)
    }

    pub fn zeros(n: usize, m: usize, r: usize) -> Self {
        FactorAssignment {
            n,
            m,
            r,
            u: vec![0.0; n * r],
            v: vec![0.0; m * r],
            alphabet: None,
        }
    }

    pub fn from_truth(truth: &GroundTruthInstance) -> Self {
        FactorAssignment {
            n: truth.rows(),
            m: truth.cols(),
            r: truth.rank(),
            u: truth.row_factors().to_vec(),
            v: truth.col_factors().to_vec(),
            alphabet: None,
        }
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.m
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn alphabet(&self) -> Option<&DiscreteAlphabet> {
        self.alphabet.as_ref()
    }

    pub fn row_factors(&self) -> &[f64] {
        &self.u
    }

    pub fn col_factors(&self) -> &[f64] {
        &self.v
    }

    pub(crate) fn factors_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.u, &mut self.v)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.u[i * self.r..(i + 1) * self.r]
    }

    pub fn col(&self, a: usize) -> &[f64] {
        &self.v[a * self.r..(a + 1) * self.r]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.u[i * self.r..(i + 1) * self.r]
    }

    pub fn col_mut(&mut self, a: usize) -> &mut [f64] {
        &mut self.v[a * self.r..(a + 1) * self.r]
    }

    #[inline]
    pub fn entry(&self, i: usize, a: usize) -> f64 {
        dot(self.row(i), self.col(a))
    }

    pub fn is_bounded(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.abs() <= 1.0)
    }

    /// Round every component to the nearest point of the uniform grid with
    /// spacing `delta` (half away from zero).
    ///
    /// For bounded factors each product entry moves by at most `r * delta`.
    pub fn quantize(&self, delta: f64) -> Result<FactorAssignment> {
        let grid = DiscreteAlphabet::with_step(delta)?;
        let q = |x: &f64| grid.nearest(*x);
        Ok(FactorAssignment {
            n: self.n,
            m: self.m,
            r: self.r,
            u: self.u.iter().map(q).collect(),
            v: self.v.iter().map(q).collect(),
            alphabet: Some(grid),
        })
    }
}
