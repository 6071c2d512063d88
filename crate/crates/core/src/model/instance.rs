use super::distribution::FactorDistribution;
use crate::error::{Error, Result};
use crate::rng::{KeyedStream, Role};

/// `m = round(n * alpha)`, ties to even.
pub fn column_count(n: usize, alpha: f64) -> usize {
    (n as f64 * alpha).round_ties_even() as usize
}

/// A random rank-`r` matrix `M = U V` kept in factored form.
///
/// `u` holds the rows of `U` (`n x r`, row-major) and `v` holds the columns of
/// `V` (`m` vectors of length `r`), so `M[i][a] = u_i . v_a`.
#[derive(Debug, Clone)]
pub struct GroundTruthInstance {
    n: usize,
    m: usize,
    r: usize,
    alpha: f64,
    u: Vec<f64>,
    v: Vec<f64>,
    p0: Option<FactorDistribution>,
    q0: Option<FactorDistribution>,
}

impl GroundTruthInstance {
    /// Draw `U` iid from `p0` and `V` iid from `q0`.
    ///
    /// Row `i` of `U` comes from the stream `(seed, RowFactors, i)` and column
    /// `a` of `V` from `(seed, ColFactors, a)`.
    pub fn generate(
        n: usize,
        alpha: f64,
        r: usize,
        p0: &FactorDistribution,
        q0: &FactorDistribution,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be positive, got {alpha}")));
        }
        if r == 0 {
            return Err(Error::Config("rank must be at least 1".into()));
        }
        let m = column_count(n, alpha);
        if m == 0 {
            return Err(Error::Config(format!("n * alpha rounds to zero columns (n={n}, alpha={alpha})")));
        }
        let mut inst = Self::generate_shape(n, m, r, p0, q0, seed)?;
        inst.alpha = alpha;
        Ok(inst)
    }

    /// As [`Self::generate`] with an explicit column count.
    pub fn generate_shape(
        n: usize,
        m: usize,
        r: usize,
        p0: &FactorDistribution,
        q0: &FactorDistribution,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 || m == 0 || r == 0 {
            return Err(Error::Config("dimensions and rank must be positive".into()));
        }
        let alpha = m as f64 / n as f64;
        let mut u = vec![0.0; n * r];
        for (i, row) in u.chunks_mut(r).enumerate() {
            let mut rng = KeyedStream::new(seed, Role::RowFactors, i as u64);
            row.iter_mut().for_each(|x| *x = p0.sample(&mut rng));
        }
        let mut v = vec![0.0; m * r];
        for (a, col) in v.chunks_mut(r).enumerate() {
            let mut rng = KeyedStream::new(seed, Role::ColFactors, a as u64);
            col.iter_mut().for_each(|x| *x = q0.sample(&mut rng));
        }
        Ok(GroundTruthInstance {
            n,
            m,
            r,
            alpha,
            u,
            v,
            p0: Some(p0.clone()),
            q0: Some(q0.clone()),
        })
    }

    /// Build from explicit factors; entries must lie in `[-1, 1]`.
    pub fn from_factors(n: usize, m: usize, r: usize, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 || r == 0 {
            return Err(Error::Config("dimensions and rank must be positive".into()));
        }
        if u.len() != n * r || v.len() != m * r {
            return Err(Error::Usage(format!(
                "factor lengths {} and {} do not match n*r={} and m*r={}",
                u.len(),
                v.len(),
                n * r,
                m * r
            )));
        }
        if u.iter().chain(&v).any(|x| !(x.abs() <= 1.0)) {
            return Err(Error::Config("factor entries must lie in [-1, 1]".into()));
        }
        Ok(GroundTruthInstance {
            n,
            m,
            r,
            alpha: m as f64 / n as f64,
            u,
            v,
            p0: None,
            q0: None,
        })
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

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn row_factors(&self) -> &[f64] {
        &self.u
    }

    pub fn col_factors(&self) -> &[f64] {
        &self.v
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.u[i * self.r..(i + 1) * self.r]
    }

    pub fn col(&self, a: usize) -> &[f64] {
        &self.v[a * self.r..(a + 1) * self.r]
    }

    pub fn p0(&self) -> Option<&FactorDistribution> {
        self.p0.as_ref()
    }

    pub fn q0(&self) -> Option<&FactorDistribution> {
        self.q0.as_ref()
    }

    #[inline]
    pub fn entry(&self, i: usize, a: usize) -> f64 {
        dot(self.row(i), self.col(a))
    }

    /// Dense row-major copy of `M`; only sensible for small matrices.
    pub fn dense_product(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * self.m);
        for i in 0..self.n {
            for a in 0..self.m {
                out.push(self.entry(i, a));
            }
        }
        out
    }

    /// `sqrt(E[U^2] E[V^2])`, the distortion of the all-zero estimate of a
    /// rank-1 matrix. `None` for `r > 1` or without known distributions.
    pub fn d0(&self) -> Option<f64> {
        if self.r != 1 {
            return None;
        }
        let (p0, q0) = (self.p0.as_ref()?, self.q0.as_ref()?);
        Some((p0.second_moment() * q0.second_moment()).sqrt())
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_factors_give_sign_entries() {
        let d = FactorDistribution::signs();
        for seed in 0..20 {
            let inst = GroundTruthInstance::generate(2, 1.0, 1, &d, &d, seed).unwrap();
            let m = inst.dense_product();
            assert!(m.iter().all(|x| *x == 1.0 || *x == -1.0));
            // rank <= 1: the 2x2 determinant vanishes
            assert_eq!(m[0] * m[3] - m[1] * m[2], 0.0);
        }
    }

    #[test]
    fn entries_bounded_by_rank() {
        let d = FactorDistribution::uniform_interval();
        let inst = GroundTruthInstance::generate(40, 1.5, 4, &d, &d, 11).unwrap();
        assert_eq!(inst.cols(), 60);
        assert!(inst.dense_product().iter().all(|x| x.abs() <= 4.0));
    }

    #[test]
    fn column_count_rounds_ties_to_even() {
        assert_eq!(column_count(5, 0.5), 2);
        assert_eq!(column_count(7, 0.5), 4);
        assert_eq!(column_count(10, 0.33), 3);
    }

    #[test]
    fn rejects_bad_configuration() {
        let d = FactorDistribution::signs();
        assert!(GroundTruthInstance::generate(0, 1.0, 1, &d, &d, 0).is_err());
        assert!(GroundTruthInstance::generate(3, 0.0, 1, &d, &d, 0).is_err());
        assert!(GroundTruthInstance::generate(3, 1.0, 0, &d, &d, 0).is_err());
        assert!(GroundTruthInstance::generate(3, 0.1, 1, &d, &d, 0).is_err());
        assert!(GroundTruthInstance::from_factors(1, 1, 1, vec![2.0], vec![1.0]).is_err());
    }

    #[test]
    fn same_seed_same_instance() {
        let d = FactorDistribution::uniform_interval();
        let a = GroundTruthInstance::generate(30, 1.0, 2, &d, &d, 5).unwrap();
        let b = GroundTruthInstance::generate(30, 1.0, 2, &d, &d, 5).unwrap();
        let c = GroundTruthInstance::generate(31, 1.0, 2, &d, &d, 5).unwrap();
        assert_eq!(a.row_factors(), b.row_factors());
        // row streams are keyed by index, so a larger instance extends a smaller one
        assert_eq!(a.row_factors(), &c.row_factors()[..60]);
    }
}
