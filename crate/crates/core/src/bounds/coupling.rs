use serde::Serialize;

use super::BoundInputs;
use crate::error::{Error, Result};
use crate::model::FactorDistribution;

/// Largest `(N^r)^2` the coupling optimizer accepts.
pub const MAX_JOINT_SIZE: usize = 100;
/// Slack on `|u.v - u0.v0| <= delta` that absorbs rounding in the products.
const MATCH_SLACK: f64 = 1e-12;

/// Shannon entropy in nats, with `0 ln 0 = 0`.
pub fn entropy(dist: &[f64]) -> f64 {
    -dist.iter().filter(|&&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>()
}

/// Joint laws of `(u, u0)` and `(v, v0)`, stored as `truth x estimate`
/// row-major tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingPair {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

/// Enumerated vectors and per-configuration tables for evaluating `d` and
/// `phi` on couplings.
#[derive(Debug, Clone)]
pub struct CouplingSpace {
    pub(crate) k: usize,
    pub(crate) wp: Vec<f64>,
    pub(crate) wq: Vec<f64>,
    /// `(u.v - u0.v0)^2` at `((u0 * kq + v0) * k + u) * k + v`.
    pub(crate) gap2: Vec<f64>,
    /// `1` where `|u.v - u0.v0| <= delta`, same layout.
    pub(crate) hit: Vec<f64>,
    /// Estimate index equal to each truth vector, when the alphabet holds it.
    pub(crate) same_p: Option<Vec<usize>>,
    pub(crate) same_q: Option<Vec<usize>>,
    pub(crate) epsilon: f64,
    pub(crate) alpha: f64,
}

fn power(points: &[f64], weights: &[f64], r: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut vecs = vec![Vec::new()];
    let mut ws = vec![1.0];
    for _ in 0..r {
        let mut nv = Vec::new();
        let mut nw = Vec::new();
        for (v, w) in vecs.iter().zip(&ws) {
            for (x, p) in points.iter().zip(weights) {
                let mut v2 = v.clone();
                v2.push(*x);
                nv.push(v2);
                nw.push(w * p);
            }
        }
        vecs = nv;
        ws = nw;
    }
    (vecs, ws)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl CouplingSpace {
    pub fn new(inputs: &BoundInputs) -> Result<Self> {
        inputs.validate()?;
        let r = inputs.r;
        let alphabet = inputs.estimate_alphabet()?;
        let ones = vec![1.0; alphabet.len()];
        let (est, _) = power(alphabet.points(), &ones, r);
        let k = est.len();
        if k.saturating_mul(k) > MAX_JOINT_SIZE || alphabet.len().pow(r as u32) != k {
            return Err(Error::Config(format!(
                "alphabet power {}^{r} is too large for the coupling optimizer (limit N^2r <= {MAX_JOINT_SIZE})",
                alphabet.len()
            )));
        }
        let truth = |d: &FactorDistribution| -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
            let atoms = d
                .atoms()
                .ok_or_else(|| Error::Unsupported("couplings need discrete factor laws".into()))?;
            let (pts, ws): (Vec<f64>, Vec<f64>) = atoms.into_iter().unzip();
            Ok(power(&pts, &ws, r))
        };
        let (rows0, wp) = truth(&inputs.p0)?;
        let (cols0, wq) = truth(&inputs.q0)?;
        let (kp, kq) = (rows0.len(), cols0.len());
        let mut gap2 = Vec::with_capacity(kp * kq * k * k);
        let mut hit = Vec::with_capacity(gap2.capacity());
        for u0 in &rows0 {
            for v0 in &cols0 {
                let m0 = dot(u0, v0);
                for u in &est {
                    for v in &est {
                        let g = dot(u, v) - m0;
                        gap2.push(g * g);
                        hit.push(if g.abs() <= inputs.delta_tol + MATCH_SLACK { 1.0 } else { 0.0 });
                    }
                }
            }
        }
        let same = |truth: &[Vec<f64>]| -> Option<Vec<usize>> {
            truth.iter().map(|t| est.iter().position(|e| e == t)).collect()
        };
        Ok(CouplingSpace {
            k,
            same_p: same(&rows0),
            same_q: same(&cols0),
            wp,
            wq,
            gap2,
            hit,
            epsilon: inputs.epsilon,
            alpha: inputs.alpha,
        })
    }

    /// Number of estimate vectors, `N^r`.
    pub fn estimate_count(&self) -> usize {
        self.k
    }

    pub fn row_weights(&self) -> &[f64] {
        &self.wp
    }

    pub fn col_weights(&self) -> &[f64] {
        &self.wq
    }

    #[inline]
    pub(crate) fn at(&self, u0: usize, v0: usize, u: usize, v: usize) -> usize {
        ((u0 * self.wq.len() + v0) * self.k + u) * self.k + v
    }

    /// Turn conditional kernels `P(u | u0)`, `Q(v | v0)` into joint laws.
    pub fn pair_from_kernels(&self, pk: &[f64], qk: &[f64]) -> CouplingPair {
        let joint = |kern: &[f64], w: &[f64]| -> Vec<f64> {
            kern.chunks_exact(self.k)
                .zip(w)
                .flat_map(|(row, w)| row.iter().map(move |x| x * w))
                .collect()
        };
        CouplingPair {
            p: joint(pk, &self.wp),
            q: joint(qk, &self.wq),
        }
    }

    fn kernels(&self, pair: &CouplingPair) -> (Vec<f64>, Vec<f64>) {
        let cond = |joint: &[f64], w: &[f64]| -> Vec<f64> {
            joint
                .chunks_exact(self.k)
                .zip(w)
                .flat_map(|(row, w)| {
                    let s: f64 = row.iter().sum();
                    let uniform = 1.0 / self.k as f64;
                    row.iter().map(move |x| if s > 0.0 { x / s } else if *w == 0.0 { uniform } else { 0.0 })
                })
                .collect()
        };
        (cond(&pair.p, &self.wp), cond(&pair.q, &self.wq))
    }

    /// Both estimate vectors equal to the truth.
    pub fn identity(&self) -> Option<CouplingPair> {
        let (pk, qk) = self.identity_kernels()?;
        Some(self.pair_from_kernels(&pk, &qk))
    }

    pub(crate) fn identity_kernels(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let build = |same: &[usize]| {
            let mut kern = vec![0.0; same.len() * self.k];
            for (t, &e) in same.iter().enumerate() {
                kern[t * self.k + e] = 1.0;
            }
            kern
        };
        Some((build(self.same_p.as_ref()?), build(self.same_q.as_ref()?)))
    }

    /// Estimate vectors independent of the truth and uniform.
    pub fn independent_uniform(&self) -> CouplingPair {
        let u = 1.0 / self.k as f64;
        self.pair_from_kernels(&vec![u; self.wp.len() * self.k], &vec![u; self.wq.len() * self.k])
    }

    /// Largest deviation of either truth marginal from `p0`, `q0`.
    pub fn marginal_residual(&self, pair: &CouplingPair) -> f64 {
        let dev = |joint: &[f64], w: &[f64]| {
            joint
                .chunks_exact(self.k)
                .zip(w)
                .map(|(row, w)| (row.iter().sum::<f64>() - w).abs())
                .fold(0.0, f64::max)
        };
        dev(&pair.p, &self.wp).max(dev(&pair.q, &self.wq))
    }

    /// `d(p, q) = sqrt(E |u.v - u0.v0|^2)`.
    pub fn distortion(&self, pair: &CouplingPair) -> f64 {
        let (pk, qk) = self.kernels(pair);
        self.distortion_sq_kernels(&pk, &qk).sqrt()
    }

    /// `H(p) - H(p0) + alpha [H(q) - H(q0)] + epsilon E log P{|u.v - u0.v0| <= delta | u0, v0}`.
    pub fn phi(&self, pair: &CouplingPair) -> f64 {
        let (pk, qk) = self.kernels(pair);
        self.phi_kernels(&pk, &qk)
    }

    /// The expected log-probability term of `phi`, without the `epsilon`.
    pub fn log_match_term(&self, pair: &CouplingPair) -> f64 {
        let (pk, qk) = self.kernels(pair);
        self.log_match_kernels(&pk, &qk)
    }

    pub(crate) fn distortion_sq_kernels(&self, pk: &[f64], qk: &[f64]) -> f64 {
        self.expect(pk, qk, &self.gap2, |x| x)
    }

    pub(crate) fn log_match_kernels(&self, pk: &[f64], qk: &[f64]) -> f64 {
        self.expect(pk, qk, &self.hit, |s| if s > 0.0 { s.ln() } else { f64::NEG_INFINITY })
    }

    pub(crate) fn entropy_gaps(&self, pk: &[f64], qk: &[f64]) -> (f64, f64) {
        let gap = |kern: &[f64], w: &[f64]| -> f64 {
            kern.chunks_exact(self.k).zip(w).map(|(row, w)| w * entropy(row)).sum()
        };
        (gap(pk, &self.wp), gap(qk, &self.wq))
    }

    pub(crate) fn phi_kernels(&self, pk: &[f64], qk: &[f64]) -> f64 {
        let (hp, hq) = self.entropy_gaps(pk, qk);
        let mut phi = hp + self.alpha * hq;
        if self.epsilon > 0.0 {
            phi += self.epsilon * self.log_match_kernels(pk, qk);
        }
        phi
    }

    /// `sum_{u0,v0} w(u0) w(v0) f(sum_{u,v} P(u|u0) Q(v|v0) table)`.
    fn expect(&self, pk: &[f64], qk: &[f64], table: &[f64], f: impl Fn(f64) -> f64) -> f64 {
        let k = self.k;
        let mut total = 0.0;
        for (u0, wp) in self.wp.iter().enumerate() {
            if *wp == 0.0 {
                continue;
            }
            let pr = &pk[u0 * k..(u0 + 1) * k];
            for (v0, wq) in self.wq.iter().enumerate() {
                if *wq == 0.0 {
                    continue;
                }
                let qr = &qk[v0 * k..(v0 + 1) * k];
                let mut s = 0.0;
                for (u, pu) in pr.iter().enumerate() {
                    if *pu == 0.0 {
                        continue;
                    }
                    let base = self.at(u0, v0, u, 0);
                    s += pu * dot(qr, &table[base..base + k]);
                }
                total += wp * wq * f(s);
            }
        }
        total
    }
}
