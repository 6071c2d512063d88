//! Numerical estimate of `sup { d(p, q) : phi(p, q) >= 0 }`.
//!
//! For a multiplier `beta` the Lagrangian `phi + beta d^2` is concave in each
//! kernel `P(. | u0)` with `Q` fixed (and vice versa), so it is raised by
//! alternating exact block solves. Sweeping `beta` upward traces the
//! boundary `phi = 0`; bisection on `beta` then refines the last crossing.
//! The result is the best feasible point found, hence a lower estimate of
//! the supremum.

use serde::Serialize;

use super::coupling::{CouplingPair, CouplingSpace};
use super::BoundInputs;
use crate::error::Result;
use crate::rng::{KeyedStream, Role};

#[derive(Debug, Clone, Serialize)]
pub struct TightOptions {
    pub starts: usize,
    pub seed: u64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub ladder: usize,
    pub bisection_steps: usize,
    pub max_sweeps: usize,
}

impl Default for TightOptions {
    fn default() -> Self {
        TightOptions {
            starts: 32,
            seed: 0,
            beta_min: 1e-3,
            beta_max: 1e4,
            ladder: 29,
            bisection_steps: 16,
            max_sweeps: 60,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TightBound {
    /// Largest `d(p, q)` found with `phi(p, q) >= 0`.
    pub value: f64,
    pub couplings: CouplingPair,
    /// `phi` at the returned couplings (non-negative).
    pub phi: f64,
    /// Starts that produced at least one feasible point.
    pub feasible_starts: usize,
    pub diagnostic: Option<String>,
}

struct Candidate {
    d2: f64,
    phi: f64,
    pk: Vec<f64>,
    qk: Vec<f64>,
}

/// Kernels for the row and column blocks.
#[derive(Clone)]
struct Kernels {
    p: Vec<f64>,
    q: Vec<f64>,
}

pub fn tight_upper_bound(inputs: &BoundInputs, options: &TightOptions) -> Result<TightBound> {
    let space = CouplingSpace::new(inputs)?;
    let starts = options.starts.max(1);
    let results = crate::par::map(starts, |s| run_start(&space, options, s));
    let feasible_starts = results.iter().filter(|c| c.is_some()).count();
    let mut best: Option<Candidate> = None;
    for c in results.into_iter().flatten() {
        if best.as_ref().map_or(true, |b| c.d2 > b.d2) {
            best = Some(c);
        }
    }
    Ok(match best {
        Some(c) => TightBound {
            value: c.d2.sqrt(),
            couplings: space.pair_from_kernels(&c.pk, &c.qk),
            phi: c.phi,
            feasible_starts,
            diagnostic: None,
        },
        None => TightBound {
            value: 0.0,
            couplings: space.independent_uniform(),
            phi: space.phi(&space.independent_uniform()),
            feasible_starts: 0,
            diagnostic: Some("no feasible coupling found; the alphabet does not contain the truth support".into()),
        },
    })
}

fn run_start(space: &CouplingSpace, options: &TightOptions, start: usize) -> Option<Candidate> {
    let mut rng = KeyedStream::new(options.seed, Role::Optimizer, start as u64);
    let mut state = initial_kernels(space, start, &mut rng);
    let mut best: Option<Candidate> = None;
    if let Some((p, q)) = space.identity_kernels() {
        consider(space, &mut best, &p, &q);
    }

    let ladder: Vec<f64> = (0..options.ladder.max(2))
        .map(|j| {
            let t = j as f64 / (options.ladder.max(2) - 1) as f64;
            options.beta_min * (options.beta_max / options.beta_min).powf(t)
        })
        .collect();
    let mut feasible: Option<(f64, Kernels)> = None;
    let mut infeasible: Option<f64> = None;
    for &beta in &ladder {
        ascend(space, &mut state, beta, options.max_sweeps);
        if consider(space, &mut best, &state.p, &state.q) {
            feasible = Some((beta, state.clone()));
        } else {
            repair(space, &mut best, &state);
            infeasible = Some(beta);
            break;
        }
    }
    if let (Some((mut lo, mut lo_state)), Some(mut hi)) = (feasible, infeasible) {
        for _ in 0..options.bisection_steps {
            let mid = (lo * hi).sqrt();
            let mut s = lo_state.clone();
            ascend(space, &mut s, mid, options.max_sweeps);
            if consider(space, &mut best, &s.p, &s.q) {
                lo = mid;
                lo_state = s;
            } else {
                repair(space, &mut best, &s);
                hi = mid;
            }
        }
    }
    if let Some(b) = &best {
        let rounded = Kernels {
            p: harden(&b.pk, space.k),
            q: harden(&b.qk, space.k),
        };
        consider(space, &mut best, &rounded.p, &rounded.q);
    }
    best
}

/// Record the point if it is feasible; returns feasibility.
fn consider(space: &CouplingSpace, best: &mut Option<Candidate>, pk: &[f64], qk: &[f64]) -> bool {
    let phi = space.phi_kernels(pk, qk);
    if !(phi >= 0.0) {
        return false;
    }
    let d2 = space.distortion_sq_kernels(pk, qk);
    if best.as_ref().map_or(true, |b| d2 > b.d2) {
        *best = Some(Candidate {
            d2,
            phi,
            pk: pk.to_vec(),
            qk: qk.to_vec(),
        });
    }
    true
}

/// Blend an infeasible point toward the identity coupling (where `phi = 0`)
/// and keep the least blended feasible mixture.
fn repair(space: &CouplingSpace, best: &mut Option<Candidate>, state: &Kernels) {
    let Some((ip, iq)) = space.identity_kernels() else {
        return;
    };
    let blend = |t: f64| -> Kernels {
        let mix = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect();
        Kernels {
            p: mix(&state.p, &ip),
            q: mix(&state.q, &iq),
        }
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if space.phi_kernels(&blend(mid).p, &blend(mid).q) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let k = blend(hi);
    consider(space, best, &k.p, &k.q);
}

fn harden(kern: &[f64], k: usize) -> Vec<f64> {
    kern.chunks_exact(k)
        .flat_map(|row| {
            let arg = row
                .iter()
                .enumerate()
                .fold(0, |m, (i, x)| if *x > row[m] { i } else { m });
            (0..k).map(move |i| if i == arg { 1.0 } else { 0.0 })
        })
        .collect()
}

fn initial_kernels(space: &CouplingSpace, start: usize, rng: &mut KeyedStream) -> Kernels {
    let k = space.k;
    let (kp, kq) = (space.wp.len(), space.wq.len());
    let mut dirichlet = |rows: usize| -> Vec<f64> {
        let mut out = Vec::with_capacity(rows * k);
        for _ in 0..rows {
            let draws: Vec<f64> = (0..k).map(|_| -(1.0 - rng.next_f64()).ln()).collect();
            let s: f64 = draws.iter().sum();
            out.extend(draws.iter().map(|d| d / s));
        }
        out
    };
    let noise_p = dirichlet(kp);
    let noise_q = dirichlet(kq);
    let toward = |base: Option<Vec<f64>>, noise: Vec<f64>, keep: f64| match base {
        Some(b) => b.iter().zip(&noise).map(|(x, y)| keep * x + (1.0 - keep) * y).collect(),
        None => noise,
    };
    match start % 4 {
        0 => Kernels { p: noise_p, q: noise_q },
        1 => {
            let id = space.identity_kernels();
            Kernels {
                p: toward(id.as_ref().map(|x| x.0.clone()), noise_p, 0.7),
                q: toward(id.map(|x| x.1), noise_q, 0.7),
            }
        }
        2 => {
            // one side copies the truth, the other is spread out
            let id = space.identity_kernels();
            Kernels {
                p: toward(id.as_ref().map(|x| x.0.clone()), noise_p, 0.9),
                q: toward(Some(vec![1.0 / k as f64; kq * k]), noise_q, 0.5),
            }
        }
        _ => Kernels {
            p: toward(Some(vec![1.0 / k as f64; kp * k]), noise_p, 0.9),
            q: toward(Some(vec![1.0 / k as f64; kq * k]), noise_q, 0.9),
        },
    }
}

fn lagrangian(space: &CouplingSpace, s: &Kernels, beta: f64) -> f64 {
    space.phi_kernels(&s.p, &s.q) + beta * space.distortion_sq_kernels(&s.p, &s.q)
}

/// Alternate exact block solves until the Lagrangian stalls.
fn ascend(space: &CouplingSpace, s: &mut Kernels, beta: f64, max_sweeps: usize) {
    let mut last = lagrangian(space, s, beta);
    for _ in 0..max_sweeps {
        update_rows(space, s, beta);
        update_cols(space, s, beta);
        let now = lagrangian(space, s, beta);
        if !(now - last > 1e-11 * (1.0 + now.abs())) {
            break;
        }
        last = now;
    }
}

fn update_rows(space: &CouplingSpace, s: &mut Kernels, beta: f64) {
    let k = space.k;
    let kq = space.wq.len();
    let mut hits = vec![0.0; kq * k];
    let mut cost = vec![0.0; k];
    for u0 in 0..space.wp.len() {
        if space.wp[u0] == 0.0 {
            continue;
        }
        cost.iter_mut().for_each(|c| *c = 0.0);
        for v0 in 0..kq {
            let qr = &s.q[v0 * k..(v0 + 1) * k];
            for u in 0..k {
                let base = space.at(u0, v0, u, 0);
                let mut h = 0.0;
                let mut g = 0.0;
                for v in 0..k {
                    h += qr[v] * space.hit[base + v];
                    g += qr[v] * space.gap2[base + v];
                }
                hits[v0 * k + u] = h;
                cost[u] += space.wq[v0] * g;
            }
        }
        solve_block(&mut s.p[u0 * k..(u0 + 1) * k], 1.0, space.epsilon, &space.wq, &hits, &cost, beta);
    }
}

fn update_cols(space: &CouplingSpace, s: &mut Kernels, beta: f64) {
    let k = space.k;
    let kp = space.wp.len();
    let mut hits = vec![0.0; kp * k];
    let mut cost = vec![0.0; k];
    for v0 in 0..space.wq.len() {
        if space.wq[v0] == 0.0 {
            continue;
        }
        cost.iter_mut().for_each(|c| *c = 0.0);
        hits.iter_mut().for_each(|h| *h = 0.0);
        for u0 in 0..kp {
            let pr = &s.p[u0 * k..(u0 + 1) * k];
            for (u, pu) in pr.iter().enumerate() {
                if *pu == 0.0 {
                    continue;
                }
                let base = space.at(u0, v0, u, 0);
                for v in 0..k {
                    hits[u0 * k + v] += pu * space.hit[base + v];
                    cost[v] += space.wp[u0] * pu * space.gap2[base + v];
                }
            }
        }
        solve_block(&mut s.q[v0 * k..(v0 + 1) * k], space.alpha, space.epsilon, &space.wp, &hits, &cost, beta);
    }
}

/// Maximize `a H(pi) + eps sum_j w_j ln(s_j . pi) + beta c . pi` over the
/// simplex by exponentiated-gradient steps with step halving. The full step
/// `1 / a` is the fixed-point map `pi ~ exp(gradient of the rest / a)`.
fn solve_block(pi: &mut [f64], a: f64, eps: f64, w: &[f64], s: &[f64], c: &[f64], beta: f64) {
    let k = pi.len();
    let objective = |x: &[f64]| -> f64 {
        let mut f = a * super::entropy(x) + beta * x.iter().zip(c).map(|(p, q)| p * q).sum::<f64>();
        if eps > 0.0 {
            for (j, wj) in w.iter().enumerate() {
                if *wj == 0.0 {
                    continue;
                }
                let sj: f64 = x.iter().zip(&s[j * k..(j + 1) * k]).map(|(p, h)| p * h).sum();
                f += eps * wj * if sj > 0.0 { sj.ln() } else { f64::NEG_INFINITY };
            }
        }
        f
    };
    let mut current = objective(pi);
    let mut grad = vec![0.0; k];
    let mut trial = vec![0.0; k];
    let full = 1.0 / a;
    let mut step = full;
    for _ in 0..30 {
        for u in 0..k {
            grad[u] = beta * c[u];
        }
        if eps > 0.0 {
            for (j, wj) in w.iter().enumerate() {
                if *wj == 0.0 {
                    continue;
                }
                let row = &s[j * k..(j + 1) * k];
                let sj: f64 = pi.iter().zip(row).map(|(p, h)| p * h).sum();
                if sj > 0.0 {
                    for u in 0..k {
                        grad[u] += eps * wj * row[u] / sj;
                    }
                }
            }
        }
        let mut improved = false;
        for _ in 0..40 {
            // log pi' = log pi + step (grad - a (log pi + 1)), normalized
            let mut top = f64::NEG_INFINITY;
            for u in 0..k {
                let lp = pi[u].max(1e-300).ln();
                trial[u] = lp + step * (grad[u] - a * lp);
                top = top.max(trial[u]);
            }
            let mut z = 0.0;
            for t in trial.iter_mut() {
                *t = (*t - top).exp();
                z += *t;
            }
            trial.iter_mut().for_each(|t| *t /= z);
            let f = objective(&trial);
            if f >= current {
                improved = f > current + 1e-13 * (1.0 + current.abs());
                pi.copy_from_slice(&trial);
                current = f;
                step = (2.0 * step).min(full);
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
}
