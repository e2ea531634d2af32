//! Log-Sobolev constant: an exact test-function lower bound and a numerical supremum.

use super::functional::entropy_kernel;
use super::{dirichlet, dirichlet_exact, entropy_sq, entropy_sq_exact, LogCombination, ReversibleChain, StateSpace};
use crate::error::Result;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

/// Fewest random restarts used by [`logsob_numeric`].
pub const MIN_RESTARTS: usize = 32;

const MAX_ITERS: usize = 1500;

/// Smallest spread `max u − min u` the ascent may visit; flatter functions are covered by `2 / gap`.
const MIN_SPREAD: f64 = 1e-3;

/// Lower bound and numerical supremum of `sup Ent(f²) / E(f, f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSob {
    /// Ratio for the indicator of the entry `(0, 0)`.
    pub lower: f64,
    /// Exact entropy of the indicator.
    pub lower_ent: LogCombination,
    /// Exact Dirichlet form of the indicator.
    pub lower_dirichlet: BigRational,
    /// The larger of `2 / gap` and the best ratio found by gradient ascent; a lower estimate
    /// of the true supremum.
    pub numeric_sup: f64,
}

/// `Ent(f²) / E(f, f)`, or `None` when the Dirichlet form vanishes.
pub fn ls_ratio(chain: &ReversibleChain, f: &[f64]) -> Option<f64> {
    let e = dirichlet(&chain.mu_f64, &chain.q, f);
    if e <= 0.0 {
        return None;
    }
    entropy_sq(&chain.mu_f64, f).ok().map(|ent| ent / e)
}

fn ratio_and_grad(chain: &ReversibleChain, u: &[f64]) -> (f64, Vec<f64>) {
    let mu = &chain.mu_f64;
    let umax = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let umin = u.iter().cloned().fold(f64::INFINITY, f64::min);
    if umax - umin < MIN_SPREAD {
        return (0.0, vec![0.0; u.len()]);
    }
    let f: Vec<f64> = u.iter().map(|x| (x - umax).exp()).collect();
    let g: Vec<f64> = f.iter().map(|v| v * v).collect();
    let m: f64 = mu.iter().zip(&g).map(|(p, v)| p * v).sum();
    let ent: f64 = mu.iter().zip(&g).map(|(p, v)| p * m * entropy_kernel(v / m)).sum();
    let e = dirichlet(mu, &chain.q, &f);
    if e <= 0.0 || !e.is_finite() {
        return (0.0, vec![0.0; u.len()]);
    }
    let mut grad = vec![0.0; u.len()];
    for x in 0..u.len() {
        let d_ent = if g[x] > 0.0 { 2.0 * mu[x] * g[x] * ((g[x] - m) / m).ln_1p() } else { 0.0 };
        let flow: f64 = chain.q.off_f64[x].iter().map(|&(y, r)| r * (f[x] - f[y])).sum();
        let d_e = f[x] * 2.0 * mu[x] * flow;
        grad[x] = (d_ent * e - ent * d_e) / (e * e);
    }
    (ent / e, grad)
}

fn ascend(chain: &ReversibleChain, mut u: Vec<f64>) -> f64 {
    let (mut best, mut grad) = ratio_and_grad(chain, &u);
    let mut step = 0.5;
    for _ in 0..MAX_ITERS {
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() || step < 1e-12 {
            break;
        }
        let cand: Vec<f64> = u.iter().zip(&grad).map(|(a, g)| a + step * g / norm).collect();
        let (val, g2) = ratio_and_grad(chain, &cand);
        if val > best && val.is_finite() {
            best = val;
            u = cand;
            grad = g2;
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    best
}

/// Gradient ascent of `Ent(f²)/E(f, f)` over `f = e^u`, from at least [`MIN_RESTARTS`]
/// random starts and every function in `starts` (which must be positive).
/// The value of each `starts` entry itself also counts, so the result dominates it.
pub fn logsob_numeric<R: Rng + ?Sized>(chain: &ReversibleChain, restarts: usize, starts: &[Vec<f64>], rng: &mut R) -> f64 {
    let m = chain.len();
    let mut best = 0.0f64;
    for f in starts {
        if let Some(r) = ls_ratio(chain, f) {
            best = best.max(r);
        }
        let u: Vec<f64> = f.iter().map(|v| (v.max(0.0) + 1e-3).ln()).collect();
        best = best.max(ascend(chain, u));
    }
    for k in 0..restarts.max(MIN_RESTARTS) {
        let scale = [0.25, 1.0, 2.0, 4.0][k % 4];
        let u: Vec<f64> = (0..m).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
        best = best.max(ascend(chain, u));
    }
    best
}

/// `max(2 / gap, logsob_numeric(..))`; the first term is the limit of the ratio at
/// perturbations of constants.
pub fn logsob_sup<R: Rng + ?Sized>(chain: &mut ReversibleChain, restarts: usize, starts: &[Vec<f64>], rng: &mut R) -> f64 {
    logsob_numeric(chain, restarts, starts, rng).max(2.0 / chain.extremes().gap)
}

/// The exact edge-indicator lower bound together with the numerical supremum.
pub fn logsob_constant<R: Rng + ?Sized>(
    space: &StateSpace,
    chain: &mut ReversibleChain,
    restarts: usize,
    rng: &mut R,
) -> Result<LogSob> {
    let f = space.edge_indicator(0, 0);
    let ent = entropy_sq_exact(&chain.mu, &f)?;
    let dir = dirichlet_exact(&chain.mu, &chain.q, &f);
    let lower = if dir.is_zero() { 0.0 } else { ent.to_f64() / dir.to_f64().unwrap_or(f64::NAN) };
    let start: Vec<f64> = f.iter().map(|v| v.to_f64().unwrap_or(0.0)).collect();
    let numeric_sup = logsob_sup(chain, restarts, &[start], rng);
    Ok(LogSob { lower, lower_ent: ent, lower_dirichlet: dir, numeric_sup })
}
