//! Exact state spaces, generator matrices and spectral quantities of small chains.

mod experiments;
mod functional;
mod logsob;

pub use experiments::*;
pub use functional::*;
pub use logsob::*;

use crate::config::{pi_bc, PermutationSpace};
use crate::enumerate::enumerate_graphs;
use crate::error::{Error, Result};
use crate::graph::BipartiteMultigraph;
use crate::kernels::{rates_from, Chain};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;

fn to_f64(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn big(r: &Ratio<i64>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// An enumerated set of graphs with its stationary measure.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub n: usize,
    pub d: usize,
    pub simple_only: bool,
    pub states: Vec<BipartiteMultigraph>,
    /// `π_u` on simple graphs, `π_BC` on multigraphs.
    pub measure: Vec<BigRational>,
    index: HashMap<BipartiteMultigraph, usize>,
}

impl StateSpace {
    /// Enumerates `Ω^B_n(d)` (uniform measure) or `Ω^{BC}_n(d)` (configuration measure).
    pub fn enumerate(n: usize, d: usize, simple_only: bool, cap: usize) -> Result<Self> {
        let states = enumerate_graphs(n, d, simple_only, cap)?;
        if states.is_empty() {
            return Err(Error::InvalidParameter(format!("no states for n={n}, d={d}")));
        }
        let measure = if simple_only {
            let p = BigRational::new(BigInt::one(), BigInt::from(states.len()));
            vec![p; states.len()]
        } else {
            states.iter().map(pi_bc).collect()
        };
        let index = states.iter().enumerate().map(|(k, g)| (g.clone(), k)).collect();
        Ok(StateSpace { n, d, simple_only, states, measure, index })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, g: &BipartiteMultigraph) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn chain_kind(&self) -> Chain {
        if self.simple_only {
            Chain::Simple
        } else {
            Chain::Config
        }
    }

    /// `"simple"` or `"multigraph"`.
    pub fn label(&self) -> &'static str {
        if self.simple_only {
            "simple"
        } else {
            "multigraph"
        }
    }

    pub fn total_mass(&self) -> BigRational {
        self.measure.iter().sum()
    }

    /// The switch-chain generator on this space.
    pub fn generator(&self) -> Result<Generator> {
        let chain = self.chain_kind();
        let mut off = Vec::with_capacity(self.len());
        for g in &self.states {
            let mut row: HashMap<usize, Ratio<i64>> = HashMap::new();
            for (h, r) in rates_from(g, chain) {
                let y = self
                    .index_of(&h)
                    .ok_or_else(|| Error::ShapeMismatch("a neighbour lies outside the enumerated space".into()))?;
                *row.entry(y).or_insert_with(Ratio::zero) += r.0;
            }
            let mut row: Vec<(usize, Ratio<i64>)> = row.into_iter().collect();
            row.sort();
            off.push(row);
        }
        Ok(Generator::new(off))
    }

    /// The reversible chain `(Ω, π, Q)` of this space.
    pub fn chain(&self) -> Result<ReversibleChain> {
        ReversibleChain::new(self.measure.clone(), self.generator()?)
    }

    /// The values of `f` on every state.
    pub fn values<F: Fn(&BipartiteMultigraph) -> BigRational>(&self, f: F) -> Vec<BigRational> {
        self.states.iter().map(f).collect()
    }

    /// The indicator of the entry `(i, j)` on every state.
    pub fn edge_indicator(&self, i: usize, j: usize) -> Vec<BigRational> {
        self.values(|g| BigRational::from_integer(BigInt::from(g.mult(i, j).min(1))))
    }
}

/// A generator stored by its exact off-diagonal rates; the diagonal makes rows sum to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    /// `off[x]` lists `(y, Q(x, y))` for `y ≠ x` with positive rate.
    pub off: Vec<Vec<(usize, Ratio<i64>)>>,
    off_f64: Vec<Vec<(usize, f64)>>,
}

impl Generator {
    pub fn new(off: Vec<Vec<(usize, Ratio<i64>)>>) -> Self {
        let off_f64 = off
            .iter()
            .map(|row| row.iter().map(|(y, r)| (*y, *r.numer() as f64 / *r.denom() as f64)).collect())
            .collect();
        Generator { off, off_f64 }
    }

    /// Builds a generator from a dense matrix of off-diagonal rates (the diagonal is ignored).
    pub fn from_rates(rates: &[Vec<Ratio<i64>>]) -> Result<Self> {
        let m = rates.len();
        let mut off = Vec::with_capacity(m);
        for (x, row) in rates.iter().enumerate() {
            if row.len() != m {
                return Err(Error::ShapeMismatch("rate matrix is not square".into()));
            }
            let mut r = Vec::new();
            for (y, q) in row.iter().enumerate() {
                if x != y && !q.is_zero() {
                    if *q < Ratio::zero() {
                        return Err(Error::InvalidParameter(format!("negative rate at ({x}, {y})")));
                    }
                    r.push((y, *q));
                }
            }
            off.push(r);
        }
        Ok(Generator::new(off))
    }

    /// The random-transposition generator: `2/m²` per transposition.
    pub fn random_transposition(ps: &PermutationSpace) -> Self {
        let m = ps.ground_set() as i64;
        let rate = Ratio::new(2, m * m);
        let off = (0..ps.len())
            .map(|k| {
                let mut row: Vec<(usize, Ratio<i64>)> = ps.transposition_neighbors(k).into_iter().map(|y| (y, rate)).collect();
                row.sort();
                row
            })
            .collect();
        Generator::new(off)
    }

    pub fn len(&self) -> usize {
        self.off.len()
    }

    pub fn is_empty(&self) -> bool {
        self.off.is_empty()
    }

    /// `Q(x, y)`, diagonal included.
    pub fn rate(&self, x: usize, y: usize) -> Ratio<i64> {
        if x == y {
            return -self.off[x].iter().map(|(_, r)| *r).sum::<Ratio<i64>>();
        }
        self.off[x].iter().find(|(z, _)| *z == y).map(|(_, r)| *r).unwrap_or_else(Ratio::zero)
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let m = self.len();
        let mut q = DMatrix::zeros(m, m);
        for (x, row) in self.off_f64.iter().enumerate() {
            for &(y, r) in row {
                q[(x, y)] += r;
                q[(x, x)] -= r;
            }
        }
        q
    }

    /// `π(x) Q(x, y) = π(y) Q(y, x)` for every pair, in exact arithmetic.
    pub fn check_reversible(&self, mu: &[BigRational]) -> Result<()> {
        if mu.len() != self.len() {
            return Err(Error::ShapeMismatch("measure and generator sizes differ".into()));
        }
        for (x, row) in self.off.iter().enumerate() {
            for (y, _) in row {
                if !self.check_pair(mu, x, *y) {
                    return Err(Error::NotReversible(format!("detailed balance fails between states {x} and {y}")));
                }
            }
        }
        Ok(())
    }

    /// Exact `μ(x) Q(x, y) = μ(y) Q(y, x)`.
    pub fn check_pair(&self, mu: &[BigRational], x: usize, y: usize) -> bool {
        &mu[x] * big(&self.rate(x, y)) == &mu[y] * big(&self.rate(y, x))
    }

    /// Largest exit rate `−Q(x, x)`; `I + Q` is stochastic when it is at most one.
    pub fn max_exit_rate(&self) -> Ratio<i64> {
        (0..self.len()).map(|x| -self.rate(x, x)).max().unwrap_or_else(Ratio::zero)
    }
}

/// Eigen-data of `−Q` symmetrized by the stationary measure.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Eigenvalues of `−Q`, ascending; the first is zero.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors of `D^{1/2}(−Q)D^{-1/2}` as columns, in the same order.
    pub eigenvectors: DMatrix<f64>,
    /// Smallest nonzero eigenvalue of `−Q`.
    pub gap: f64,
    /// Largest eigenvalue of `−Q`.
    pub top: f64,
}

impl Spectrum {
    /// `1 / gap`.
    pub fn poincare(&self) -> f64 {
        1.0 / self.gap
    }

    /// Continuous-time relaxation time `1 / gap`.
    pub fn t_rel(&self) -> f64 {
        1.0 / self.gap
    }

    /// Smallest eigenvalue of the discrete chain `I + Q`.
    pub fn lambda_min(&self) -> f64 {
        1.0 - self.top
    }

    /// Absolute spectral gap of `I + Q`.
    pub fn absolute_gap(&self) -> f64 {
        self.gap.min(2.0 - self.top)
    }

    /// Discrete-time relaxation time `1 / absolute gap`.
    pub fn t_rel_discrete(&self) -> f64 {
        1.0 / self.absolute_gap()
    }
}

/// A reversible chain with its exact measure and generator.
#[derive(Debug, Clone)]
pub struct ReversibleChain {
    pub mu: Vec<BigRational>,
    pub mu_f64: Vec<f64>,
    pub q: Generator,
    spectrum: Option<Spectrum>,
}

/// Bisection stops when the bracket is this small relative to its upper end.
pub const T_MIX_REL_TOL: f64 = 1e-12;

impl ReversibleChain {
    /// Checks positivity, total mass one and detailed balance exactly.
    pub fn new(mu: Vec<BigRational>, q: Generator) -> Result<Self> {
        if mu.iter().any(|p| !p.is_positive()) {
            return Err(Error::InvalidParameter("measure must be strictly positive".into()));
        }
        if mu.iter().sum::<BigRational>() != BigRational::one() {
            return Err(Error::InvalidParameter("measure must sum to one".into()));
        }
        q.check_reversible(&mu)?;
        let mu_f64 = mu.iter().map(to_f64).collect();
        Ok(ReversibleChain { mu, mu_f64, q, spectrum: None })
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn pi_min(&self) -> f64 {
        self.mu_f64.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `D^{1/2} (−Q) D^{-1/2}`, symmetrized against rounding.
    pub fn symmetrized(&self) -> DMatrix<f64> {
        let m = self.len();
        let q = self.q.dense();
        let s: Vec<f64> = self.mu_f64.iter().map(|p| p.sqrt()).collect();
        let mut a = DMatrix::from_fn(m, m, |x, y| -q[(x, y)] * s[x] / s[y]);
        let at = a.transpose();
        a += at;
        a *= 0.5;
        a
    }

    /// Computes (once) and returns the spectrum.
    pub fn spectrum(&mut self) -> &Spectrum {
        if self.spectrum.is_none() {
            let eig = SymmetricEigen::new(self.symmetrized());
            let m = self.len();
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
            let eigenvectors = DMatrix::from_fn(m, m, |x, k| eig.eigenvectors[(x, order[k])]);
            let gap = eigenvalues.get(1).copied().unwrap_or(f64::INFINITY);
            let top = eigenvalues.last().copied().unwrap_or(0.0);
            self.spectrum = Some(Spectrum { eigenvalues, eigenvectors, gap, top });
        }
        self.spectrum.as_ref().expect("computed above")
    }

    /// Poincaré constant `sup Var/E = 1/gap`.
    pub fn poincare_constant(&mut self) -> f64 {
        self.spectrum().poincare()
    }

    fn spectral_kernel<F: Fn(f64) -> f64>(&mut self, weight: F) -> DMatrix<f64> {
        let s: Vec<f64> = self.mu_f64.iter().map(|p| p.sqrt()).collect();
        let sp = self.spectrum();
        let m = sp.eigenvalues.len();
        let w = DVector::from_iterator(m, sp.eigenvalues.iter().map(|&l| weight(l)));
        let u = &sp.eigenvectors;
        let mut scaled = u.clone();
        for k in 0..m {
            scaled.column_mut(k).scale_mut(w[k]);
        }
        let core = scaled * u.transpose();
        DMatrix::from_fn(m, m, |x, y| core[(x, y)] * s[y] / s[x])
    }

    /// `e^{tQ}` from the eigendecomposition.
    pub fn heat_kernel(&mut self, t: f64) -> DMatrix<f64> {
        self.spectral_kernel(|l| (-t * l).exp())
    }

    /// `e^{tQ}` by scaling and squaring with Padé approximants.
    pub fn heat_kernel_expm(&self, t: f64) -> DMatrix<f64> {
        (self.q.dense() * t).exp()
    }

    /// `(I + Q)^steps` from the eigendecomposition.
    pub fn discrete_kernel(&mut self, steps: u32) -> DMatrix<f64> {
        self.spectral_kernel(|l| (1.0 - l).powi(steps as i32))
    }

    fn tv_rows(&self, p: &DMatrix<f64>) -> Vec<f64> {
        (0..p.nrows())
            .map(|x| 0.5 * (0..p.ncols()).map(|y| (p[(x, y)] - self.mu_f64[y]).abs()).sum::<f64>())
            .collect()
    }

    /// Total-variation distance to stationarity at time `t` from every start.
    pub fn tv_at(&mut self, t: f64) -> Vec<f64> {
        if t == 0.0 {
            return self.mu_f64.iter().map(|p| 1.0 - p).collect();
        }
        let p = self.heat_kernel(t);
        self.tv_rows(&p)
    }

    /// `(t, TV)` along `ts`, from `start` or maximized over starts.
    pub fn mixing_curve(&mut self, start: Option<usize>, ts: &[f64]) -> Vec<(f64, f64)> {
        ts.iter()
            .map(|&t| {
                let tv = self.tv_at(t);
                let v = match start {
                    Some(x) => tv[x],
                    None => tv.iter().cloned().fold(0.0, f64::max),
                };
                (t, v)
            })
            .collect()
    }

    fn worst_tv(&mut self, t: f64) -> f64 {
        self.tv_at(t).into_iter().fold(0.0, f64::max)
    }

    /// Continuous-time mixing time `inf{t : max_x TV(e^{tQ}(x, ·), π) ≤ ε}` by bisection.
    pub fn t_mix(&mut self, eps: f64) -> Result<f64> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter("eps must lie in (0, 1)".into()));
        }
        if self.worst_tv(0.0) <= eps {
            return Ok(0.0);
        }
        let mut hi = 1.0;
        while self.worst_tv(hi) > eps {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::InvalidParameter("chain does not mix".into()));
            }
        }
        let mut lo = 0.0;
        while hi - lo > T_MIX_REL_TOL * hi {
            let mid = 0.5 * (lo + hi);
            if self.worst_tv(mid) > eps {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }

    /// Discrete-time mixing time of `I + Q`: the least `t` with worst-start TV at most `ε`.
    pub fn t_mix_discrete(&mut self, eps: f64, max_steps: u32) -> Result<u32> {
        for t in 0..=max_steps {
            let p = self.discrete_kernel(t);
            if self.tv_rows(&p).into_iter().fold(0.0, f64::max) <= eps {
                return Ok(t);
            }
        }
        Err(Error::InvalidParameter(format!("not mixed within {max_steps} steps")))
    }

    /// The gap recomputed independently of the dense eigensolver: shifted power iteration
    /// orthogonal to `√π`, refined by Rayleigh-quotient iteration, and returned as the
    /// quotient `E(f, f) / Var(f)` of the resulting function.
    pub fn rayleigh_gap(&self, seed: u64) -> f64 {
        let a = self.symmetrized();
        let m = a.nrows();
        if m < 2 {
            return f64::INFINITY;
        }
        let s = DVector::from_iterator(m, self.mu_f64.iter().map(|p| p.sqrt()));
        let deflate = |v: &mut DVector<f64>| {
            let c = v.dot(&s);
            *v -= &s * c;
            let nrm = v.norm();
            *v /= nrm;
        };
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut v = DVector::from_fn(m, |_, _| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        });
        deflate(&mut v);
        let shift = (0..m).map(|x| (0..m).map(|y| a[(x, y)].abs()).sum::<f64>()).fold(0.0, f64::max);
        let b = DMatrix::identity(m, m) * shift - &a;
        for _ in 0..2000 {
            v = &b * &v;
            deflate(&mut v);
        }
        let mut rho = v.dot(&(&a * &v));
        for _ in 0..50 {
            let shifted = &a - DMatrix::identity(m, m) * rho;
            let Some(w) = shifted.lu().solve(&v) else { break };
            let mut w = w;
            if !w.iter().all(|x| x.is_finite()) || w.norm() == 0.0 {
                break;
            }
            deflate(&mut w);
            let next = w.dot(&(&a * &w));
            let converged = (next - rho).abs() <= 1e-15 * rho.abs();
            v = w;
            rho = next;
            if converged {
                break;
            }
        }
        let f: Vec<f64> = (0..m).map(|x| v[x] / s[x]).collect();
        dirichlet(&self.mu_f64, &self.q, &f) / variance(&self.mu_f64, &f)
    }
}

/// Spaces above this size use [`ReversibleChain::lanczos_extremes`] instead of a dense eigensolve.
pub const DENSE_LIMIT: usize = 1000;

/// Extreme eigenvalues of `−Q` on the complement of the constants.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Extremes {
    /// Smallest nonzero eigenvalue.
    pub gap: f64,
    /// Largest eigenvalue.
    pub top: f64,
    /// Largest Ritz residual of the two extreme pairs (zero for a dense solve).
    pub residual: f64,
    pub steps: usize,
}

impl ReversibleChain {
    fn apply_symmetrized(&self, s: &[f64], v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(v.len());
        for (x, row) in self.q.off_f64.iter().enumerate() {
            let mut acc = 0.0;
            for &(y, r) in row {
                acc += r * (v[x] - s[x] / s[y] * v[y]);
            }
            out[x] = acc;
        }
        out
    }

    /// Lanczos iteration with full reorthogonalization on `D^{1/2}(−Q)D^{-1/2}`, restricted
    /// to the orthogonal complement of `√π`.
    pub fn lanczos_extremes(&self, max_steps: usize, seed: u64) -> Extremes {
        let m = self.len();
        let s: Vec<f64> = self.mu_f64.iter().map(|p| p.sqrt()).collect();
        let sv = DVector::from_column_slice(&s);
        let mut state = seed ^ 0x2545_F491_4F6C_DD1D;
        let mut v = DVector::from_fn(m, |_, _| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        });
        let project = |w: &mut DVector<f64>, basis: &[DVector<f64>]| {
            for _ in 0..2 {
                let c = w.dot(&sv);
                w.axpy(-c, &sv, 1.0);
                for b in basis {
                    let c = w.dot(b);
                    w.axpy(-c, b, 1.0);
                }
            }
        };
        project(&mut v, &[]);
        v /= v.norm();
        let limit = max_steps.min(m.saturating_sub(1)).max(1);
        let mut basis: Vec<DVector<f64>> = vec![v];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut result = Extremes { gap: f64::NAN, top: f64::NAN, residual: f64::INFINITY, steps: 0 };
        for j in 0..limit {
            let mut w = self.apply_symmetrized(&s, &basis[j]);
            let a = w.dot(&basis[j]);
            alpha.push(a);
            project(&mut w, &basis);
            let b = w.norm();
            let k = alpha.len();
            let t = DMatrix::from_fn(k, k, |r, c| {
                if r == c {
                    alpha[r]
                } else if r + 1 == c {
                    beta[r]
                } else if c + 1 == r {
                    beta[c]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let (mut lo, mut hi) = (0, 0);
            for i in 0..k {
                if eig.eigenvalues[i] < eig.eigenvalues[lo] {
                    lo = i;
                }
                if eig.eigenvalues[i] > eig.eigenvalues[hi] {
                    hi = i;
                }
            }
            let res = (b * eig.eigenvectors[(k - 1, lo)]).abs().max((b * eig.eigenvectors[(k - 1, hi)]).abs());
            result = Extremes { gap: eig.eigenvalues[lo], top: eig.eigenvalues[hi], residual: res, steps: k };
            if b <= 1e-13 * result.top.abs().max(1.0) || res <= 1e-13 * result.top.abs().max(1.0) {
                break;
            }
            beta.push(b);
            basis.push(w / b);
        }
        result
    }

    /// The gap and top eigenvalue, by dense solve up to [`DENSE_LIMIT`] states and by Lanczos beyond.
    pub fn extremes(&mut self) -> Extremes {
        if self.len() <= DENSE_LIMIT {
            let sp = self.spectrum();
            return Extremes { gap: sp.gap, top: sp.top, residual: 0.0, steps: 0 };
        }
        self.lanczos_extremes(600, 1)
    }
}

/// Spectral summary of one enumerated space, as emitted by the command line.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SpectralSummary {
    pub n: usize,
    pub d: usize,
    pub space: String,
    pub num_states: usize,
    pub gap: f64,
    pub poincare: f64,
    pub ls_lower: f64,
    pub ls_numeric: f64,
    pub t_rel: f64,
    pub t_mix_quarter: f64,
}

/// Computes the spectral summary of `Ω^B_n(d)` or `Ω^{BC}_n(d)`.
pub fn spectral_summary<R: rand::Rng + ?Sized>(
    n: usize,
    d: usize,
    simple_only: bool,
    cap: usize,
    restarts: usize,
    rng: &mut R,
) -> Result<SpectralSummary> {
    let space = StateSpace::enumerate(n, d, simple_only, cap)?;
    let mut chain = space.chain()?;
    let ls = logsob_constant(&space, &mut chain, restarts, rng)?;
    let sp = chain.spectrum().clone();
    let t_mix_quarter = chain.t_mix(0.25)?;
    Ok(SpectralSummary {
        n,
        d,
        space: space.label().to_string(),
        num_states: space.len(),
        gap: sp.gap,
        poincare: sp.poincare(),
        ls_lower: ls.lower,
        ls_numeric: ls.numeric_sup,
        t_rel: sp.t_rel(),
        t_mix_quarter,
    })
}
