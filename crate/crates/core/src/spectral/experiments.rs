//! Lift identities, eigenvalue checks, scaling reports and the extension comparison experiment.

use super::{dirichlet, dirichlet_exact, entropy_sq_exact, variance, variance_exact, Generator, LogCombination};
use super::{ReversibleChain, StateSpace};
use crate::config::{configuration_to_graph, PermutationSpace};
use crate::error::{Error, Result};
use crate::extension::{edge_indicator, extend, hashed, ExtensionContext, FieldSample, GaussianFieldSpec, SimpleFn};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

/// Tolerance of the smallest-eigenvalue check.
pub const LAMBDA_MIN_TOL: f64 = 1e-10;

/// The smallest eigenvalue of `I + Q` against `−1 + 1/n`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LambdaMinReport {
    pub lambda_min: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Checks `λ_min(I + Q) ≥ −1 + 1/n` within [`LAMBDA_MIN_TOL`].
pub fn lambda_min_check(chain: &mut ReversibleChain, n: usize) -> LambdaMinReport {
    let lambda_min = 1.0 - chain.extremes().top;
    let bound = -1.0 + 1.0 / n as f64;
    LambdaMinReport { lambda_min, bound, holds: lambda_min >= bound - LAMBDA_MIN_TOL }
}

/// The configuration-model lift from multigraphs to permutations of `nd` stubs.
pub struct LiftSetup {
    pub space: StateSpace,
    pub perms: PermutationSpace,
    /// Index in `space` of `ψ(σ)` for every permutation `σ`.
    pub image: Vec<usize>,
    pub rt: Generator,
    pub uniform: Vec<BigRational>,
}

/// Both sides of the three lift identities for one function.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftReport {
    pub var_lift: BigRational,
    pub var_graph: BigRational,
    pub ent_lift: LogCombination,
    pub ent_graph: LogCombination,
    pub dir_lift: BigRational,
    pub dir_graph: BigRational,
    /// `(nd − 1) / nd`.
    pub expected_factor: BigRational,
}

impl LiftReport {
    pub fn passed(&self) -> bool {
        self.var_lift == self.var_graph
            && self.ent_lift.exact_eq(&self.ent_graph)
            && self.dir_lift == &self.dir_graph * &self.expected_factor
    }
}

impl LiftSetup {
    pub fn new(n: usize, d: usize, cap: usize) -> Result<Self> {
        let space = StateSpace::enumerate(n, d, false, cap)?;
        let perms = PermutationSpace::new(n * d)?;
        let image = (0..perms.len())
            .map(|k| {
                let g = configuration_to_graph(n, d, &perms.perm(k))?;
                space.index_of(&g).ok_or_else(|| Error::ShapeMismatch("lift image outside the space".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let rt = Generator::random_transposition(&perms);
        let p = BigRational::new(BigInt::from(1), BigInt::from(perms.len()));
        let uniform = vec![p; perms.len()];
        Ok(LiftSetup { space, perms, image, rt, uniform })
    }

    /// Evaluates the identities for `f` given on the multigraph space (non-negative for the entropy).
    pub fn check(&self, graph_chain: &ReversibleChain, f: &[BigRational]) -> Result<LiftReport> {
        let lifted: Vec<BigRational> = self.image.iter().map(|&k| f[k].clone()).collect();
        let nd = self.perms.ground_set() as i64;
        Ok(LiftReport {
            var_lift: variance_exact(&self.uniform, &lifted),
            var_graph: variance_exact(&graph_chain.mu, f),
            ent_lift: entropy_sq_exact(&self.uniform, &lifted)?,
            ent_graph: entropy_sq_exact(&graph_chain.mu, f)?,
            dir_lift: dirichlet_exact(&self.uniform, &self.rt, &lifted),
            dir_graph: dirichlet_exact(&graph_chain.mu, &graph_chain.q, f),
            expected_factor: BigRational::new(BigInt::from(nd - 1), BigInt::from(nd)),
        })
    }
}

/// Poincaré constants over a grid of sizes.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ScalingReport {
    /// `(n, d, nd, states, poincare)` in increasing `nd`.
    pub rows: Vec<(usize, usize, usize, usize, f64)>,
    pub monotone: bool,
    /// Least-squares slope of `log poincare` against `log nd`.
    pub slope: f64,
}

/// Computes the Poincaré constant on each `(n, d)` of `grid`.
pub fn scaling_report(grid: &[(usize, usize)], simple_only: bool, cap: usize) -> Result<ScalingReport> {
    let mut rows = Vec::new();
    for &(n, d) in grid {
        let space = StateSpace::enumerate(n, d, simple_only, cap)?;
        let mut chain = space.chain()?;
        rows.push((n, d, n * d, space.len(), 1.0 / chain.extremes().gap));
    }
    rows.sort_by_key(|r| r.2);
    let monotone = rows.windows(2).all(|w| w[1].4 >= w[0].4);
    let xs: Vec<f64> = rows.iter().map(|r| (r.2 as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.4.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(ScalingReport { rows, monotone, slope: sxy / sxx })
}

/// Where the test functions of the comparison experiment come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionSource {
    /// The indicator of the entry `(0, 0)` in every trial.
    EdgeIndicator,
    /// A fresh hashed integer function with values in `0..levels` per trial.
    Random { levels: u64 },
}

/// Thresholds at which the variance ratio is tallied.
pub const VARIANCE_THRESHOLDS: [f64; 5] = [0.01, 0.05, 0.1, 0.25, 0.5];

/// Empirical Dirichlet and variance ratios of the extension against the original function.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ComparisonReport {
    pub n: usize,
    pub d: usize,
    pub trials: usize,
    /// Trials skipped because `f` was constant.
    pub excluded: usize,
    /// `(E_{π_BC}(f̃, f̃) / E_{π_u}(f, f), Var_{π_BC}(f̃) / Var_{π_u}(f))` per kept trial.
    pub ratios: Vec<(f64, f64)>,
    /// `(threshold, fraction of trials with variance ratio ≥ threshold)`.
    pub variance_tail: Vec<(f64, f64)>,
    /// Largest `Var_{π_u}(f) / E_{π_u}(f, f)` among the sampled functions.
    pub max_rayleigh: f64,
    pub poincare: f64,
    /// `max_rayleigh / nd`.
    pub c_prime: f64,
    pub rayleigh_below_poincare: bool,
}

/// Runs the comparison on the enumerated spaces at `(n, d)`.
pub fn comparison_experiment<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    source: FunctionSource,
    trials: usize,
    cap: usize,
    rng: &mut R,
) -> Result<ComparisonReport> {
    let simple = StateSpace::enumerate(n, d, true, cap)?;
    let multi = StateSpace::enumerate(n, d, false, cap)?;
    let mut chain_u = simple.chain()?;
    let chain_c = multi.chain()?;
    let poincare = chain_u.poincare_constant();
    let mut ratios = Vec::new();
    let mut excluded = 0;
    let mut max_rayleigh = 0.0f64;
    for _ in 0..trials {
        let f: SimpleFn = match source {
            FunctionSource::EdgeIndicator => edge_indicator(0, 0),
            FunctionSource::Random { levels } => hashed(rng.random(), levels),
        };
        let fu = simple.values(|g| f(g));
        let var_u = variance_exact(&chain_u.mu, &fu);
        if var_u.is_zero() {
            excluded += 1;
            continue;
        }
        let dir_u = dirichlet_exact(&chain_u.mu, &chain_u.q, &fu);
        let ctx = ExtensionContext::exact(n, d, f, cap)?;
        let spec = GaussianFieldSpec::sample(n, d, rng);
        let sample = FieldSample::draw(&spec, rng);
        let ft: Vec<f64> = multi
            .states
            .iter()
            .map(|g| extend(&ctx, &spec, &sample, g).map(|e| e.value()))
            .collect::<Result<_>>()?;
        let (var_u, dir_u) = (var_u.to_f64().unwrap_or(f64::NAN), dir_u.to_f64().unwrap_or(f64::NAN));
        let dir_c = dirichlet(&chain_c.mu_f64, &chain_c.q, &ft);
        let var_c = variance(&chain_c.mu_f64, &ft);
        ratios.push((dir_c / dir_u, var_c / var_u));
        max_rayleigh = max_rayleigh.max(var_u / dir_u);
    }
    let kept = ratios.len().max(1) as f64;
    let variance_tail = VARIANCE_THRESHOLDS
        .iter()
        .map(|&t| (t, ratios.iter().filter(|r| r.1 >= t).count() as f64 / kept))
        .collect();
    Ok(ComparisonReport {
        n,
        d,
        trials,
        excluded,
        ratios,
        variance_tail,
        max_rayleigh,
        poincare,
        c_prime: max_rayleigh / (n * d) as f64,
        rayleigh_below_poincare: max_rayleigh <= poincare * (1.0 + 1e-9),
    })
}
