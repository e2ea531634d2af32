//! Randomized extension of a function on simple graphs to multigraphs.
//!
//! A function `f` on the simple graphs is extended to every multigraph with the
//! same degrees. Graphs with few double edges receive the average of `f` over
//! their s-neighbourhood plus a Gaussian fluctuation whose variance is the
//! spread of `f` over that neighbourhood. The Gaussian field is built from
//! indicator functions of a random partition of the adjacency entries.

use crate::config::{pi_bc, sample_uniform_simple};
use crate::enumerate::enumerate_graphs;
use crate::error::{Error, Result};
use crate::graph::{classify, BipartiteMultigraph, Category, Params};
use crate::neighborhoods::{in_r, sn_endpoints, sn_size};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

/// A real function on the simple graphs, evaluated exactly.
pub type SimpleFn = Arc<dyn Fn(&BipartiteMultigraph) -> BigRational + Send + Sync>;

/// Largest s-neighbourhood whose average is computed exhaustively.
pub const SN_CAP: u64 = 2_000_000;

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn to_f64(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// The indicator `1[(i, j) ∈ E]` of one adjacency entry.
pub fn edge_indicator(i: usize, j: usize) -> SimpleFn {
    Arc::new(move |g: &BipartiteMultigraph| rat(g.mult(i, j).min(1) as i64))
}

/// The constant function `c`.
pub fn constant(c: BigRational) -> SimpleFn {
    Arc::new(move |_: &BipartiteMultigraph| c.clone())
}

/// `f + r`.
pub fn shifted(f: SimpleFn, r: BigRational) -> SimpleFn {
    Arc::new(move |g: &BipartiteMultigraph| f(g) + &r)
}

/// `c · f`.
pub fn scaled(f: SimpleFn, c: BigRational) -> SimpleFn {
    Arc::new(move |g: &BipartiteMultigraph| f(g) * &c)
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// A deterministic pseudo-random integer function with values in `0..levels`,
/// obtained by hashing the graph's slot array with `seed`.
pub fn hashed(seed: u64, levels: u64) -> SimpleFn {
    let levels = levels.max(1);
    Arc::new(move |g: &BipartiteMultigraph| {
        let h = g.slots().iter().fold(splitmix(seed), |acc, &s| splitmix(acc ^ s as u64));
        rat((h % levels) as i64)
    })
}

/// A function given by a table of values, zero off the table.
pub fn table(values: HashMap<BipartiteMultigraph, BigRational>) -> SimpleFn {
    Arc::new(move |g: &BipartiteMultigraph| values.get(g).cloned().unwrap_or_else(BigRational::zero))
}

/// The cells `T^1, …, T^𝔫` and the level set `W ⊆ {0, …, nd}` defining the field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianFieldSpec {
    pub n: usize,
    pub d: usize,
    pub nhat: usize,
    /// Cell of entry `(i, j)` at index `i·n + j`, or `None` if the entry is in no cell.
    pub cell_of: Vec<Option<usize>>,
    /// `w[s]` is true iff `s ∈ W`.
    pub w: Vec<bool>,
}

impl GaussianFieldSpec {
    /// Builds a spec with `𝔫 = ⌈n/d⌉` cells, checking shapes and cell indices.
    pub fn new(n: usize, d: usize, cell_of: Vec<Option<usize>>, w: Vec<bool>) -> Result<Self> {
        let nhat = Params::new(n, d).nhat;
        if cell_of.len() != n * n {
            return Err(Error::ShapeMismatch(format!("expected {} cell labels", n * n)));
        }
        if w.len() != n * d + 1 {
            return Err(Error::ShapeMismatch(format!("expected {} level flags", n * d + 1)));
        }
        if let Some(bad) = cell_of.iter().flatten().find(|&&c| c >= nhat) {
            return Err(Error::InvalidParameter(format!("cell {bad} out of range 0..{nhat}")));
        }
        Ok(GaussianFieldSpec { n, d, nhat, cell_of, w })
    }

    /// Draws a spec from the product measure: every entry gets a uniform cell and
    /// every level is in `W` independently with probability one half.
    pub fn sample<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Self {
        let nhat = Params::new(n, d).nhat;
        let cell_of = (0..n * n).map(|_| Some(rng.random_range(0..nhat))).collect();
        let w = (0..=n * d).map(|_| rng.random_bool(0.5)).collect();
        GaussianFieldSpec { n, d, nhat, cell_of, w }
    }

    /// The entries of each cell.
    pub fn cells(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.nhat];
        for (idx, c) in self.cell_of.iter().enumerate() {
            if let Some(c) = c {
                out[*c].push((idx / self.n, idx % self.n));
            }
        }
        out
    }

    /// Per cell, whether the total multiplicity of `g` over the cell lies in `W`.
    pub fn indicators(&self, g: &BipartiteMultigraph) -> Vec<bool> {
        let mut sums = vec![0usize; self.nhat];
        for (i, j, m) in g.edges() {
            if let Some(c) = self.cell_of[i * self.n + j] {
                sums[c] += m as usize;
            }
        }
        sums.into_iter().map(|s| self.w.get(s).copied().unwrap_or(false)).collect()
    }
}

/// The `2𝔫` independent standard normals driving the field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub g: Vec<f64>,
    pub g_tilde: Vec<f64>,
}

impl FieldSample {
    pub fn draw<R: Rng + ?Sized>(spec: &GaussianFieldSpec, rng: &mut R) -> Self {
        let g = (0..spec.nhat).map(|_| rng.sample(StandardNormal)).collect();
        let g_tilde = (0..spec.nhat).map(|_| rng.sample(StandardNormal)).collect();
        FieldSample { g, g_tilde }
    }
}

/// `ξ_G = 𝔫^{-1/2} Σ_ℓ (g^ℓ 1[ℓ-sum ∈ W] + g̃^ℓ 1[ℓ-sum ∉ W])`.
pub fn field_value(spec: &GaussianFieldSpec, sample: &FieldSample, g: &BipartiteMultigraph) -> f64 {
    let total: f64 = spec
        .indicators(g)
        .iter()
        .enumerate()
        .map(|(l, &inside)| if inside { sample.g[l] } else { sample.g_tilde[l] })
        .sum();
    total / (spec.nhat as f64).sqrt()
}

/// `Cov(ξ_{G1}, ξ_{G2})`: the fraction of cells on which the two indicators agree.
pub fn field_covariance(spec: &GaussianFieldSpec, g1: &BipartiteMultigraph, g2: &BipartiteMultigraph) -> BigRational {
    let agree = spec.indicators(g1).iter().zip(spec.indicators(g2)).filter(|(a, b)| **a == *b).count();
    BigRational::new(BigInt::from(agree), BigInt::from(spec.nhat))
}

/// The s-neighbourhood statistics of one multigraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnStats {
    pub size: usize,
    /// Average of `f` over the s-neighbourhood.
    pub h: BigRational,
    /// Mean squared deviation of `f` from `h` over the s-neighbourhood.
    pub w: BigRational,
}

/// How the blow-up condition was evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowUp {
    pub holds: bool,
    /// `Σ_{R×R} π_u π_u (f' − f'')²`.
    pub lhs: f64,
    pub var: f64,
    /// Exact values when the space was enumerated.
    pub exact: Option<(BigRational, BigRational)>,
}

/// The simple-graph mass under the configuration model used for rescaling.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleMass {
    pub value: f64,
    pub exact: Option<BigRational>,
}

impl SimpleMass {
    /// `"exact"` or `"midpoint"`.
    pub fn mode(&self) -> &'static str {
        if self.exact.is_some() {
            "exact"
        } else {
            "midpoint"
        }
    }
}

/// Everything needed to evaluate the extension of one function.
pub struct ExtensionContext {
    pub n: usize,
    pub d: usize,
    /// Anti-expansion threshold defining the set `R`.
    pub z: usize,
    /// Largest category receiving the field branch.
    pub mhat: usize,
    f: SimpleFn,
    /// `E_{π_u} f`, exact in enumerated mode and a sample average otherwise.
    pub mean: BigRational,
    pub blow_up: BlowUp,
    pub simple_mass: SimpleMass,
    /// Enumerated simple graphs, if the space was enumerated.
    pub space: Option<Vec<BipartiteMultigraph>>,
    cache: Mutex<HashMap<BipartiteMultigraph, Option<SnStats>>>,
}

impl fmt::Debug for ExtensionContext {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("ExtensionContext")
            .field("n", &self.n)
            .field("d", &self.d)
            .field("z", &self.z)
            .field("mhat", &self.mhat)
            .field("mean", &self.mean)
            .field("blow_up", &self.blow_up)
            .field("simple_mass", &self.simple_mass)
            .finish()
    }
}

/// `Σ_{a,b ∈ S} (f_a − f_b)² = 2(|S| Σ f² − (Σ f)²)`.
fn pair_square_sum(values: &[&BigRational]) -> BigRational {
    let s1: BigRational = values.iter().copied().sum();
    let s2: BigRational = values.iter().map(|v| *v * *v).sum();
    (rat(values.len() as i64) * s2 - &s1 * &s1) * rat(2)
}

fn threshold() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(128))
}

impl ExtensionContext {
    /// Enumerates the simple graphs and evaluates the mean, the blow-up condition and the
    /// simple mass exactly, using the default threshold `z`.
    pub fn exact(n: usize, d: usize, f: SimpleFn, cap: usize) -> Result<Self> {
        Self::exact_with_z(n, d, f, Params::new(n, d).z, cap)
    }

    /// As [`ExtensionContext::exact`] with an explicit threshold `z`.
    pub fn exact_with_z(n: usize, d: usize, f: SimpleFn, z: usize, cap: usize) -> Result<Self> {
        let space = enumerate_graphs(n, d, true, cap)?;
        if space.is_empty() {
            return Err(Error::InvalidParameter(format!("no simple {d}-regular bipartite graphs on n={n}")));
        }
        let values: Vec<BigRational> = space.iter().map(|g| f(g)).collect();
        let in_set: Vec<bool> = space.iter().map(|g| in_r(g, z)).collect::<Result<_>>()?;
        let size = rat(space.len() as i64);
        let mean = values.iter().sum::<BigRational>() / &size;
        let all: Vec<&BigRational> = values.iter().collect();
        let inside: Vec<&BigRational> = values.iter().zip(&in_set).filter(|(_, &r)| r).map(|(v, _)| v).collect();
        let norm = &size * &size;
        let var = pair_square_sum(&all) / (&norm * rat(2));
        let lhs = pair_square_sum(&inside) / &norm;
        let holds = lhs >= &var * threshold();
        let mass = space.iter().map(pi_bc).sum::<BigRational>();
        Ok(ExtensionContext {
            n,
            d,
            z,
            mhat: Params::new(n, d).mhat,
            f,
            mean,
            blow_up: BlowUp { holds, lhs: to_f64(&lhs), var: to_f64(&var), exact: Some((lhs, var)) },
            simple_mass: SimpleMass { value: to_f64(&mass), exact: Some(mass) },
            space: Some(space),
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Estimates the mean and the blow-up condition from `samples` uniform simple graphs
    /// and uses the midpoint `e^{-(d-1)²/2}` for the simple mass.
    pub fn sampled<R: Rng + ?Sized>(n: usize, d: usize, f: SimpleFn, samples: usize, rng: &mut R) -> Result<Self> {
        Self::sampled_with_z(n, d, f, Params::new(n, d).z, samples, rng)
    }

    /// As [`ExtensionContext::sampled`] with an explicit threshold `z`.
    pub fn sampled_with_z<R: Rng + ?Sized>(
        n: usize,
        d: usize,
        f: SimpleFn,
        z: usize,
        samples: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if samples < 2 || d > n {
            return Err(Error::InvalidParameter("need at least two samples and d ≤ n".into()));
        }
        let mut values = Vec::with_capacity(samples);
        let mut in_set = Vec::with_capacity(samples);
        for _ in 0..samples {
            let g = sample_uniform_simple(n, d, rng);
            values.push(f(&g));
            in_set.push(in_r(&g, z)?);
        }
        let m = rat(samples as i64);
        let mean = values.iter().sum::<BigRational>() / &m;
        let all: Vec<&BigRational> = values.iter().collect();
        let inside: Vec<&BigRational> = values.iter().zip(&in_set).filter(|(_, &r)| r).map(|(v, _)| v).collect();
        let pairs = &m * (&m - rat(1));
        let var = pair_square_sum(&all) / (&pairs * rat(2));
        let lhs = pair_square_sum(&inside) / &pairs;
        let holds = lhs >= &var * threshold();
        Ok(ExtensionContext {
            n,
            d,
            z,
            mhat: Params::new(n, d).mhat,
            f,
            mean,
            blow_up: BlowUp { holds, lhs: to_f64(&lhs), var: to_f64(&var), exact: None },
            simple_mass: SimpleMass { value: (-((d as f64 - 1.0).powi(2)) / 2.0).exp(), exact: None },
            space: None,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// `f(g)` for a simple graph `g`.
    pub fn f(&self, g: &BipartiteMultigraph) -> BigRational {
        (self.f)(g)
    }

    /// The s-neighbourhood statistics of `g`, or `None` if its s-neighbourhood is empty.
    pub fn sn_stats(&self, g: &BipartiteMultigraph) -> Result<Option<SnStats>> {
        if let Some(hit) = self.cache.lock().expect("cache lock").get(g) {
            return Ok(hit.clone());
        }
        let size = sn_size(g)?;
        if size > SN_CAP {
            return Err(Error::TooLargeToEnumerate { estimate: size as f64, cap: SN_CAP as usize });
        }
        let stats = if size == 0 {
            None
        } else {
            let values: Vec<BigRational> = sn_endpoints(g)?.iter().map(|s| self.f(s)).collect();
            let k = rat(values.len() as i64);
            let h = values.iter().sum::<BigRational>() / &k;
            let w = values.iter().map(|v| (v - &h) * (v - &h)).sum::<BigRational>() / &k;
            Some(SnStats { size: values.len(), h, w })
        };
        self.cache.lock().expect("cache lock").insert(g.clone(), stats.clone());
        Ok(stats)
    }

    fn check_shape(&self, g: &BipartiteMultigraph) -> Result<()> {
        if g.n() != self.n || g.d() != self.d {
            return Err(Error::ShapeMismatch(format!("expected a graph with n={}, d={}", self.n, self.d)));
        }
        Ok(())
    }

    fn categorized(&self, g: &BipartiteMultigraph) -> bool {
        matches!(classify(g), Category::Category(k) if k <= self.mhat)
    }
}

/// Which rule of the extension produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    /// Simple graph, blow-up condition holds: `f(G)`.
    Keep,
    /// Simple graph in `R`, blow-up condition fails: `f(G)`.
    KeepInR,
    /// Simple graph outside `R`, blow-up condition fails: rescaled around the mean.
    Rescale,
    /// Category in `[1, 𝔪]`: `h(G) + ξ_G √w(G)`.
    Field,
    /// Any other multigraph: the mean of `f`.
    Mean,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Branch::Keep => "keep",
            Branch::KeepInR => "keep-r",
            Branch::Rescale => "rescale",
            Branch::Field => "field",
            Branch::Mean => "mean",
        };
        f.write_str(s)
    }
}

/// An extended value `base + fluct`, where `base` is exact and `fluct` carries the
/// square roots and the Gaussian factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Extended {
    pub branch: Branch,
    pub base: BigRational,
    pub fluct: f64,
    pub h: Option<BigRational>,
    pub w: Option<BigRational>,
    pub xi: f64,
}

impl Extended {
    pub fn value(&self) -> f64 {
        to_f64(&self.base) + self.fluct
    }
}

fn extend_inner(
    ctx: &ExtensionContext,
    spec: &GaussianFieldSpec,
    sample: &FieldSample,
    g: &BipartiteMultigraph,
    force_keep: bool,
) -> Result<Extended> {
    ctx.check_shape(g)?;
    let xi = field_value(spec, sample, g);
    let plain = |branch: Branch, base: BigRational| Extended { branch, base, fluct: 0.0, h: None, w: None, xi };
    if g.is_simple() {
        let fg = ctx.f(g);
        if force_keep || ctx.blow_up.holds {
            return Ok(plain(Branch::Keep, fg));
        }
        if in_r(g, ctx.z)? {
            return Ok(plain(Branch::KeepInR, fg));
        }
        let fluct = to_f64(&(&fg - &ctx.mean)) / ctx.simple_mass.value.sqrt();
        return Ok(Extended { fluct, ..plain(Branch::Rescale, ctx.mean.clone()) });
    }
    if ctx.categorized(g) {
        if let Some(st) = ctx.sn_stats(g)? {
            let fluct = xi * to_f64(&st.w).sqrt();
            return Ok(Extended { branch: Branch::Field, base: st.h.clone(), fluct, h: Some(st.h), w: Some(st.w), xi });
        }
    }
    Ok(plain(Branch::Mean, ctx.mean.clone()))
}

/// The randomized extension `f̃(G)`.
pub fn extend(ctx: &ExtensionContext, spec: &GaussianFieldSpec, sample: &FieldSample, g: &BipartiteMultigraph) -> Result<Extended> {
    extend_inner(ctx, spec, sample, g, false)
}

/// The variant `f̂` that agrees with `f` on every simple graph and with `f̃` elsewhere.
pub fn extend_hat(
    ctx: &ExtensionContext,
    spec: &GaussianFieldSpec,
    sample: &FieldSample,
    g: &BipartiteMultigraph,
) -> Result<Extended> {
    extend_inner(ctx, spec, sample, g, true)
}

fn field_stats(ctx: &ExtensionContext, g: &BipartiteMultigraph) -> Result<SnStats> {
    ctx.check_shape(g)?;
    if !ctx.categorized(g) {
        return Err(Error::PreconditionNotMet(format!("graph is not of category in [1, {}]", ctx.mhat)));
    }
    ctx.sn_stats(g)?.ok_or_else(|| Error::PreconditionNotMet("empty s-neighbourhood".into()))
}

/// The indicator `η_{G1,G2}`: `ξ1 Δh ≥ 0`, `−ξ2 Δh ≥ 0`, `ξ1` and `−ξ2` of the same
/// sign, and `|ξ1|, |ξ2| ≥ 1`, where `Δh = h(G1) − h(G2)`.
pub fn eta(
    ctx: &ExtensionContext,
    spec: &GaussianFieldSpec,
    sample: &FieldSample,
    g1: &BipartiteMultigraph,
    g2: &BipartiteMultigraph,
) -> Result<bool> {
    let (s1, s2) = (field_stats(ctx, g1)?, field_stats(ctx, g2)?);
    let (x1, x2) = (field_value(spec, sample, g1), field_value(spec, sample, g2));
    let dh = (&s1.h - &s2.h).signum();
    let dh = to_f64(&dh);
    Ok(x1 * dh >= 0.0 && -x2 * dh >= 0.0 && x1 * -x2 > 0.0 && x1.abs() >= 1.0 && x2.abs() >= 1.0)
}

/// `(|SN1| |SN2|)^{-1} Σ_{G' ∈ SN1, G'' ∈ SN2} (f(G') − f(G''))²`, by direct double sum.
pub fn cross_mean_square(ctx: &ExtensionContext, g1: &BipartiteMultigraph, g2: &BipartiteMultigraph) -> Result<BigRational> {
    let a: Vec<BigRational> = sn_endpoints(g1)?.iter().map(|g| ctx.f(g)).collect();
    let b: Vec<BigRational> = sn_endpoints(g2)?.iter().map(|g| ctx.f(g)).collect();
    if a.is_empty() || b.is_empty() {
        return Err(Error::PreconditionNotMet("empty s-neighbourhood".into()));
    }
    let total: BigRational = a.iter().flat_map(|x| b.iter().map(move |y| (x - y) * (x - y))).sum();
    Ok(total / rat((a.len() * b.len()) as i64))
}

/// Both sides of the variation bound for one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationReport {
    pub eta: bool,
    /// `(f̃(G1) − f̃(G2))²`.
    pub lhs: f64,
    /// `η / 3 · cross_mean_square`.
    pub rhs: BigRational,
    pub holds: bool,
}

/// Evaluates `(f̃(G1) − f̃(G2))² ≥ η/(3|SN1||SN2|) ΣΣ (f(G') − f(G''))²`.
pub fn variation_bound_check(
    ctx: &ExtensionContext,
    spec: &GaussianFieldSpec,
    sample: &FieldSample,
    g1: &BipartiteMultigraph,
    g2: &BipartiteMultigraph,
) -> Result<VariationReport> {
    let e = eta(ctx, spec, sample, g1, g2)?;
    let v1 = extend(ctx, spec, sample, g1)?;
    let v2 = extend(ctx, spec, sample, g2)?;
    let diff = to_f64(&(&v1.base - &v2.base)) + (v1.fluct - v2.fluct);
    let lhs = diff * diff;
    let rhs = if e { cross_mean_square(ctx, g1, g2)? / rat(3) } else { BigRational::zero() };
    Ok(VariationReport { eta: e, lhs, holds: lhs >= to_f64(&rhs), rhs })
}

/// Fraction of `trials` fresh field samples on which `η_{G1,G2} = 1`.
pub fn eta_frequency<R: Rng + ?Sized>(
    ctx: &ExtensionContext,
    spec: &GaussianFieldSpec,
    g1: &BipartiteMultigraph,
    g2: &BipartiteMultigraph,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    let mut hits = 0usize;
    for _ in 0..trials {
        let s = FieldSample::draw(spec, rng);
        if eta(ctx, spec, &s, g1, g2)? {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials.max(1) as f64)
}

/// The two sides of the small-mass bound on `R` for a centered function.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMeanReport {
    /// `Σ_R π_u f²`.
    pub inside: BigRational,
    /// `Σ_{R^c} π_u f²`.
    pub outside: BigRational,
    /// `π_u(R^c)`.
    pub outside_mass: BigRational,
    /// `(1 − 2^{-7} − 2q) inside ≤ (2^{-7} + 2q) outside`, valid for every `q`.
    pub general_holds: bool,
    /// Whether `q ≤ 2^{-9}`, under which the sharp form is claimed.
    pub small_mass: bool,
    /// `inside ≤ 2^{-6} outside`.
    pub sharp_holds: bool,
}

impl ZeroMeanReport {
    /// The general form holds, and the sharp form holds whenever `q ≤ 2^{-9}`.
    pub fn passed(&self) -> bool {
        self.general_holds && (!self.small_mass || self.sharp_holds)
    }
}

/// Checks the small-mass bound on `R` for a centered `f` whose blow-up condition fails.
///
/// A function of zero variance is reported as passing without further checks.
pub fn zero_mean_lemma_check(ctx: &ExtensionContext) -> Result<ZeroMeanReport> {
    let space = ctx
        .space
        .as_ref()
        .ok_or_else(|| Error::PreconditionNotMet("the simple graphs must be enumerated".into()))?;
    if !ctx.mean.is_zero() {
        return Err(Error::PreconditionNotMet(format!("mean is {}, not zero", ctx.mean)));
    }
    let (_, var) = ctx.blow_up.exact.as_ref().expect("enumerated context has exact blow-up values");
    let size = rat(space.len() as i64);
    let mut inside = BigRational::zero();
    let mut outside = BigRational::zero();
    let mut out_count = 0i64;
    for g in space {
        let v = ctx.f(g);
        if in_r(g, ctx.z)? {
            inside += &v * &v;
        } else {
            outside += &v * &v;
            out_count += 1;
        }
    }
    let (inside, outside) = (inside / &size, outside / &size);
    let q = rat(out_count) / &size;
    if var.is_zero() {
        return Ok(ZeroMeanReport {
            inside,
            outside,
            outside_mass: q,
            general_holds: true,
            small_mass: false,
            sharp_holds: true,
        });
    }
    if ctx.blow_up.holds {
        return Err(Error::PreconditionNotMet("the blow-up condition holds".into()));
    }
    let eps = threshold();
    let two_q = &q * rat(2);
    let general_holds = (rat(1) - &eps - &two_q) * &inside <= (&eps + &two_q) * &outside;
    let small_mass = q <= BigRational::new(BigInt::one(), BigInt::from(512));
    let sharp_holds = &inside * rat(64) <= outside;
    Ok(ZeroMeanReport { inside, outside, outside_mass: q, general_holds, small_mass, sharp_holds })
}
