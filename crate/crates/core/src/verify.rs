//! Named verification suites over enumerated or sampled instances.
//!
//! Each suite runs exhaustively when the multigraph space at `(n, d)` fits
//! under the enumeration cap and on `trials` random instances otherwise.

use crate::config::{pi_bc, sample_uniform_simple};
use crate::connections::{anchored_pair, build_path_large, build_path_small, Anchors, LargeCase, RowGraph};
use crate::enumerate::enumerate_graphs;
use crate::error::{Error, Result};
use crate::graph::{classify, BipartiteMultigraph, Category, Params};
use crate::kernels::{switch_between, SwitchOp};
use crate::matching::{construct_perfect_pair, find_source_pair, perfect_partners, plant_multiedges, psi, PerfectPair};
use crate::neighborhoods::{
    ae_report, count_reverse, enumerate_sn, reconstruct_path, reverse_bounds, sample_sn, sn_bounds, sn_size,
};
use crate::spectral::{LiftSetup, StateSpace};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

/// The available suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Every simple path is recovered from its endpoint.
    SnUniqueness,
    /// s-neighbourhood sizes lie between their lower and upper bounds.
    SnSize,
    /// Anti-expansion jumps and monotone-neighbour counts.
    AntiExpansion,
    /// Number of s-neighbourhoods containing a simple graph.
    ReverseCount,
    /// The perfect-pair matching is a distance-one bijection with a two-sided inverse.
    Matching,
    /// At most one perfect partner sends a given graph to a given image.
    SourceUniqueness,
    /// Short switching paths between graphs on few left vertices.
    ShortPaths,
    /// Anchored switching paths and their length bound.
    LongPaths,
    /// Exact detailed balance of both chains.
    Reversibility,
    /// Exact identities of the configuration-model lift.
    Lift,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::SnUniqueness,
        Suite::SnSize,
        Suite::AntiExpansion,
        Suite::ReverseCount,
        Suite::Matching,
        Suite::SourceUniqueness,
        Suite::ShortPaths,
        Suite::LongPaths,
        Suite::Reversibility,
        Suite::Lift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::SnUniqueness => "sn-uniqueness",
            Suite::SnSize => "sn-size",
            Suite::AntiExpansion => "anti-expansion",
            Suite::ReverseCount => "reverse-count",
            Suite::Matching => "matching",
            Suite::SourceUniqueness => "source-uniqueness",
            Suite::ShortPaths => "short-paths",
            Suite::LongPaths => "long-paths",
            Suite::Reversibility => "reversibility",
            Suite::Lift => "lift",
        }
    }

    /// `(n, d)` used when the caller gives none.
    pub fn default_size(self) -> (usize, usize) {
        match self {
            Suite::Matching | Suite::SourceUniqueness | Suite::ShortPaths | Suite::LongPaths => (12, 3),
            _ => (3, 2),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

/// Inputs of a suite run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    /// Number of random instances when the space is not enumerated.
    pub trials: usize,
    pub cap: usize,
    /// Largest category of sampled multigraphs and constructed perfect pairs; suite defaults when `None`.
    pub k_max: Option<usize>,
}

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SuiteReport {
    pub suite: String,
    /// `exhaustive` or `sampled`.
    pub mode: &'static str,
    pub instances: usize,
    pub checks: usize,
    /// At most [`MAX_LISTED_FAILURES`] failure descriptions.
    pub failures: Vec<String>,
    pub failure_count: usize,
    pub notes: Vec<String>,
}

/// Failures beyond this many are counted but not described.
pub const MAX_LISTED_FAILURES: usize = 20;

impl SuiteReport {
    fn new(suite: Suite, mode: &'static str) -> Self {
        SuiteReport {
            suite: suite.name().to_string(),
            mode,
            instances: 0,
            checks: 0,
            failures: Vec::new(),
            failure_count: 0,
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(what());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

/// Runs `suite` under `cfg`.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    if cfg.d == 0 || cfg.n < cfg.d {
        return Err(Error::InvalidParameter(format!("need 1 ≤ d ≤ n, got n={}, d={}", cfg.n, cfg.d)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match suite {
        Suite::SnUniqueness => sn_uniqueness(cfg, &mut rng),
        Suite::SnSize => sn_size_suite(cfg, &mut rng),
        Suite::AntiExpansion => anti_expansion(cfg, &mut rng),
        Suite::ReverseCount => reverse_count(cfg, &mut rng),
        Suite::Matching => matching(cfg, &mut rng),
        Suite::SourceUniqueness => source_uniqueness(cfg, &mut rng),
        Suite::ShortPaths => short_paths(cfg, &mut rng),
        Suite::LongPaths => long_paths(cfg, &mut rng),
        Suite::Reversibility => reversibility(cfg),
        Suite::Lift => lift(cfg, &mut rng),
    }
}

/// The multigraph space when it fits under the cap.
fn enumerable(cfg: &VerifyConfig) -> Option<Vec<BipartiteMultigraph>> {
    enumerate_graphs(cfg.n, cfg.d, false, cfg.cap).ok()
}

fn categorized(space: &[BipartiteMultigraph], mhat: usize) -> Vec<BipartiteMultigraph> {
    space
        .iter()
        .filter(|g| matches!(classify(g), Category::Category(k) if k <= mhat))
        .cloned()
        .collect()
}

/// A category-`k` multigraph with `k` uniform in `1..=k_max`, planted on a uniform simple graph.
fn sample_categorized<R: Rng + ?Sized>(n: usize, d: usize, k_max: usize, rng: &mut R) -> Result<BipartiteMultigraph> {
    for _ in 0..1000 {
        let k = rng.random_range(1..=k_max.max(1));
        let g = sample_uniform_simple(n, d, rng);
        if let Some(h) = plant_multiedges(&g, k, rng) {
            return Ok(h);
        }
    }
    Err(Error::Construction(format!("could not plant double edges at n={n}, d={d}")))
}

/// Largest category sampled when every path from the instance is enumerated.
const ENUMERATED_K_MAX: usize = 2;

/// Largest category sampled when only random paths are drawn.
const SAMPLED_K_MAX: usize = 4;

fn sn_uniqueness<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> Result<SuiteReport> {
    let mhat = Params::new(cfg.n, cfg.d).mhat;
    let (mode, instances) = match enumerable(cfg) {
        Some(space) => ("exhaustive", categorized(&space, mhat)),
        None => {
            let k_max = mhat.min(cfg.k_max.unwrap_or(ENUMERATED_K_MAX));
            ("sampled", (0..cfg.trials).map(|_| sample_categorized(cfg.n, cfg.d, k_max, rng)).collect::<Result<_>>()?)
        }
    };
    let mut rep = SuiteReport::new(Suite::SnUniqueness, mode);
    for gp in &instances {
        rep.instances += 1;
        let paths = enumerate_sn(gp)?;
        let mut ends = HashSet::new();
        for p in &paths {
            rep.check(ends.insert(p.end.clone()), || format!("two simple paths from {gp:?} end at {:?}", p.end));
            let back = reconstruct_path(gp, &p.end);
            rep.check(back.as_ref() == Ok(p), || format!("reconstruction differs for the path {:?}", p.ops));
        }
    }
    if mode == "sampled" {
        let k_max = mhat.min(cfg.k_max.unwrap_or(SAMPLED_K_MAX));
        for _ in 0..cfg.trials {
            let gp = sample_categorized(cfg.n, cfg.d, k_max, rng)?;
            rep.instances += 1;
            if let Some(p) = sample_sn(&gp, rng, 1000)? {
                let back = reconstruct_path(&gp, &p.end);
                rep.check(back.as_ref() == Ok(&p), || format!("reconstruction differs for the path {:?}", p.ops));
            }
        }
    }
    Ok(rep)
}

fn sn_size_suite<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> Result<SuiteReport> {
    let mhat = Params::new(cfg.n, cfg.d).mhat;
    let (mode, instances) = match enumerable(cfg) {
        Some(space) => ("exhaustive", categorized(&space, mhat)),
        None => {
            let k_max = mhat.min(cfg.k_max.unwrap_or(ENUMERATED_K_MAX));
            ("sampled", (0..cfg.trials).map(|_| sample_categorized(cfg.n, cfg.d, k_max, rng)).collect::<Result<_>>()?)
        }
    };
    let mut rep = SuiteReport::new(Suite::SnSize, mode);
    for gp in &instances {
        rep.instances += 1;
        let k = gp.multiedges().len();
        let size = BigInt::from(sn_size(gp)?);
        let (lo, hi) = sn_bounds(cfg.n, cfg.d, k);
        rep.check(size <= hi, || format!("|SN| = {size} above {hi} for {gp:?}"));
        if let Some(lo) = lo {
            rep.check(size >= lo, || format!("|SN| = {size} below {lo} for {gp:?}"));
        }
    }
    Ok(rep)
}

fn simple_instances<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> (&'static str, Vec<BipartiteMultigraph>) {
    match enumerate_graphs(cfg.n, cfg.d, true, cfg.cap) {
        Ok(space) => ("exhaustive", space),
        Err(_) => ("sampled", (0..cfg.trials).map(|_| sample_uniform_simple(cfg.n, cfg.d, rng)).collect()),
    }
}

fn anti_expansion<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> Result<SuiteReport> {
    let (mode, graphs) = simple_instances(cfg, rng);
    let mut rep = SuiteReport::new(Suite::AntiExpansion, mode);
    let mut max_z = 0;
    for g in &graphs {
        rep.instances += 1;
        let r = ae_report(g)?;
        max_z = max_z.max(r.z);
        rep.check(r.jump_violations == 0, || format!("{} neighbours jump by more than 2d² from {g:?}", r.jump_violations));
        rep.check(r.decreasing_bound_holds, || format!("too few decreasing neighbours: {r:?}"));
        rep.check(r.increasing_bound_holds, || format!("too many increasing neighbours: {r:?}"));
    }
    rep.notes.push(format!("largest anti-expansion seen: {max_z}"));
    Ok(rep)
}

/// Largest category whose reverse count is checked on sampled graphs.
const REVERSE_K_MAX_SAMPLED: usize = 1;

fn reverse_count<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> Result<SuiteReport> {
    let mhat = Params::new(cfg.n, cfg.d).mhat;
    let (mode, graphs) = simple_instances(cfg, rng);
    let mut rep = SuiteReport::new(Suite::ReverseCount, mode);
    let space = enumerable(cfg);
    let k_max = match (cfg.k_max, &space) {
        (Some(k), _) => k.min(mhat),
        (None, Some(_)) => mhat.min(cfg.n / 2).max(1),
        (None, None) => REVERSE_K_MAX_SAMPLED,
    };
    let mut seen = HashSet::new();
    for g in &graphs {
        rep.instances += 1;
        for k in 1..=k_max {
            let count = count_reverse(g, k)?;
            let (lo, hi) = reverse_bounds(g, k)?;
            let c = BigRational::from_integer(BigInt::from(count));
            rep.check(c >= lo && c <= BigRational::from_integer(hi.clone()), || {
                format!("{count} outside [{lo}, {hi}] at k={k} for {g:?}")
            });
            if let Some(space) = &space {
                let forward = space
                    .iter()
                    .filter(|h| classify(h) == Category::Category(k))
                    .filter(|h| reconstruct_path(h, g).is_ok())
                    .count();
                rep.check(forward == count, || format!("reverse count {count} but forward scan {forward} at k={k}"));
            }
            seen.insert((k, count));
        }
    }
    let mut seen: Vec<_> = seen.into_iter().collect();
    seen.sort();
    rep.notes.push(format!("(k, count) values: {seen:?}"));
    Ok(rep)
}

/// Default largest category of the constructed perfect pairs.
const PAIR_K_MAX: usize = 2;

/// Perfect pairs with categories cycling through `1..=k_max`.
fn perfect_pairs<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> Result<Vec<(usize, PerfectPair)>> {
    let k_max = Params::new(cfg.n, cfg.d).mhat.min(cfg.k_max.unwrap_or(PAIR_K_MAX)).max(1);
    (0..cfg.trials)
        .map(|t| {
            let k = 1 + t % k_max;
            construct_perfect_pair(cfg.n, cfg.d, k, rng).map(|p| (k, p))
        })
        .collect()
}

fn matching<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Matching, "sampled");
    let mut by_k: std::collections::BTreeMap<usize, [usize; 3]> = std::collections::BTreeMap::new();
    for (k, pair) in perfect_pairs(cfg, rng)? {
        rep.instances += 1;
        let before = rep.failure_count;
        let s1 = enumerate_sn(&pair.g1)?;
        let s2: HashSet<BipartiteMultigraph> = enumerate_sn(&pair.g2)?.into_iter().map(|p| p.end).collect();
        let sizes_agree = s1.len() == s2.len();
        rep.check(sizes_agree, || format!("k={k}: |SN(G1)| = {} but |SN(G2)| = {}", s1.len(), s2.len()));
        let rev = pair.reversed();
        let mut images = HashSet::new();
        for p in &s1 {
            let g = &p.end;
            let h = match psi(&pair, g) {
                Ok(h) => h,
                Err(e) => {
                    rep.check(false, || format!("k={k}: ψ failed on {g:?}: {e}"));
                    continue;
                }
            };
            rep.check(s2.contains(&h), || format!("k={k}: ψ({g:?}) lies outside SN(G2)"));
            rep.check(switch_between(g, &h).is_some(), || format!("k={k}: ψ({g:?}) is not one switching away"));
            rep.check(psi(&rev, &h).as_ref() == Ok(g), || format!("k={k}: the reverse matching does not return {g:?}"));
            rep.check(images.insert(h.clone()), || format!("k={k}: ψ is not injective at {h:?}"));
        }
        for h in &s2 {
            let back = psi(&rev, h);
            rep.check(back.as_ref().map(|g| psi(&pair, g).as_ref() == Ok(h)).unwrap_or(false), || {
                format!("k={k}: ψ∘ψ⁻¹ differs from the identity at {h:?}")
            });
        }
        let e = by_k.entry(k).or_default();
        e[0] += 1;
        e[1] += usize::from(rep.failure_count > before);
        e[2] += usize::from(!sizes_agree);
    }
    for (k, [pairs, broken, mismatched]) in by_k {
        rep.notes.push(format!("k={k}: {pairs} pairs, {broken} with a failed check, {mismatched} with |SN(G1)| ≠ |SN(G2)|"));
    }
    Ok(rep)
}

fn source_uniqueness<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::SourceUniqueness, "sampled");
    for (_, pair) in perfect_pairs(cfg, rng)? {
        rep.instances += 1;
        let partners = perfect_partners(&pair.g1);
        for p in enumerate_sn(&pair.g1)? {
            let g = &p.end;
            let Ok(h) = psi(&pair, g) else { continue };
            let matches: Vec<&BipartiteMultigraph> =
                partners.iter().filter(|q| psi(q, g).ok().as_ref() == Some(&h)).map(|q| &q.g2).collect();
            rep.check(matches == [&pair.g2], || format!("{} perfect partners send {g:?} to {h:?}", matches.len()));
            let found = find_source_pair(&pair.g1, g, &h);
            rep.check(found.as_ref() == Some(&pair.g2), || format!("inversion of the matching cases gives {found:?}"));
        }
    }
    Ok(rep)
}

/// `m` rows of `d` distinct columns out of `0..cols`.
pub fn random_row_graph<R: Rng + ?Sized>(m: usize, cols: usize, d: usize, rng: &mut R) -> RowGraph {
    let mut all: Vec<usize> = (0..cols).collect();
    let rows = (0..m)
        .map(|_| {
            all.shuffle(rng);
            let mut r = all[..d].to_vec();
            r.sort_unstable();
            r
        })
        .collect();
    RowGraph::new(rows).expect("rows hold distinct columns")
}

/// A random walk of `steps` attempted switchings from `h`, keeping only legal ones.
pub fn scramble<R: Rng + ?Sized>(h: &RowGraph, steps: usize, rng: &mut R) -> RowGraph {
    let mut g = h.clone();
    let m = g.m();
    for _ in 0..steps {
        let a = rng.random_range(0..m);
        let b = rng.random_range(0..m);
        let c = g.row(a)[rng.random_range(0..g.row(a).len())];
        let e = g.row(b)[rng.random_range(0..g.row(b).len())];
        let op = SwitchOp::new(a, b, c, e);
        if g.is_legal(op) {
            g.switch(op).expect("legal switching");
        }
    }
    g
}

fn replay(h: &RowGraph, ops: &[SwitchOp]) -> Result<RowGraph> {
    let mut g = h.clone();
    for &op in ops {
        g.switch(op)?;
    }
    Ok(g)
}

fn short_paths<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::ShortPaths, "sampled");
    let cols = cfg.n.max(cfg.d + 3);
    for _ in 0..cfg.trials {
        let m = rng.random_range(2..=6);
        let h1 = random_row_graph(m, cols, cfg.d, rng);
        let h2 = scramble(&h1, 30, rng);
        rep.instances += 1;
        match build_path_small(&h1, &h2) {
            Ok(p) => {
                let k = h1.disc(&h2);
                rep.check(replay(&h1, &p.ops()).as_ref() == Ok(&h2), || format!("path does not reach the target from {h1:?}"));
                rep.check(p.len() <= k + 2, || format!("length {} above k + 2 = {}", p.len(), k + 2));
            }
            Err(e) => rep.check(false, || format!("no path from {h1:?} to {h2:?}: {e}")),
        }
    }
    Ok(rep)
}

type Rows = &'static [&'static [usize]];

/// One instance per subcase of the anchored path construction.
pub const LARGE_FIXTURES: &[(LargeCase, Rows, Rows)] = &[
    (LargeCase::OneA, &[&[4, 7, 9], &[0, 4, 9], &[0, 5, 9], &[0, 1, 9]], &[&[0, 4, 9], &[4, 7, 9], &[0, 5, 9], &[0, 1, 9]]),
    (LargeCase::OneB, &[&[1, 4, 9], &[4, 5, 10], &[2, 9, 10], &[3, 6, 7]], &[&[4, 5, 9], &[1, 4, 10], &[2, 9, 10], &[3, 6, 7]]),
    (LargeCase::OneC, &[&[3, 4, 6], &[1, 3, 9], &[1, 8, 9], &[2, 5, 7]], &[&[3, 6, 8], &[1, 3, 9], &[1, 5, 9], &[2, 4, 7]]),
    (LargeCase::OneD, &[&[0, 4, 8], &[0, 4, 6], &[1, 5, 7], &[2, 3, 6]], &[&[0, 2, 4], &[0, 4, 6], &[1, 5, 7], &[3, 6, 8]]),
    (LargeCase::OneE, &[&[2, 3, 9], &[2, 3, 4], &[0, 1, 7], &[4, 5, 6]], &[&[2, 4, 9], &[2, 3, 4], &[0, 1, 7], &[3, 5, 6]]),
    (LargeCase::OneF, &[&[1, 3, 5], &[0, 4, 6], &[2, 7, 8], &[0, 1, 6]], &[&[1, 5, 6], &[0, 3, 4], &[2, 7, 8], &[0, 1, 6]]),
    (LargeCase::OneG, &[&[1, 2, 8], &[6, 10, 11], &[2, 6, 8], &[5, 7, 9]], &[&[1, 2, 11], &[6, 8, 10], &[2, 6, 8], &[5, 7, 9]]),
    (
        LargeCase::TwoA,
        &[&[0, 1, 6], &[0, 2, 6], &[4, 5, 8], &[1, 2, 4], &[0, 4, 5]],
        &[&[0, 1, 6], &[0, 4, 6], &[2, 4, 5], &[1, 2, 8], &[0, 4, 5]],
    ),
    (LargeCase::TwoB, &[&[2, 4, 5], &[0, 3, 8], &[2, 5, 7], &[1, 4, 6]], &[&[2, 4, 7], &[0, 3, 8], &[2, 5, 6], &[1, 4, 5]]),
];

/// The row graph of a fixture.
pub fn fixture_rows(r: Rows) -> RowGraph {
    RowGraph::new(r.iter().map(|x| x.to_vec()).collect()).expect("fixture rows are valid")
}

fn check_large(rep: &mut SuiteReport, h1: &RowGraph, h2: &RowGraph, expected: Option<LargeCase>) {
    let (Some(start), Some(end)) = (anchored_pair(h1, &[]), anchored_pair(h2, &[])) else {
        return;
    };
    rep.instances += 1;
    match build_path_large(h1, h2, Anchors { start, end }) {
        Ok(p) => {
            let k = h1.disc(h2);
            rep.check(replay(h1, &p.ops()).as_ref() == Ok(h2), || format!("path does not reach the target from {h1:?}"));
            rep.check(p.len() <= (3 * k).div_ceil(2), || format!("length {} above ⌈3·{k}/2⌉", p.len()));
            if let Some(case) = expected {
                rep.check(p.steps.first().map(|s| s.case) == Some(case), || format!("fixture {case} took {:?}", p.cases()));
            }
        }
        Err(e) => rep.check(false, || format!("no anchored path from {h1:?} to {h2:?}: {e}")),
    }
}

fn long_paths<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::LongPaths, "sampled");
    for &(case, a, b) in LARGE_FIXTURES {
        check_large(&mut rep, &fixture_rows(a), &fixture_rows(b), Some(case));
    }
    let target = rep.instances + cfg.trials;
    let mut attempts = 0;
    while rep.instances < target && attempts < 50 * cfg.trials.max(1) {
        attempts += 1;
        let m = rng.random_range(4..=7);
        let cols = rng.random_range(m + 3..=cfg.n.max(m + 3));
        let h1 = random_row_graph(m, cols, cfg.d, rng);
        let h2 = scramble(&h1, 30, rng);
        check_large(&mut rep, &h1, &h2, None);
    }
    Ok(rep)
}

fn reversibility(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Reversibility, "exhaustive");
    for simple in [true, false] {
        let space = StateSpace::enumerate(cfg.n, cfg.d, simple, cfg.cap)?;
        let q = space.generator()?;
        rep.instances += space.len();
        for (x, row) in q.off.iter().enumerate() {
            for (y, _) in row {
                let ok = q.check_pair(&space.measure, x, *y);
                rep.check(ok, || format!("detailed balance fails on the {} space between {x} and {y}", space.label()));
            }
        }
        rep.notes.push(format!("{} space: {} states", space.label(), space.len()));
    }
    let masses: Vec<BigRational> = StateSpace::enumerate(cfg.n, cfg.d, false, cfg.cap)?.states.iter().map(pi_bc).collect();
    let total: BigRational = masses.iter().sum();
    rep.check(total == BigRational::from_integer(1.into()), || format!("π_BC sums to {total}"));
    Ok(rep)
}

/// Random functions checked by the lift suite.
pub const LIFT_FUNCTIONS: usize = 100;

fn lift<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> Result<SuiteReport> {
    let setup = LiftSetup::new(cfg.n, cfg.d, cfg.cap)?;
    let chain = setup.space.chain()?;
    let mut rep = SuiteReport::new(Suite::Lift, "exhaustive");
    for _ in 0..LIFT_FUNCTIONS {
        let f: Vec<BigRational> = (0..setup.space.len())
            .map(|_| BigRational::new(rng.random_range(0..=6i64).into(), rng.random_range(1..=3i64).into()))
            .collect();
        rep.instances += 1;
        let r = setup.check(&chain, &f)?;
        rep.check(r.var_lift == r.var_graph, || format!("variance {} vs {}", r.var_lift, r.var_graph));
        rep.check(r.ent_lift.exact_eq(&r.ent_graph), || format!("entropy {} vs {}", r.ent_lift, r.ent_graph));
        rep.check(r.dir_lift == &r.dir_graph * &r.expected_factor, || {
            format!("Dirichlet {} vs {} · {}", r.dir_lift, r.expected_factor, r.dir_graph)
        });
    }
    rep.notes.push(format!("Dirichlet factor {}", BigRational::new(BigInt::from(cfg.n * cfg.d - 1), BigInt::from(cfg.n * cfg.d))));
    Ok(rep)
}
