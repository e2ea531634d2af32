//! The configuration model: stub-matching samples, the exact induced measure
//! `π_BC`, the map from permutations of stubs to multigraphs, and the
//! random-transposition chain on those permutations.

use crate::enumerate::enumerate_graphs;
use crate::error::{Error, Result};
use crate::graph::BipartiteMultigraph;
use crate::kernels::Rate;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::HashMap;

/// `k!` as an arbitrary-precision integer.
pub fn factorial(k: usize) -> BigUint {
    (1..=k as u64).fold(BigUint::one(), |acc, x| acc * x)
}

/// Maps a stub permutation to its multigraph: left stub `a` (owned by left vertex
/// `a / d`) is matched to right stub `perm[a]` (owned by right vertex `perm[a] / d`).
pub fn configuration_to_graph(n: usize, d: usize, perm: &[usize]) -> Result<BipartiteMultigraph> {
    if perm.len() != n * d {
        return Err(Error::ShapeMismatch(format!("permutation must have length {}", n * d)));
    }
    let slots = perm.iter().map(|&p| (p / d) as u32).collect();
    BipartiteMultigraph::from_slots(n, d, slots)
}

/// Draws a multigraph from the configuration model via a uniformly random stub matching.
pub fn sample_configuration<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> BipartiteMultigraph {
    let mut perm: Vec<usize> = (0..n * d).collect();
    perm.shuffle(rng);
    configuration_to_graph(n, d, &perm).expect("a permutation always yields a regular multigraph")
}

/// Draws a uniformly random simple graph by rejection from the configuration model.
pub fn sample_uniform_simple<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> BipartiteMultigraph {
    assert!(d <= n, "no simple d-regular graph exists when d > n");
    loop {
        let g = sample_configuration(n, d, rng);
        if g.is_simple() {
            return g;
        }
    }
}

/// Number of stub permutations mapped to `g`: `(d!)^{2n} / ∏ mult!`.
pub fn fiber_size(g: &BipartiteMultigraph) -> BigUint {
    let num = factorial(g.d()).pow(2 * g.n() as u32);
    let den = g.edges().iter().fold(BigUint::one(), |acc, &(_, _, m)| acc * factorial(m as usize));
    num / den
}

/// Exact configuration-model probability `(d!)^{2n} / ((nd)! ∏ mult!)`.
pub fn pi_bc(g: &BipartiteMultigraph) -> BigRational {
    BigRational::new(BigInt::from(fiber_size(g)), BigInt::from(factorial(g.num_instances())))
}

/// Exact probability that the configuration model produces a simple graph.
pub fn prob_simple_exact(n: usize, d: usize, cap: usize) -> Result<BigRational> {
    let simple = enumerate_graphs(n, d, true, cap)?;
    let per_graph = BigRational::new(
        BigInt::from(factorial(d).pow(2 * n as u32)),
        BigInt::from(factorial(n * d)),
    );
    Ok(per_graph * BigInt::from(simple.len()))
}

/// Monte-Carlo estimate of a probability with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
    pub trials: u64,
}

/// Fraction of configuration-model samples that are simple.
pub fn prob_simple_estimate<R: Rng + ?Sized>(n: usize, d: usize, trials: u64, rng: &mut R) -> Estimate {
    let hits = (0..trials).filter(|_| sample_configuration(n, d, rng).is_simple()).count() as f64;
    let p = hits / trials as f64;
    Estimate { value: p, std_err: (p * (1.0 - p) / trials as f64).sqrt(), trials }
}

/// The band `[½ e^{-(d-1)²/2}, 2 e^{-(d-1)²/2}]` expected for the simple mass at large n.
pub fn prob_simple_band(d: usize) -> (f64, f64) {
    let c = (-((d as f64 - 1.0).powi(2)) / 2.0).exp();
    (0.5 * c, 2.0 * c)
}

/// All permutations of `{0, …, m-1}` with an index, for exact work on the
/// random-transposition chain.
pub struct PermutationSpace {
    m: usize,
    perms: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

/// Largest ground set that [`PermutationSpace::new`] accepts.
pub const MAX_PERMUTATION_GROUND_SET: usize = 8;

impl PermutationSpace {
    /// Materializes every permutation of `m` symbols in lexicographic order.
    pub fn new(m: usize) -> Result<Self> {
        if m > MAX_PERMUTATION_GROUND_SET {
            let estimate = factorial(m).to_f64().unwrap_or(f64::INFINITY);
            return Err(Error::TooLargeToEnumerate { estimate, cap: 40_320 });
        }
        let mut perms = Vec::new();
        let mut cur: Vec<u8> = (0..m as u8).collect();
        loop {
            perms.push(cur.clone());
            // Next permutation in lexicographic order.
            let Some(k) = (0..m.saturating_sub(1)).rev().find(|&k| cur[k] < cur[k + 1]) else {
                break;
            };
            let l = (k + 1..m).rev().find(|&l| cur[k] < cur[l]).expect("successor exists");
            cur.swap(k, l);
            cur[k + 1..].reverse();
        }
        let index = perms.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        Ok(PermutationSpace { m, perms, index })
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn ground_set(&self) -> usize {
        self.m
    }

    pub fn perm(&self, idx: usize) -> Vec<usize> {
        self.perms[idx].iter().map(|&x| x as usize).collect()
    }

    pub fn index_of(&self, perm: &[usize]) -> Option<usize> {
        let key: Vec<u8> = perm.iter().map(|&x| x as u8).collect();
        self.index.get(&key).copied()
    }

    /// The graph `ψ(σ)` of every permutation, in index order.
    pub fn graphs(&self, n: usize, d: usize) -> Result<Vec<BipartiteMultigraph>> {
        if n * d != self.m {
            return Err(Error::ShapeMismatch(format!("n*d = {} but ground set has {}", n * d, self.m)));
        }
        (0..self.len()).map(|k| configuration_to_graph(n, d, &self.perm(k))).collect()
    }

    /// Composes `f` with `ψ`, producing one value per permutation.
    pub fn lift<T, F: Fn(&BipartiteMultigraph) -> T>(&self, n: usize, d: usize, f: F) -> Result<Vec<T>> {
        Ok(self.graphs(n, d)?.iter().map(f).collect())
    }

    /// Indices of the permutations obtained from `idx` by swapping two positions.
    pub fn transposition_neighbors(&self, idx: usize) -> Vec<usize> {
        let p = &self.perms[idx];
        let mut out = Vec::with_capacity(self.m * (self.m - 1) / 2);
        let mut q = p.clone();
        for a in 0..self.m {
            for b in a + 1..self.m {
                q.swap(a, b);
                out.push(self.index[&q]);
                q.swap(a, b);
            }
        }
        out
    }
}

/// Generator entry of the random-transposition chain on permutations of `m = nd`
/// symbols: `2/m²` between permutations differing by one transposition, and
/// `-(m-1)/m` on the diagonal.
pub fn rt_rate(s1: &[usize], s2: &[usize]) -> Result<Rate> {
    if s1.len() != s2.len() {
        return Err(Error::ShapeMismatch("permutations of different ground sets".into()));
    }
    let m = s1.len() as i64;
    let diff: Vec<usize> = (0..s1.len()).filter(|&k| s1[k] != s2[k]).collect();
    Ok(match diff.len() {
        0 => Rate::new(-(m - 1), m),
        2 if s1[diff[0]] == s2[diff[1]] && s1[diff[1]] == s2[diff[0]] => Rate::new(2, m * m),
        _ => Rate::zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{classify, Category};
    use num_traits::Zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn pi_bc_strata() {
        let g = BipartiteMultigraph::from_rows(3, 2, &[vec![1, 2], vec![0, 2], vec![0, 1]]).unwrap();
        assert_eq!(pi_bc(&g), r(4, 45));
        assert_eq!(fiber_size(&g), BigUint::from(64u32));
        let g = BipartiteMultigraph::from_matrix(3, 2, &[vec![2, 0, 0], vec![0, 1, 1], vec![0, 1, 1]]).unwrap();
        assert_eq!(pi_bc(&g), r(2, 45));
        assert_eq!(fiber_size(&g), BigUint::from(32u32));
        let g = BipartiteMultigraph::from_matrix(3, 2, &[vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]]).unwrap();
        assert_eq!(pi_bc(&g), r(1, 90));
    }

    #[test]
    fn total_mass_and_fibres() {
        let all = enumerate_graphs(3, 2, false, 1000).unwrap();
        let total: BigRational = all.iter().map(pi_bc).sum();
        assert_eq!(total, r(1, 1));
        let fibres: BigUint = all.iter().map(fiber_size).sum();
        assert_eq!(fibres, BigUint::from(720u32));
        let k_counts = all.iter().fold([0; 4], |mut acc, g| {
            acc[classify(g).number().unwrap()] += 1;
            acc
        });
        assert_eq!(k_counts, [6, 9, 0, 6]);
    }

    #[test]
    fn prob_simple_values() {
        assert_eq!(prob_simple_exact(3, 2, 1000).unwrap(), r(24, 45));
        assert_eq!(prob_simple_exact(4, 1, 1000).unwrap(), r(1, 1));
        let (lo, hi) = prob_simple_band(2);
        let p = 24.0 / 45.0;
        assert!(lo <= p && p <= hi);
    }

    #[test]
    fn degree_one_is_always_simple() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let g = sample_configuration(7, 1, &mut rng);
            assert_eq!(classify(&g), Category::Simple);
        }
    }

    #[test]
    fn rt_rates() {
        let a = vec![0, 1, 2, 3, 4, 5];
        let b = vec![1, 0, 2, 3, 4, 5];
        let c = vec![1, 2, 0, 3, 4, 5];
        assert_eq!(rt_rate(&a, &b).unwrap(), Rate::new(1, 18));
        assert_eq!(rt_rate(&a, &c).unwrap(), Rate::zero());
        assert_eq!(rt_rate(&a, &a).unwrap(), Rate::new(-5, 6));
        assert!(rt_rate(&a, &[0, 1]).is_err());
    }

    #[test]
    fn permutation_space() {
        let s = PermutationSpace::new(4).unwrap();
        assert_eq!(s.len(), 24);
        for k in 0..s.len() {
            assert_eq!(s.index_of(&s.perm(k)), Some(k));
            let nb = s.transposition_neighbors(k);
            assert_eq!(nb.len(), 6);
            let total: num_rational::Ratio<i64> =
                nb.iter().map(|&m| rt_rate(&s.perm(k), &s.perm(m)).unwrap().0).sum();
            assert!((total + rt_rate(&s.perm(k), &s.perm(k)).unwrap().0).is_zero());
        }
    }
}
