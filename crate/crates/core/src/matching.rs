//! Perfect pairs of multigraphs and the distance-one bijection between their
//! s-neighbourhoods.

use crate::error::{Error, Result};
use crate::graph::{classify, BipartiteMultigraph, Category, Params};
use crate::kernels::{apply_switch, is_simple_switch, neighbor_switches, switch_between, SwitchOp};
use crate::neighborhoods::{categorized_multiedges, reconstruct_path, SimplePath};
use rand::seq::IndexedRandom;
use rand::Rng;
use std::collections::HashSet;

/// Two adjacent multigraphs of equal category whose connecting switching stays
/// away from every double edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerfectPair {
    pub g1: BipartiteMultigraph,
    pub g2: BipartiteMultigraph,
    /// `⟨i, i', j, j'⟩` with `g2 = apply_switch(g1, op)`.
    pub op: SwitchOp,
}

impl PerfectPair {
    /// The same pair read from `g2` to `g1`.
    pub fn reversed(&self) -> PerfectPair {
        PerfectPair { g1: self.g2.clone(), g2: self.g1.clone(), op: self.op.inverse() }
    }
}

/// Which of the three matching cases a graph of the s-neighbourhood falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchCase {
    /// The simple path consumes neither switched edge.
    Untouched,
    /// The simple path consumes exactly one of the two switched edges.
    OneConsumed,
    /// The simple path consumes both switched edges.
    BothConsumed,
}

fn perfect_conditions(g1: &BipartiteMultigraph, g2: &BipartiteMultigraph, op: SwitchOp) -> bool {
    let me = g1.multiedges();
    let rows: HashSet<usize> = me.iter().map(|e| e.0).collect();
    let cols: HashSet<usize> = me.iter().map(|e| e.1).collect();
    let lefts = [op.i1, op.i2];
    let rights = [op.j1, op.j2];
    if lefts.iter().any(|i| rows.contains(i)) || rights.iter().any(|j| cols.contains(j)) {
        return false;
    }
    for g in [g1, g2] {
        for &i in &lefts {
            if cols.iter().any(|&c| g.has_edge(i, c)) {
                return false;
            }
        }
        for &j in &rights {
            if rows.iter().any(|&r| g.has_edge(r, j)) {
                return false;
            }
        }
    }
    true
}

/// Returns the perfect pair formed by `g1` and `g2`, if they form one.
pub fn is_perfect(g1: &BipartiteMultigraph, g2: &BipartiteMultigraph) -> Option<PerfectPair> {
    if g1.n() != g2.n() || g1.d() != g2.d() {
        return None;
    }
    let mhat = Params::new(g1.n(), g1.d()).mhat;
    match (classify(g1), classify(g2)) {
        (Category::Category(a), Category::Category(b)) if a == b && a <= mhat => {}
        _ => return None,
    }
    let op = switch_between(g1, g2)?;
    perfect_conditions(g1, g2, op).then(|| PerfectPair { g1: g1.clone(), g2: g2.clone(), op })
}

fn detect(pair: &PerfectPair, path: &SimplePath) -> (MatchCase, Option<usize>, Option<usize>) {
    let consumed = path.consumed();
    let op = pair.op;
    let s_ij = consumed.iter().position(|&e| e == (op.i1, op.j1));
    let s_pp = consumed.iter().position(|&e| e == (op.i2, op.j2));
    let case = match (s_ij, s_pp) {
        (None, None) => MatchCase::Untouched,
        (Some(_), Some(_)) => MatchCase::BothConsumed,
        _ => MatchCase::OneConsumed,
    };
    (case, s_ij, s_pp)
}

/// The image of `g ∈ SN(g1)` in `SN(g2)`, together with its case.
pub fn psi_with_case(pair: &PerfectPair, g: &BipartiteMultigraph) -> Result<(BipartiteMultigraph, MatchCase)> {
    let path = reconstruct_path(&pair.g1, g)?;
    let (case, s_ij, s_pp) = detect(pair, &path);
    let SwitchOp { i1: i, i2: ip, j1: j, j2: jp } = pair.op;
    let switch = match (s_ij, s_pp) {
        (None, None) => pair.op,
        (Some(s), None) => SwitchOp::new(path.ops[s].i1, ip, j, jp),
        (None, Some(s)) => SwitchOp::new(path.ops[s].i1, i, jp, j),
        (Some(s1), Some(s2)) => SwitchOp::new(path.ops[s1].i1, path.ops[s2].i1, j, jp),
    };
    if !is_simple_switch(g, switch) {
        return Err(Error::Construction(format!("matching switching {switch} is not simple on the source")));
    }
    Ok((apply_switch(g, switch)?, case))
}

/// The image of `g ∈ SN(g1)` in `SN(g2)`.
pub fn psi(pair: &PerfectPair, g: &BipartiteMultigraph) -> Result<BipartiteMultigraph> {
    psi_with_case(pair, g).map(|(h, _)| h)
}

/// The unique `g2` such that `(g1, g2)` is perfect and `psi` sends `g` to `g_prime`,
/// computed by inverting the three matching cases.
pub fn find_source_pair(
    g1: &BipartiteMultigraph,
    g: &BipartiteMultigraph,
    g_prime: &BipartiteMultigraph,
) -> Option<BipartiteMultigraph> {
    let path = reconstruct_path(g1, g).ok()?;
    let sw = switch_between(g, g_prime)?;
    let step_of = |row: usize| path.ops.iter().position(|op| op.i1 == row);
    let mut found: Vec<BipartiteMultigraph> = Vec::new();
    for (a, ap, b, bp) in [(sw.i1, sw.i2, sw.j1, sw.j2), (sw.i2, sw.i1, sw.j2, sw.j1)] {
        let phi = match (step_of(a), step_of(ap)) {
            (None, None) => SwitchOp::new(a, ap, b, bp),
            (Some(s), None) => SwitchOp::new(path.ops[s].i2, ap, b, bp),
            (None, Some(_)) => continue,
            (Some(s1), Some(s2)) => SwitchOp::new(path.ops[s1].i2, path.ops[s2].i2, b, bp),
        };
        let Ok(g2) = apply_switch(g1, phi) else { continue };
        let Some(pair) = is_perfect(g1, &g2) else { continue };
        if psi(&pair, g).ok().as_ref() == Some(g_prime) && !found.contains(&g2) {
            found.push(g2);
        }
    }
    debug_assert!(found.len() <= 1);
    found.into_iter().next()
}

/// Every `g2` adjacent to `g1` forming a perfect pair whose matching sends `g` to `g_prime`,
/// found by scanning all switchings of `g1`.
pub fn find_source_pairs_exhaustive(
    g1: &BipartiteMultigraph,
    g: &BipartiteMultigraph,
    g_prime: &BipartiteMultigraph,
) -> Vec<BipartiteMultigraph> {
    perfect_partners(g1)
        .into_iter()
        .filter(|pair| psi(pair, g).ok().as_ref() == Some(g_prime))
        .map(|pair| pair.g2)
        .collect()
}

/// All perfect pairs `(g1, ·)`.
pub fn perfect_partners(g1: &BipartiteMultigraph) -> Vec<PerfectPair> {
    neighbor_switches(g1, false)
        .into_iter()
        .filter_map(|(op, _)| {
            let g2 = apply_switch(g1, op).ok()?;
            is_perfect(g1, &g2)
        })
        .collect()
}

/// Builds a perfect pair of category `k` at the given size: a random simple graph
/// receives `k` double edges through a random simple path read backwards, then a
/// random perfect switching is chosen.
pub fn construct_perfect_pair<R: Rng + ?Sized>(n: usize, d: usize, k: usize, rng: &mut R) -> Result<PerfectPair> {
    for _ in 0..1000 {
        let g = crate::config::sample_uniform_simple(n, d, rng);
        let Some(g1) = plant_multiedges(&g, k, rng) else { continue };
        if categorized_multiedges(&g1).is_err() {
            continue;
        }
        let partners = perfect_partners(&g1);
        if let Some(p) = partners.choose(rng) {
            return Ok(p.clone());
        }
    }
    Err(Error::Construction(format!("no perfect pair found at n={n}, d={d}, k={k}")))
}

/// A category-`k` multigraph whose s-neighbourhood contains the simple graph `g`,
/// built by `k` random reverse path steps, or `None` if the attempt dead-ends.
pub fn plant_multiedges<R: Rng + ?Sized>(g: &BipartiteMultigraph, k: usize, rng: &mut R) -> Option<BipartiteMultigraph> {
    for _ in 0..200 {
        let mut cur = g.clone();
        let mut ok = true;
        for _ in 0..k {
            let moves = reverse_steps(&cur);
            match moves.choose(rng) {
                Some(&op) => cur = apply_switch(&cur, op).ok()?,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && classify(&cur) == Category::Category(k) && reconstruct_path(&cur, g).is_ok() {
            return Some(cur);
        }
    }
    None
}

/// Switchings that remove two single edges `(i, j')`, `(i', j)` and add `(i, j)`
/// (currently single, becoming double) and `(i', j')` (currently absent).
fn reverse_steps(g: &BipartiteMultigraph) -> Vec<SwitchOp> {
    let mut out = Vec::new();
    for (op, _) in neighbor_switches(g, false) {
        for op in [op, SwitchOp::new(op.i2, op.i1, op.j2, op.j1)] {
            let [(a, e), (b, c)] = op.added();
            let single_removed = op.removed().iter().all(|&(x, y)| g.mult(x, y) == 1);
            let row_free = !g.row(a).windows(2).any(|w| w[0] == w[1]);
            let col_free = g.column(e).windows(2).all(|w| w[0] != w[1]);
            if single_removed && row_free && col_free && g.mult(a, e) == 1 && g.mult(b, c) == 0 {
                out.push(op);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_graphs;
    use crate::kernels::multigraph_neighbors;
    use crate::neighborhoods::sn_endpoints;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn no_perfect_pairs_at_three() {
        for g in enumerate_graphs(3, 2, false, 100).unwrap() {
            if classify(&g) != Category::Category(1) {
                continue;
            }
            for h in multigraph_neighbors(&g) {
                assert!(is_perfect(&g, &h).is_none());
            }
        }
    }

    #[test]
    fn simple_pairs_are_not_perfect() {
        let g = BipartiteMultigraph::from_rows(3, 2, &[vec![1, 2], vec![0, 2], vec![0, 1]]).unwrap();
        for h in crate::kernels::simple_neighbors(&g).unwrap() {
            assert!(is_perfect(&g, &h).is_none());
        }
    }

    #[test]
    fn constructed_pair_matches_bijectively() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pair = construct_perfect_pair(12, 3, 1, &mut rng).unwrap();
        let s1 = sn_endpoints(&pair.g1).unwrap();
        let s2: HashSet<_> = sn_endpoints(&pair.g2).unwrap().into_iter().collect();
        assert_eq!(s1.len(), s2.len());
        let rev = pair.reversed();
        let mut images = HashSet::new();
        for g in &s1 {
            let h = psi(&pair, g).unwrap();
            assert!(s2.contains(&h));
            assert!(switch_between(g, &h).is_some());
            assert_eq!(&psi(&rev, &h).unwrap(), g);
            assert!(images.insert(h.clone()));
            assert_eq!(find_source_pair(&pair.g1, g, &h), Some(pair.g2.clone()));
        }
    }
}
