//! Simple paths from multigraphs with a few double edges to simple graphs,
//! s-neighbourhoods, their size bounds, reverse counting and the
//! anti-expansion statistics of simple graphs.

use crate::error::{Error, Result};
use crate::graph::{anti_expansion, classify, BipartiteMultigraph, Category, Params};
use crate::kernels::{apply_switch, neighbor_switches, SwitchOp};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use std::collections::{BTreeSet, HashSet};

/// A simple path: `k` switchings resolving the double edges of a category-`k`
/// multigraph, one per double edge in increasing order of left vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimplePath {
    pub start: BipartiteMultigraph,
    /// `ops[t] = ⟨i_t, i'_t, j_t, j'_t⟩`.
    pub ops: Vec<SwitchOp>,
    pub end: BipartiteMultigraph,
}

impl SimplePath {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// All graphs along the path, from start to end.
    pub fn states(&self) -> Vec<BipartiteMultigraph> {
        let mut out = vec![self.start.clone()];
        for op in &self.ops {
            let next = apply_switch(out.last().expect("nonempty"), *op).expect("path switchings are valid");
            out.push(next);
        }
        out
    }

    /// The single edges `(i'_t, j'_t)` removed by the path.
    pub fn consumed(&self) -> Vec<(usize, usize)> {
        self.ops.iter().map(|op| (op.i2, op.j2)).collect()
    }

    /// All left vertices touched by the path.
    pub fn left_vertices(&self) -> BTreeSet<usize> {
        self.ops.iter().flat_map(|op| [op.i1, op.i2]).collect()
    }

    /// Left vertices carrying a double edge of the start graph.
    pub fn multiedge_rows(&self) -> BTreeSet<usize> {
        self.ops.iter().map(|op| op.i1).collect()
    }

    /// Left vertices `i'_t` whose single edge is consumed.
    pub fn partner_rows(&self) -> BTreeSet<usize> {
        self.ops.iter().map(|op| op.i2).collect()
    }

    /// The step operating on left vertex `i`, if any.
    pub fn step_touching(&self, i: usize) -> Option<(usize, SwitchOp)> {
        self.ops.iter().enumerate().find(|(_, op)| op.i1 == i || op.i2 == i).map(|(t, op)| (t, *op))
    }
}

/// The double edges of a category-`k` multigraph with `1 ≤ k ≤ 𝔪`, ordered by left vertex.
pub fn categorized_multiedges(gp: &BipartiteMultigraph) -> Result<Vec<(usize, usize)>> {
    let mhat = Params::new(gp.n(), gp.d()).mhat;
    match classify(gp) {
        Category::Simple => Err(Error::CategoryZero),
        Category::Category(k) if k <= mhat => Ok(gp.multiedges()),
        _ => Err(Error::NotCategorized { max: mhat }),
    }
}

/// Admissible `(i', j')` per double edge, ignoring the pairwise-distinctness constraint.
fn level_candidates(gp: &BipartiteMultigraph, me: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let rows: HashSet<usize> = me.iter().map(|e| e.0).collect();
    let cols: HashSet<usize> = me.iter().map(|e| e.1).collect();
    me.iter()
        .map(|&(it, jt)| {
            let mut c = Vec::new();
            for ip in 0..gp.n() {
                if rows.contains(&ip) || gp.has_edge(ip, jt) {
                    continue;
                }
                for jp in gp.support(ip) {
                    if !cols.contains(&jp) && !gp.has_edge(it, jp) {
                        c.push((ip, jp));
                    }
                }
            }
            c
        })
        .collect()
}

fn build_path(gp: &BipartiteMultigraph, me: &[(usize, usize)], choice: &[(usize, usize)]) -> SimplePath {
    let ops: Vec<SwitchOp> =
        me.iter().zip(choice).map(|(&(i, j), &(ip, jp))| SwitchOp::new(i, ip, j, jp)).collect();
    let mut end = gp.clone();
    for op in &ops {
        end.switch_in_place(*op).expect("simple-path switchings are valid");
    }
    SimplePath { start: gp.clone(), ops, end }
}

fn dfs<F: FnMut(&[(usize, usize)])>(
    cands: &[Vec<(usize, usize)>],
    t: usize,
    used_i: &mut Vec<bool>,
    used_j: &mut Vec<bool>,
    chosen: &mut Vec<(usize, usize)>,
    visit: &mut F,
) {
    if t == cands.len() {
        visit(chosen);
        return;
    }
    for &(ip, jp) in &cands[t] {
        if used_i[ip] || used_j[jp] {
            continue;
        }
        used_i[ip] = true;
        used_j[jp] = true;
        chosen.push((ip, jp));
        dfs(cands, t + 1, used_i, used_j, chosen, visit);
        chosen.pop();
        used_i[ip] = false;
        used_j[jp] = false;
    }
}

/// Every simple path starting at `gp`.
pub fn enumerate_sn(gp: &BipartiteMultigraph) -> Result<Vec<SimplePath>> {
    let me = categorized_multiedges(gp)?;
    let cands = level_candidates(gp, &me);
    let mut out = Vec::new();
    let n = gp.n();
    dfs(&cands, 0, &mut vec![false; n], &mut vec![false; n], &mut Vec::new(), &mut |c| {
        out.push(build_path(gp, &me, c))
    });
    Ok(out)
}

/// The s-neighbourhood of `gp`: endpoints of all simple paths.
pub fn sn_endpoints(gp: &BipartiteMultigraph) -> Result<Vec<BipartiteMultigraph>> {
    Ok(enumerate_sn(gp)?.into_iter().map(|p| p.end).collect())
}

/// Size of the s-neighbourhood without materializing it.
pub fn sn_size(gp: &BipartiteMultigraph) -> Result<u64> {
    let me = categorized_multiedges(gp)?;
    let cands = level_candidates(gp, &me);
    let mut count = 0u64;
    let n = gp.n();
    dfs(&cands, 0, &mut vec![false; n], &mut vec![false; n], &mut Vec::new(), &mut |_| count += 1);
    Ok(count)
}

/// A uniformly random simple path from `gp`, or `None` if the s-neighbourhood is empty.
///
/// Each level draws uniformly from its full candidate set and the draw is
/// rejected when the distinctness constraint fails, so every path has the same
/// probability. After `max_attempts` rejections the path is drawn from an
/// explicit enumeration instead.
pub fn sample_sn<R: Rng + ?Sized>(gp: &BipartiteMultigraph, rng: &mut R, max_attempts: usize) -> Result<Option<SimplePath>> {
    let me = categorized_multiedges(gp)?;
    let cands = level_candidates(gp, &me);
    if cands.iter().any(|c| c.is_empty()) {
        return Ok(None);
    }
    'attempt: for _ in 0..max_attempts {
        let mut ui = HashSet::new();
        let mut uj = HashSet::new();
        let mut choice = Vec::with_capacity(me.len());
        for c in &cands {
            let (ip, jp) = c[rng.random_range(0..c.len())];
            if !ui.insert(ip) || !uj.insert(jp) {
                continue 'attempt;
            }
            choice.push((ip, jp));
        }
        return Ok(Some(build_path(gp, &me, &choice)));
    }
    let all = enumerate_sn(gp)?;
    if all.is_empty() {
        return Ok(None);
    }
    let k = rng.random_range(0..all.len());
    Ok(all.into_iter().nth(k))
}

/// Checks that `ops` is a simple path from `gp` and returns its endpoint.
pub fn check_simple_path(gp: &BipartiteMultigraph, ops: &[SwitchOp]) -> Result<BipartiteMultigraph> {
    let me = categorized_multiedges(gp)?;
    if ops.len() != me.len() {
        return Err(Error::NotInNeighborhood);
    }
    let rows: HashSet<usize> = me.iter().map(|e| e.0).collect();
    let cols: HashSet<usize> = me.iter().map(|e| e.1).collect();
    let mut ui = HashSet::new();
    let mut uj = HashSet::new();
    let mut cur = gp.clone();
    for (&(it, jt), op) in me.iter().zip(ops) {
        let ok = op.i1 == it
            && op.j1 == jt
            && !rows.contains(&op.i2)
            && !cols.contains(&op.j2)
            && ui.insert(op.i2)
            && uj.insert(op.j2)
            && gp.mult(op.i2, jt) == 0
            && gp.mult(it, op.j2) == 0;
        if !ok {
            return Err(Error::NotInNeighborhood);
        }
        cur.switch_in_place(*op).map_err(|_| Error::NotInNeighborhood)?;
    }
    if !cur.is_simple() {
        return Err(Error::NotInNeighborhood);
    }
    Ok(cur)
}

/// Recovers the unique simple path from `gp` to `g`.
pub fn reconstruct_path(gp: &BipartiteMultigraph, g: &BipartiteMultigraph) -> Result<SimplePath> {
    let me = categorized_multiedges(gp)?;
    if g.n() != gp.n() || g.d() != gp.d() {
        return Err(Error::ShapeMismatch("graphs have different (n, d)".into()));
    }
    let mut ops = Vec::with_capacity(me.len());
    for &(it, jt) in &me {
        let jp: Vec<usize> = (0..g.n()).filter(|&c| g.mult(it, c) == 1 && gp.mult(it, c) == 0).collect();
        let ip: Vec<usize> = (0..g.n()).filter(|&r| g.mult(r, jt) == 1 && gp.mult(r, jt) == 0).collect();
        if jp.len() != 1 || ip.len() != 1 {
            return Err(Error::NotInNeighborhood);
        }
        ops.push(SwitchOp::new(it, ip[0], jt, jp[0]));
    }
    let end = check_simple_path(gp, &ops)?;
    if &end != g {
        return Err(Error::NotInNeighborhood);
    }
    Ok(SimplePath { start: gp.clone(), ops, end })
}

/// Whether `g` lies in the s-neighbourhood of `gp`.
pub fn is_in_sn(gp: &BipartiteMultigraph, g: &BipartiteMultigraph) -> bool {
    reconstruct_path(gp, g).is_ok()
}

/// Exact size bounds `((n-k-2d)d)^k` (only when `n-k-2d > 0`) and `((n-k)d)^k`.
pub fn sn_bounds(n: usize, d: usize, k: usize) -> (Option<BigInt>, BigInt) {
    let base = n as i64 - k as i64 - 2 * d as i64;
    let lo = (base > 0).then(|| BigInt::from(base * d as i64).pow(k as u32));
    let hi = BigInt::from(((n - k) * d) as i64).pow(k as u32);
    (lo, hi)
}

/// Every multigraph obtained from `g` by one switching that raises some single
/// edge to multiplicity two while adding a new single edge.
fn reverse_moves(g: &BipartiteMultigraph) -> Vec<BipartiteMultigraph> {
    let mut out = Vec::new();
    for (op, _) in neighbor_switches(g, false) {
        for op in [op, SwitchOp::new(op.i2, op.i1, op.j2, op.j1)] {
            let [(a, e), (b, c)] = op.added();
            let single_removed = op.removed().iter().all(|&(x, y)| g.mult(x, y) == 1);
            if single_removed && g.mult(a, e) == 1 && g.mult(b, c) == 0 {
                out.push(apply_switch(g, op).expect("listed from existing edges"));
                break;
            }
        }
    }
    out
}

/// Exact number of category-`k` multigraphs whose s-neighbourhood contains the simple graph `g`.
pub fn count_reverse(g: &BipartiteMultigraph, k: usize) -> Result<usize> {
    if !g.is_simple() {
        return Err(Error::NotSimple);
    }
    if k == 0 {
        return Err(Error::CategoryZero);
    }
    let mut level: HashSet<BipartiteMultigraph> = HashSet::from([g.clone()]);
    for _ in 0..k {
        let mut next = HashSet::new();
        for h in &level {
            for m in reverse_moves(h) {
                next.insert(m);
            }
        }
        level = next;
    }
    Ok(level
        .iter()
        .filter(|h| classify(h) == Category::Category(k) && is_in_sn(h, g))
        .count())
}

/// Bounds on [`count_reverse`]: `((nd - Z - 2kd³)^k (d-1)^{2k} / k!, C(nd, k) (d-1)^{2k})`.
pub fn reverse_bounds(g: &BipartiteMultigraph, k: usize) -> Result<(BigRational, BigInt)> {
    let z = anti_expansion(g)? as i64;
    let (n, d) = (g.n() as i64, g.d() as i64);
    let base = n * d - z - 2 * k as i64 * d * d * d;
    let dk = BigInt::from(d - 1).pow(2 * k as u32);
    let kf: BigInt = (1..=k as i64).fold(BigInt::one(), |a, x| a * x);
    let lo = if base > 0 {
        BigRational::new(BigInt::from(base).pow(k as u32) * &dk, kf.clone())
    } else {
        BigRational::zero()
    };
    let nd = (n * d) as usize;
    let binom: BigInt = (0..k).fold(BigInt::one(), |a, t| a * BigInt::from(nd - t)) / kf;
    Ok((lo, binom * dk))
}

/// Whether `g` has anti-expansion at most `z`.
pub fn in_r(g: &BipartiteMultigraph, z: usize) -> Result<bool> {
    Ok(anti_expansion(g)? <= z)
}

/// Anti-expansion statistics of one simple graph and its neighbours.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct AeReport {
    pub z: usize,
    pub neighbors: usize,
    /// Neighbours with strictly smaller anti-expansion.
    pub decreasing: usize,
    /// Neighbours with strictly larger anti-expansion.
    pub increasing: usize,
    /// Largest `|Z(G) - Z(G')|` over neighbours.
    pub max_jump: usize,
    /// Neighbours violating `|Z(G) - Z(G')| ≤ 2d²`.
    pub jump_violations: usize,
    /// `decreasing ≥ Z(G)(nd - 2d⁴)/2` (vacuous when the right side is nonpositive).
    pub decreasing_bound_holds: bool,
    /// `increasing ≤ nd⁵`.
    pub increasing_bound_holds: bool,
}

impl AeReport {
    pub fn violations(&self) -> usize {
        self.jump_violations + usize::from(!self.decreasing_bound_holds) + usize::from(!self.increasing_bound_holds)
    }
}

/// Computes [`AeReport`] for a simple graph by visiting every neighbour.
pub fn ae_report(g: &BipartiteMultigraph) -> Result<AeReport> {
    let z = anti_expansion(g)?;
    let (n, d) = (g.n() as i64, g.d() as i64);
    let mut rep = AeReport {
        z,
        neighbors: 0,
        decreasing: 0,
        increasing: 0,
        max_jump: 0,
        jump_violations: 0,
        decreasing_bound_holds: true,
        increasing_bound_holds: true,
    };
    for (op, _) in neighbor_switches(g, true) {
        let h = apply_switch(g, op)?;
        let zh = anti_expansion(&h)?;
        rep.neighbors += 1;
        let jump = z.abs_diff(zh);
        rep.max_jump = rep.max_jump.max(jump);
        if jump as i64 > 2 * d * d {
            rep.jump_violations += 1;
        }
        if zh < z {
            rep.decreasing += 1;
        }
        if zh > z {
            rep.increasing += 1;
        }
    }
    let rhs = z as i64 * (n * d - 2 * d.pow(4));
    rep.decreasing_bound_holds = 2 * rep.decreasing as i64 >= rhs;
    rep.increasing_bound_holds = rep.increasing as i64 <= n * d.pow(5);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_graphs;
    use crate::graph::tilde_distance;

    fn cat1() -> BipartiteMultigraph {
        BipartiteMultigraph::from_matrix(3, 2, &[vec![2, 0, 0], vec![0, 1, 1], vec![0, 1, 1]]).unwrap()
    }

    #[test]
    fn cat1_has_four_endpoints() {
        let paths = enumerate_sn(&cat1()).unwrap();
        assert_eq!(paths.len(), 4);
        let ends: HashSet<_> = paths.iter().map(|p| p.end.clone()).collect();
        assert_eq!(ends.len(), 4);
        for p in &paths {
            assert!(p.end.is_simple());
            assert_eq!(tilde_distance(&p.start, &p.end).unwrap(), 4);
            assert_eq!(reconstruct_path(&p.start, &p.end).unwrap(), *p);
        }
        assert_eq!(sn_size(&cat1()).unwrap(), 4);
    }

    #[test]
    fn errors_for_wrong_categories() {
        let g = BipartiteMultigraph::from_rows(3, 2, &[vec![1, 2], vec![0, 2], vec![0, 1]]).unwrap();
        assert_eq!(enumerate_sn(&g).unwrap_err(), Error::CategoryZero);
        let u = BipartiteMultigraph::from_matrix(2, 3, &[vec![3, 0], vec![0, 3]]).unwrap();
        assert!(matches!(enumerate_sn(&u), Err(Error::NotCategorized { .. })));
        let outside = BipartiteMultigraph::from_rows(3, 2, &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let inside = &sn_endpoints(&cat1()).unwrap()[0];
        assert_ne!(&outside, inside);
        if !sn_endpoints(&cat1()).unwrap().contains(&outside) {
            assert_eq!(reconstruct_path(&cat1(), &outside).unwrap_err(), Error::NotInNeighborhood);
        }
    }

    #[test]
    fn reverse_count_on_complement_of_identity() {
        let g = BipartiteMultigraph::from_rows(3, 2, &[vec![1, 2], vec![0, 2], vec![0, 1]]).unwrap();
        assert_eq!(count_reverse(&g, 1).unwrap(), 6);
        let (_, hi) = reverse_bounds(&g, 1).unwrap();
        assert_eq!(hi, BigInt::from(6));
    }

    #[test]
    fn reverse_count_matches_forward_scan() {
        let all = enumerate_graphs(4, 2, false, 10_000).unwrap();
        let simple: Vec<_> = all.iter().filter(|g| g.is_simple()).cloned().collect();
        for k in 1..=2 {
            for g in simple.iter().take(10) {
                let forward = all
                    .iter()
                    .filter(|h| classify(h) == Category::Category(k))
                    .filter(|h| sn_endpoints(h).unwrap().contains(g))
                    .count();
                assert_eq!(count_reverse(g, k).unwrap(), forward);
            }
        }
    }

    #[test]
    fn sn_bounds_values() {
        assert_eq!(sn_bounds(3, 2, 1).1, BigInt::from(4));
        assert_eq!(sn_bounds(30, 3, 2), (Some(BigInt::from(66 * 66)), BigInt::from(84 * 84)));
        assert_eq!(sn_bounds(3, 2, 1).0, None);
    }

    #[test]
    fn ae_report_exhaustive_small() {
        for g in enumerate_graphs(3, 2, true, 100).unwrap() {
            let r = ae_report(&g).unwrap();
            assert_eq!(r.violations(), 0);
        }
    }
}
