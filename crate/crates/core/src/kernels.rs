//! Simple switchings, neighbour enumeration, exact generator rates and
//! single-step simulation of the discrete chains `P = I + Q`.

use crate::error::{Error, Result};
use crate::graph::BipartiteMultigraph;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::Rng;
use std::collections::HashMap;
use std::fmt;

/// The switching `⟨i1, i2, j1, j2⟩`: removes `(i1, j1)` and `(i2, j2)`, adds `(i1, j2)` and `(i2, j1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct SwitchOp {
    pub i1: usize,
    pub i2: usize,
    pub j1: usize,
    pub j2: usize,
}

impl fmt::Display for SwitchOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{},{},{}>", self.i1 + 1, self.i2 + 1, self.j1 + 1, self.j2 + 1)
    }
}

impl SwitchOp {
    pub fn new(i1: usize, i2: usize, j1: usize, j2: usize) -> Self {
        SwitchOp { i1, i2, j1, j2 }
    }

    /// The switching that undoes this one.
    pub fn inverse(&self) -> SwitchOp {
        SwitchOp::new(self.i1, self.i2, self.j2, self.j1)
    }

    /// The same switching written with the left vertices in increasing order.
    pub fn normalized(&self) -> SwitchOp {
        if self.i1 <= self.i2 {
            *self
        } else {
            SwitchOp::new(self.i2, self.i1, self.j2, self.j1)
        }
    }

    /// Whether the two removed edges share no endpoint.
    pub fn is_non_incident(&self) -> bool {
        self.i1 != self.i2 && self.j1 != self.j2
    }

    /// The two edges removed by the switching.
    pub fn removed(&self) -> [(usize, usize); 2] {
        [(self.i1, self.j1), (self.i2, self.j2)]
    }

    /// The two edges added by the switching.
    pub fn added(&self) -> [(usize, usize); 2] {
        [(self.i1, self.j2), (self.i2, self.j1)]
    }
}

/// Which switch chain a rate or step refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chain {
    /// The chain on simple graphs with generator `Q_u`.
    Simple,
    /// The chain on multigraphs with generator `Q_c`.
    Config,
}

/// An exact rational rate with a float view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rate(pub Ratio<i64>);

impl Rate {
    pub fn new(num: i64, den: i64) -> Self {
        Rate(Ratio::new(num, den))
    }

    pub fn zero() -> Self {
        Rate(Ratio::zero())
    }

    pub fn value(&self) -> Ratio<i64> {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl BipartiteMultigraph {
    /// Applies a switching in place.
    pub fn switch_in_place(&mut self, op: SwitchOp) -> Result<()> {
        if op.i1 >= self.n() || op.i2 >= self.n() || op.j1 >= self.n() || op.j2 >= self.n() {
            return Err(Error::ShapeMismatch(format!("switching {op} out of range")));
        }
        if !self.has_edge(op.i1, op.j1) || !self.has_edge(op.i2, op.j2) {
            return Err(Error::NotInDomain(op.to_string()));
        }
        if op.i1 == op.i2 || op.j1 == op.j2 {
            return Ok(());
        }
        self.replace_in_row(op.i1, op.j1 as u32, op.j2 as u32);
        self.replace_in_row(op.i2, op.j2 as u32, op.j1 as u32);
        debug_assert!(self.validate().is_ok());
        Ok(())
    }
}

/// Returns the graph obtained by applying `op`.
pub fn apply_switch(g: &BipartiteMultigraph, op: SwitchOp) -> Result<BipartiteMultigraph> {
    let mut h = g.clone();
    h.switch_in_place(op)?;
    Ok(h)
}

/// Whether `op` is a non-incident switching that keeps `g` simple.
pub fn is_simple_switch(g: &BipartiteMultigraph, op: SwitchOp) -> bool {
    op.is_non_incident()
        && g.has_edge(op.i1, op.j1)
        && g.has_edge(op.i2, op.j2)
        && !g.has_edge(op.i1, op.j2)
        && !g.has_edge(op.i2, op.j1)
}

/// The non-incident switching taking `g` to `h`, normalized so that `i1 < i2`,
/// or `None` if the graphs are not adjacent.
pub fn switch_between(g: &BipartiteMultigraph, h: &BipartiteMultigraph) -> Option<SwitchOp> {
    if g.n() != h.n() || g.d() != h.d() {
        return None;
    }
    let mut minus = Vec::new();
    let mut plus = Vec::new();
    for i in 0..g.n() {
        if g.row(i) == h.row(i) {
            continue;
        }
        for j in 0..g.n() {
            let (a, b) = (g.mult(i, j) as i64, h.mult(i, j) as i64);
            match b - a {
                0 => {}
                -1 => minus.push((i, j)),
                1 => plus.push((i, j)),
                _ => return None,
            }
        }
        if minus.len() > 2 || plus.len() > 2 {
            return None;
        }
    }
    if minus.len() != 2 || plus.len() != 2 {
        return None;
    }
    let (i1, j1) = minus[0];
    let (i2, j2) = minus[1];
    if i1 == i2 || j1 == j2 {
        return None;
    }
    let op = SwitchOp::new(i1, i2, j1, j2);
    let mut added = op.added();
    added.sort();
    let mut p = [plus[0], plus[1]];
    p.sort();
    if added == p {
        Some(op.normalized())
    } else {
        None
    }
}

/// All non-incident switchings on distinct edges of `g`, each listed once with
/// `i1 < i2`, together with the product of the removed multiplicities.
///
/// With `simple_only`, only switchings that create no multiedge are returned.
pub fn neighbor_switches(g: &BipartiteMultigraph, simple_only: bool) -> Vec<(SwitchOp, u32)> {
    let edges = g.edges();
    let mut out = Vec::new();
    for (a, &(i1, j1, m1)) in edges.iter().enumerate() {
        for &(i2, j2, m2) in &edges[a + 1..] {
            if i1 == i2 || j1 == j2 {
                continue;
            }
            if simple_only && (g.has_edge(i1, j2) || g.has_edge(i2, j1)) {
                continue;
            }
            out.push((SwitchOp::new(i1, i2, j1, j2), m1 * m2));
        }
    }
    out
}

/// All simple graphs reachable from the simple graph `g` by one switching.
pub fn simple_neighbors(g: &BipartiteMultigraph) -> Result<Vec<BipartiteMultigraph>> {
    if !g.is_simple() {
        return Err(Error::NotSimple);
    }
    Ok(neighbor_switches(g, true)
        .into_iter()
        .map(|(op, _)| apply_switch(g, op).expect("switching listed from existing edges"))
        .collect())
}

/// All multigraphs reachable from `g` by one non-incident switching.
pub fn multigraph_neighbors(g: &BipartiteMultigraph) -> Vec<BipartiteMultigraph> {
    neighbor_switches(g, false)
        .into_iter()
        .map(|(op, _)| apply_switch(g, op).expect("switching listed from existing edges"))
        .collect()
}

fn pair_denominator(g: &BipartiteMultigraph) -> i64 {
    let nd = g.num_instances() as i64;
    nd * (nd - 1)
}

fn check_shape(g1: &BipartiteMultigraph, g2: &BipartiteMultigraph) -> Result<()> {
    if g1.n() != g2.n() || g1.d() != g2.d() {
        return Err(Error::ShapeMismatch("graphs have different (n, d)".into()));
    }
    Ok(())
}

/// Exact off-diagonal rates out of `g` keyed by target graph.
pub fn rates_from(g: &BipartiteMultigraph, chain: Chain) -> Vec<(BipartiteMultigraph, Rate)> {
    let den = pair_denominator(g);
    let simple_only = chain == Chain::Simple;
    neighbor_switches(g, simple_only)
        .into_iter()
        .map(|(op, w)| {
            let h = apply_switch(g, op).expect("switching listed from existing edges");
            (h, Rate::new(2 * w as i64, den))
        })
        .collect()
}

fn rate(g1: &BipartiteMultigraph, g2: &BipartiteMultigraph, chain: Chain) -> Result<Rate> {
    check_shape(g1, g2)?;
    if chain == Chain::Simple && (!g1.is_simple() || !g2.is_simple()) {
        return Err(Error::NotSimple);
    }
    if g1 == g2 {
        let total: Ratio<i64> = rates_from(g1, chain).iter().map(|(_, r)| r.0).sum();
        return Ok(Rate(-total));
    }
    let den = pair_denominator(g1);
    match switch_between(g1, g2) {
        None => Ok(Rate::zero()),
        Some(op) => {
            let w = g1.mult(op.i1, op.j1) as i64 * g1.mult(op.i2, op.j2) as i64;
            Ok(Rate::new(2 * w, den))
        }
    }
}

/// Generator entry `Q_u(g1, g2)` of the simple chain, diagonal included.
pub fn qu_rate(g1: &BipartiteMultigraph, g2: &BipartiteMultigraph) -> Result<Rate> {
    rate(g1, g2, Chain::Simple)
}

/// Generator entry `Q_c(g1, g2)` of the multigraph chain, diagonal included.
pub fn qc_rate(g1: &BipartiteMultigraph, g2: &BipartiteMultigraph) -> Result<Rate> {
    rate(g1, g2, Chain::Config)
}

/// Exact holding probability `1 − Σ_{g' ≠ g} P(g, g')` of the discrete chain.
pub fn self_loop_prob(g: &BipartiteMultigraph, chain: Chain) -> Rate {
    let total: Ratio<i64> = rates_from(g, chain).iter().map(|(_, r)| r.0).sum();
    Rate(Ratio::one() - total)
}

#[inline]
fn draw_pair<R: Rng + ?Sized>(g: &BipartiteMultigraph, rng: &mut R) -> (usize, usize) {
    let nd = g.num_instances();
    let a = rng.random_range(0..nd);
    let mut b = rng.random_range(0..nd - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

/// One step of the discrete simple chain: returns whether the state moved.
#[inline]
pub fn step_simple<R: Rng + ?Sized>(g: &mut BipartiteMultigraph, rng: &mut R) -> bool {
    let (a, b) = draw_pair(g, rng);
    let (i1, j1) = g.instance(a);
    let (i2, j2) = g.instance(b);
    if i1 == i2 || j1 == j2 || g.has_edge(i1, j2) || g.has_edge(i2, j1) {
        return false;
    }
    g.replace_in_row(i1, j1 as u32, j2 as u32);
    g.replace_in_row(i2, j2 as u32, j1 as u32);
    true
}

/// One step of the discrete multigraph chain: returns whether the state moved.
#[inline]
pub fn step_config<R: Rng + ?Sized>(g: &mut BipartiteMultigraph, rng: &mut R) -> bool {
    let (a, b) = draw_pair(g, rng);
    let (i1, j1) = g.instance(a);
    let (i2, j2) = g.instance(b);
    if i1 == i2 || j1 == j2 {
        return false;
    }
    g.replace_in_row(i1, j1 as u32, j2 as u32);
    g.replace_in_row(i2, j2 as u32, j1 as u32);
    true
}

/// Runs `steps` steps of the given chain in place.
pub fn run_chain<R: Rng + ?Sized>(g: &mut BipartiteMultigraph, chain: Chain, steps: u64, rng: &mut R) {
    match chain {
        Chain::Simple => {
            for _ in 0..steps {
                step_simple(g, rng);
            }
        }
        Chain::Config => {
            for _ in 0..steps {
                step_config(g, rng);
            }
        }
    }
}

/// Exact one-step distribution of the discrete chain from `g`.
pub fn transition_row(g: &BipartiteMultigraph, chain: Chain) -> HashMap<BipartiteMultigraph, Ratio<i64>> {
    let mut row = HashMap::new();
    row.insert(g.clone(), self_loop_prob(g, chain).0);
    for (h, r) in rates_from(g, chain) {
        *row.entry(h).or_insert_with(Ratio::zero) += r.0;
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn complement_identity() -> BipartiteMultigraph {
        BipartiteMultigraph::from_rows(3, 2, &[vec![1, 2], vec![0, 2], vec![0, 1]]).unwrap()
    }

    fn cat1() -> BipartiteMultigraph {
        BipartiteMultigraph::from_matrix(3, 2, &[vec![2, 0, 0], vec![0, 1, 1], vec![0, 1, 1]]).unwrap()
    }

    /// Filter-and-dedupe over all ordered instance pairs.
    fn brute_neighbors(g: &BipartiteMultigraph, simple: bool) -> HashSet<BipartiteMultigraph> {
        let mut out = HashSet::new();
        for a in 0..g.num_instances() {
            for b in 0..g.num_instances() {
                if a == b {
                    continue;
                }
                let (i1, j1) = g.instance(a);
                let (i2, j2) = g.instance(b);
                if i1 == i2 || j1 == j2 {
                    continue;
                }
                let m = g.matrix();
                if simple && (m[i1][j2] > 0 || m[i2][j1] > 0) {
                    continue;
                }
                let mut mm: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
                mm[i1][j1] -= 1;
                mm[i2][j2] -= 1;
                mm[i1][j2] += 1;
                mm[i2][j1] += 1;
                out.insert(BipartiteMultigraph::from_matrix(g.n(), g.d(), &mm).unwrap());
            }
        }
        out
    }

    #[test]
    fn apply_and_invert() {
        let g = cat1();
        let op = SwitchOp::new(0, 1, 0, 1);
        let h = apply_switch(&g, op).unwrap();
        assert!(h.is_simple());
        assert_eq!(apply_switch(&h, op.inverse()).unwrap(), g);
        assert!(matches!(apply_switch(&g, SwitchOp::new(0, 1, 1, 1)), Err(Error::NotInDomain(_))));
    }

    #[test]
    fn neighbours_match_brute_force() {
        let g = complement_identity();
        let sn: HashSet<_> = simple_neighbors(&g).unwrap().into_iter().collect();
        assert_eq!(sn, brute_neighbors(&g, true));
        assert!(!sn.contains(&g));
        let g = cat1();
        let mn: Vec<_> = multigraph_neighbors(&g);
        let set: HashSet<_> = mn.iter().cloned().collect();
        assert_eq!(set.len(), mn.len());
        assert_eq!(set, brute_neighbors(&g, false));
        for h in &mn {
            assert!(multigraph_neighbors(h).contains(&g));
        }
        assert_eq!(simple_neighbors(&g), Err(Error::NotSimple));
    }

    #[test]
    fn rate_examples() {
        let g = complement_identity();
        let h = simple_neighbors(&g).unwrap()[0].clone();
        assert_eq!(qu_rate(&g, &h).unwrap(), Rate::new(1, 15));
        let g = cat1();
        let h = apply_switch(&g, SwitchOp::new(0, 1, 0, 1)).unwrap();
        assert_eq!(qc_rate(&g, &h).unwrap(), Rate::new(2, 15));
        let far = BipartiteMultigraph::from_matrix(3, 2, &[vec![0, 2, 0], vec![1, 0, 1], vec![1, 0, 1]]).unwrap();
        assert_eq!(qc_rate(&g, &far).unwrap(), Rate::zero());
        assert_eq!(qc_rate(&g, &g).unwrap().0, self_loop_prob(&g, Chain::Config).0 - Ratio::one());
    }

    #[test]
    fn holding_probability_bounds() {
        {
            let g = complement_identity();
            let p = self_loop_prob(&g, Chain::Simple);
            let nd = 6i64;
            let bound = Ratio::one() - Ratio::new(nd - 2, nd - 1);
            assert!(p.0 >= bound);
            assert!(p.0 > Ratio::new(1, 6));
            let total: Ratio<i64> = transition_row(&g, Chain::Simple).values().sum();
            assert_eq!(total, Ratio::one());
        }
        let cat3 = BipartiteMultigraph::from_matrix(3, 2, &[vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]]).unwrap();
        // Three double edges: every non-incident pair of distinct edges is switchable,
        // giving 3 switchings of weight 4, so the holding mass is 1 - 3·8/30.
        assert_eq!(self_loop_prob(&cat3, Chain::Config), Rate::new(1, 5));
    }

    #[test]
    fn steps_stay_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut g = complement_identity();
        for _ in 0..10_000 {
            step_simple(&mut g, &mut rng);
            assert!(g.is_simple());
            g.validate().unwrap();
        }
        let mut g = cat1();
        for _ in 0..10_000 {
            step_config(&mut g, &mut rng);
            g.validate().unwrap();
        }
    }

    #[test]
    fn two_by_two_simple_chain_is_frozen() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut g = BipartiteMultigraph::from_rows(2, 2, &[vec![0, 1], vec![0, 1]]).unwrap();
        let start = g.clone();
        for _ in 0..1000 {
            assert!(!step_simple(&mut g, &mut rng));
        }
        assert_eq!(g, start);
    }
}
