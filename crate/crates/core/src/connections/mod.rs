//! Connections: switching paths between simple graphs dictated by admissible
//! 4-tuples `(G1, G1', G2, G2')`, where `G1, G2` are simple graphs reached from
//! the multigraphs `G1', G2'` by simple paths.

pub mod paths;

pub use paths::{
    anchored_pair, build_path_large, build_path_small, globalize, is_anchored, Anchors, LargeCase, LargePath,
    LargeStep, RowGraph, SmallPath, SmallStage, SmallStep,
};

use crate::config::sample_uniform_simple;
use crate::error::{Error, Result};
use crate::graph::{classify, BipartiteMultigraph, Category, GraphJson, Params};
use crate::kernels::{apply_switch, is_simple_switch, neighbor_switches, switch_between, SwitchOp};
use crate::matching::{is_perfect, plant_multiedges};
use crate::neighborhoods::{is_in_sn, reconstruct_path, sample_sn, SimplePath};
use num_rational::Ratio;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// The three kinds of admissible tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum TupleType {
    /// `G1'` and `G2'` are adjacent, imperfect, and both have double edges.
    One,
    /// `G1' = G2'`.
    Two,
    /// `G1 = G1'` is simple, adjacent to `G2'`, and outside its s-neighbourhood.
    Three,
}

impl fmt::Display for TupleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            TupleType::One => 1,
            TupleType::Two => 2,
            TupleType::Three => 3,
        };
        write!(f, "{n}")
    }
}

/// Whether the switching between `G1'` and `G2'` avoids every row used by the simple paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum SwitchKind {
    A,
    B,
}

/// Finer classification of a tuple by categories and the size of its non-standard set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Subtype {
    One { k1: usize, k2: usize, kind: SwitchKind, r: usize },
    Two { k: usize, r: usize },
    Three,
}

/// A classified admissible tuple with its simple paths and linking switching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleTuple {
    pub g1: BipartiteMultigraph,
    pub g1p: BipartiteMultigraph,
    pub g2: BipartiteMultigraph,
    pub g2p: BipartiteMultigraph,
    pub ttype: TupleType,
    /// The simple path from `G1'` to `G1` (absent for type 3).
    pub path1: Option<SimplePath>,
    /// The simple path from `G2'` to `G2`.
    pub path2: SimplePath,
    /// The switching taking `G1'` to `G2'`, when they differ.
    pub link: Option<SwitchOp>,
    pub kind: Option<SwitchKind>,
}

impl AdmissibleTuple {
    /// Left vertices used by the simple path from `G1'` to `G1`.
    pub fn i_first(&self) -> BTreeSet<usize> {
        self.path1.as_ref().map(SimplePath::left_vertices).unwrap_or_default()
    }

    /// Left vertices used by the simple path from `G2'` to `G2`.
    pub fn i_second(&self) -> BTreeSet<usize> {
        self.path2.left_vertices()
    }

    /// Rows of `I(G2, G2')` carrying a double edge of `G2'`.
    pub fn i_m_second(&self) -> BTreeSet<usize> {
        self.path2.multiedge_rows()
    }

    /// The remaining rows of `I(G2, G2')`.
    pub fn i_s_second(&self) -> BTreeSet<usize> {
        self.path2.partner_rows()
    }

    /// `I(T)`: every left vertex used by either simple path.
    pub fn i_t(&self) -> BTreeSet<usize> {
        self.i_first().union(&self.i_second()).copied().collect()
    }

    /// The left vertices of the linking switching (empty for type 2).
    pub fn link_rows(&self) -> BTreeSet<usize> {
        self.link.map(|op| [op.i1, op.i2].into_iter().collect()).unwrap_or_default()
    }

    pub fn subtype(&self) -> Subtype {
        let r = i_ns(self).len();
        let cat = |g: &BipartiteMultigraph| classify(g).number().unwrap_or(0);
        match self.ttype {
            TupleType::One => Subtype::One {
                k1: cat(&self.g1p),
                k2: cat(&self.g2p),
                kind: self.kind.expect("type-1 tuples have a linking switching"),
                r,
            },
            TupleType::Two => Subtype::Two { k: cat(&self.g1p), r },
            TupleType::Three => Subtype::Three,
        }
    }
}

/// JSON form of a tuple: four graphs in the order `G1, G1', G2, G2'`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TupleJson {
    pub g1: GraphJson,
    pub g1p: GraphJson,
    pub g2: GraphJson,
    pub g2p: GraphJson,
}

impl From<&AdmissibleTuple> for TupleJson {
    fn from(t: &AdmissibleTuple) -> Self {
        TupleJson {
            g1: (&t.g1).into(),
            g1p: (&t.g1p).into(),
            g2: (&t.g2).into(),
            g2p: (&t.g2p).into(),
        }
    }
}

impl TupleJson {
    /// Parses and classifies the tuple.
    pub fn to_tuple(&self) -> Result<AdmissibleTuple> {
        classify_tuple(&self.g1.to_graph()?, &self.g1p.to_graph()?, &self.g2.to_graph()?, &self.g2p.to_graph()?)
    }
}

fn in_range(g: &BipartiteMultigraph) -> bool {
    let mhat = Params::new(g.n(), g.d()).mhat;
    matches!(classify(g), Category::Category(k) if k <= mhat)
}

fn not_admissible(msg: &str) -> Error {
    Error::NotAdmissible(msg.to_string())
}

/// Determines the type of `(g1, g1p, g2, g2p)` and records its simple paths and linking switching.
pub fn classify_tuple(
    g1: &BipartiteMultigraph,
    g1p: &BipartiteMultigraph,
    g2: &BipartiteMultigraph,
    g2p: &BipartiteMultigraph,
) -> Result<AdmissibleTuple> {
    let shape = (g1.n(), g1.d());
    if [g1p, g2, g2p].iter().any(|g| (g.n(), g.d()) != shape) {
        return Err(Error::ShapeMismatch("tuple graphs have different (n, d)".into()));
    }
    if !g1.is_simple() || !g2.is_simple() {
        return Err(not_admissible("G1 and G2 must be simple"));
    }
    if !in_range(g2p) {
        return Err(not_admissible("G2' must have between 1 and the maximal number of double edges"));
    }
    let path2 = reconstruct_path(g2p, g2).map_err(|_| not_admissible("G2 is not in the s-neighbourhood of G2'"))?;
    let base = |ttype, path1, link, kind| AdmissibleTuple {
        g1: g1.clone(),
        g1p: g1p.clone(),
        g2: g2.clone(),
        g2p: g2p.clone(),
        ttype,
        path1,
        path2: path2.clone(),
        link,
        kind,
    };
    if g1p == g2p {
        let path1 = reconstruct_path(g1p, g1).map_err(|_| not_admissible("G1 is not in the s-neighbourhood of G1'"))?;
        return Ok(base(TupleType::Two, Some(path1), None, None));
    }
    let link = switch_between(g1p, g2p).ok_or_else(|| not_admissible("G1' and G2' are not adjacent"))?;
    let y = [link.i1, link.i2];
    if g1p.is_simple() {
        if g1 != g1p {
            return Err(not_admissible("a simple G1' must equal G1"));
        }
        if is_in_sn(g2p, g1) {
            return Err(not_admissible("G1 lies in the s-neighbourhood of G2'"));
        }
        let me = g2p.multiedges();
        if me.len() != 2 || !me.iter().all(|e| link.added().contains(e)) {
            return Err(not_admissible("the linking switching must act on both double edges of a category-2 G2'"));
        }
        return Ok(base(TupleType::Three, None, Some(link), Some(SwitchKind::B)));
    }
    if !in_range(g1p) {
        return Err(not_admissible("G1' must have between 1 and the maximal number of double edges"));
    }
    if is_perfect(g1p, g2p).is_some() {
        return Err(not_admissible("(G1', G2') is a perfect pair"));
    }
    let path1 = reconstruct_path(g1p, g1).map_err(|_| not_admissible("G1 is not in the s-neighbourhood of G1'"))?;
    let used: BTreeSet<usize> = path1.left_vertices().union(&path2.left_vertices()).copied().collect();
    let kind = if y.iter().any(|i| used.contains(i)) { SwitchKind::B } else { SwitchKind::A };
    Ok(base(TupleType::One, Some(path1), Some(link), Some(kind)))
}

/// A shared double edge `(i, j)` handled by the fixed two-step pattern, with its four derived indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct MStandardEdge {
    pub i: usize,
    pub j: usize,
    /// Partner of `i` in the path to `G1`.
    pub i1: usize,
    /// Partner of `i` in the path to `G2`.
    pub i2: usize,
    /// Column gained by row `i` in `G1`.
    pub j1: usize,
    /// Column gained by row `i` in `G2`.
    pub j2: usize,
}

/// The m-standard edges of a type-1 or type-2 tuple, in increasing order of left vertex.
pub fn m_standard_edges(t: &AdmissibleTuple) -> Vec<MStandardEdge> {
    let Some(path1) = &t.path1 else {
        return Vec::new();
    };
    let i_first = t.i_first();
    let i_second = t.i_second();
    let y = t.link_rows();
    let mut out = Vec::new();
    for op1 in &path1.ops {
        let (i, j) = (op1.i1, op1.j1);
        if t.g1p.mult(i, j) != 2 || t.g2p.mult(i, j) != 2 {
            continue;
        }
        let Some(op2) = t.path2.ops.iter().find(|op| op.i1 == i && op.j1 == j) else {
            continue;
        };
        let e = MStandardEdge { i, j, i1: op1.i2, i2: op2.i2, j1: op1.j2, j2: op2.j2 };
        let ok = !i_second.contains(&e.i1)
            && !i_first.contains(&e.i2)
            && !t.g1.has_edge(e.i1, e.j2)
            && !t.g2.has_edge(e.i1, e.j2)
            && [e.i, e.i1, e.i2].iter().all(|v| !y.contains(v));
        if ok {
            out.push(e);
        }
    }
    out.sort();
    out
}

/// `I_ST`: rows of m-standard edges together with their two partners.
pub fn i_st(t: &AdmissibleTuple) -> BTreeSet<usize> {
    m_standard_edges(t).iter().flat_map(|e| [e.i, e.i1, e.i2]).collect()
}

/// `I_NS`: non-standard rows of `I(T)`, plus the linking rows when the link is of kind B.
pub fn i_ns(t: &AdmissibleTuple) -> BTreeSet<usize> {
    let st = i_st(t);
    let mut out: BTreeSet<usize> = t.i_t().difference(&st).copied().collect();
    if t.kind == Some(SwitchKind::B) {
        out.extend(t.link_rows());
    }
    out
}

/// `I_A`: the linking rows when the link is of kind A.
pub fn i_a(t: &AdmissibleTuple) -> BTreeSet<usize> {
    if t.kind == Some(SwitchKind::A) {
        t.link_rows()
    } else {
        BTreeSet::new()
    }
}

/// The finest partition of `I_NS` that keeps together the rows of every path
/// switching touching `I_NS` and the rows of a kind-B link; blocks are sorted
/// and ordered by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CanonicalPartition {
    pub blocks: Vec<Vec<usize>>,
}

fn find(parent: &mut BTreeMap<usize, usize>, x: usize) -> usize {
    let p = parent[&x];
    if p == x {
        return x;
    }
    let r = find(parent, p);
    parent.insert(x, r);
    r
}

/// Computes the canonical partition of `I_NS(T)`.
pub fn canonical_partition(t: &AdmissibleTuple) -> Result<CanonicalPartition> {
    let ns = i_ns(t);
    let mut parent: BTreeMap<usize, usize> = ns.iter().map(|&i| (i, i)).collect();
    let mut pairs: Vec<(usize, usize)> = t
        .path1
        .iter()
        .flat_map(|p| p.ops.iter())
        .chain(&t.path2.ops)
        .map(|op| (op.i1, op.i2))
        .collect();
    if t.kind == Some(SwitchKind::B) {
        let link = t.link.expect("kind B implies a link");
        pairs.push((link.i1, link.i2));
    }
    for (a, b) in pairs {
        match (ns.contains(&a), ns.contains(&b)) {
            (true, true) => {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent.insert(ra.max(rb), ra.min(rb));
            }
            (false, false) => {}
            _ => {
                return Err(Error::Construction(format!("switching on rows {a}, {b} straddles the non-standard set")));
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in &ns {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut blocks: Vec<Vec<usize>> = groups.into_values().collect();
    blocks.sort_by_key(|b| b[0]);
    Ok(CanonicalPartition { blocks })
}

/// Numbers of double edges of `G1'` and `G2'` incident to the rows of `block`.
pub fn block_multiedges(t: &AdmissibleTuple, block: &[usize]) -> (usize, usize) {
    let count = |g: &BipartiteMultigraph| g.multiedges().iter().filter(|e| block.contains(&e.0)).count();
    (count(&t.g1p), count(&t.g2p))
}

/// A right vertex with at least two neighbours in `block` in both `G1` and `G2`.
pub fn shared_right_vertex(t: &AdmissibleTuple, block: &[usize]) -> Option<usize> {
    let hits = |g: &BipartiteMultigraph, j: usize| block.iter().filter(|&&i| g.has_edge(i, j)).count();
    (0..t.g1.n()).find(|&j| hits(&t.g1, j) >= 2 && hits(&t.g2, j) >= 2)
}

/// Number of pairs `(i, j)` with `i ∈ I_NS` that are an edge of exactly one of `G1`, `G2`.
pub fn ns_discrepancy(t: &AdmissibleTuple) -> usize {
    i_ns(t)
        .iter()
        .map(|&i| (0..t.g1.n()).filter(|&j| t.g1.has_edge(i, j) != t.g2.has_edge(i, j)).count())
        .sum()
}

/// The bound `8|I_NS| + 4·[kind B]` on [`ns_discrepancy`].
pub fn ns_discrepancy_bound(t: &AdmissibleTuple) -> usize {
    8 * i_ns(t).len() + if t.kind == Some(SwitchKind::B) { 4 } else { 0 }
}

/// Which path builder handled a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum BlockLemma {
    Small,
    Large,
}

/// The part of a connection that rewrites the rows of one canonical block.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct BlockPath {
    pub rows: Vec<usize>,
    pub lemma: BlockLemma,
    /// Entries in which the block differs between its start and its target.
    pub k: usize,
    /// Switchings in ambient row indices.
    pub ops: Vec<SwitchOp>,
    pub small: Option<SmallPath>,
    pub large: Option<LargePath>,
}

/// A connection from `G1` to `G2` with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connection {
    pub states: Vec<BipartiteMultigraph>,
    pub ops: Vec<SwitchOp>,
    pub standard_steps: usize,
    pub type_a_step: bool,
    pub blocks: Vec<BlockPath>,
}

impl Connection {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

fn step(cur: &mut BipartiteMultigraph, states: &mut Vec<BipartiteMultigraph>, ops: &mut Vec<SwitchOp>, op: SwitchOp) -> Result<()> {
    if !is_simple_switch(cur, op) {
        return Err(Error::Construction(format!("switching {op} is not simple on {cur:?}")));
    }
    cur.switch_in_place(op)?;
    states.push(cur.clone());
    ops.push(op);
    Ok(())
}

fn block_anchors(g: &RowGraph, gp: &BipartiteMultigraph, block: &[usize]) -> Option<(usize, usize)> {
    let local: Vec<usize> =
        (0..block.len()).filter(|&a| gp.multiedges().iter().any(|e| e.0 == block[a])).collect();
    for (x, &a) in local.iter().enumerate() {
        for &b in &local[x + 1..] {
            for (first, second) in [(a, b), (b, a)] {
                if is_anchored(g, first, second) {
                    return Some((first, second));
                }
            }
        }
    }
    anchored_pair(g, &[])
}

/// Builds the connection of `t`: the m-standard steps, the kind-A link if any,
/// then one block path per element of the canonical partition.
pub fn build_connection(t: &AdmissibleTuple) -> Result<Connection> {
    let mut cur = t.g1.clone();
    let mut states = vec![cur.clone()];
    let mut ops = Vec::new();
    let standard = m_standard_edges(t);
    for e in &standard {
        step(&mut cur, &mut states, &mut ops, SwitchOp::new(e.i1, e.i2, e.j, e.j2))?;
        step(&mut cur, &mut states, &mut ops, SwitchOp::new(e.i1, e.i, e.j2, e.j1))?;
    }
    let type_a_step = t.kind == Some(SwitchKind::A);
    if type_a_step {
        step(&mut cur, &mut states, &mut ops, t.link.expect("kind A implies a link"))?;
    }
    let y = t.link_rows();
    let mut blocks = Vec::new();
    for w in canonical_partition(t)?.blocks {
        let h1 = RowGraph::from_graph(&cur, &w)?;
        let h2 = RowGraph::from_graph(&t.g2, &w)?;
        let k = h1.disc(&h2);
        let holds_link = t.kind == Some(SwitchKind::B) && y.iter().all(|i| w.contains(i));
        let (lemma, local, small, large) = if w.len() <= 4 || holds_link {
            let p = build_path_small(&h1, &h2)?;
            (BlockLemma::Small, p.ops(), Some(p), None)
        } else {
            let start = block_anchors(&h1, &t.g1p, &w)
                .ok_or_else(|| Error::HypothesisViolated(format!("no anchored pair in block {w:?} of G1")))?;
            let end = block_anchors(&h2, &t.g2p, &w)
                .ok_or_else(|| Error::HypothesisViolated(format!("no anchored pair in block {w:?} of G2")))?;
            let p = build_path_large(&h1, &h2, Anchors { start, end })?;
            (BlockLemma::Large, p.ops(), None, Some(p))
        };
        let global: Vec<SwitchOp> = local.iter().map(|&op| globalize(op, &w)).collect();
        for &op in &global {
            step(&mut cur, &mut states, &mut ops, op)?;
        }
        blocks.push(BlockPath { rows: w, lemma, k, ops: global, small, large });
    }
    if cur != t.g2 {
        return Err(Error::Construction("connection does not end at G2".into()));
    }
    Ok(Connection { states, ops, standard_steps: 2 * standard.len(), type_a_step, blocks })
}

/// How a step of a connection is accounted for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum CoupleKind {
    MStandard,
    TypeA,
    NonStandard,
}

/// Outcome of [`validate_connection`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConnectionReport {
    pub length: usize,
    pub lower_bound: usize,
    /// `2|E_S| + (3/2)(8|I_NS| + 4)`.
    pub upper_bound: f64,
    pub all_simple: bool,
    pub all_steps_legal: bool,
    pub endpoints_ok: bool,
    pub within_bounds: bool,
    /// Classification of step `t` (1-based) at index `t - 1`; `None` if it fits no class.
    pub couples: Vec<Option<CoupleKind>>,
    pub failures: Vec<String>,
}

impl ConnectionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks simplicity of every state, legality of every step, the endpoints and both length bounds.
pub fn validate_connection(t: &AdmissibleTuple, states: &[BipartiteMultigraph]) -> ConnectionReport {
    let mut failures = Vec::new();
    let es = m_standard_edges(t).len();
    let ns = i_ns(t);
    let length = states.len().saturating_sub(1);
    let lower_bound = 2 * es;
    let upper = Ratio::new(4 * es + 3 * (8 * ns.len() + 4), 2);
    let upper_bound = *upper.numer() as f64 / *upper.denom() as f64;
    let all_simple = states.iter().all(|g| g.is_simple() && g.validate().is_ok());
    if !all_simple {
        let t = states.iter().position(|g| !g.is_simple() || g.validate().is_err()).expect("some state fails");
        failures.push(format!("state {t} is not a simple d-regular graph"));
    }
    let mut all_steps_legal = true;
    let mut couples = Vec::with_capacity(length);
    for (s, w) in states.windows(2).enumerate() {
        let op = switch_between(&w[0], &w[1]).filter(|_| w[0].is_simple() && w[1].is_simple());
        if op.is_none() {
            all_steps_legal = false;
            failures.push(format!("step {} is not a simple switching", s + 1));
        }
        let tstep = s + 1;
        let kind = if tstep <= lower_bound {
            Some(CoupleKind::MStandard)
        } else {
            op.and_then(|op| {
                let rows = [op.i1, op.i2];
                if t.kind == Some(SwitchKind::A) && tstep == lower_bound + 1 && t.link.map(|l| l.normalized()) == Some(op) {
                    Some(CoupleKind::TypeA)
                } else if rows.iter().all(|i| ns.contains(i)) {
                    Some(CoupleKind::NonStandard)
                } else {
                    None
                }
            })
        };
        if kind.is_none() && op.is_some() {
            failures.push(format!("step {tstep} is neither m-standard, type A, nor non-standard"));
        }
        couples.push(kind);
    }
    let endpoints_ok = states.first() == Some(&t.g1) && states.last() == Some(&t.g2);
    if !endpoints_ok {
        failures.push("path does not run from G1 to G2".into());
    }
    let within_bounds = length >= lower_bound && Ratio::from_integer(length) <= upper;
    if !within_bounds {
        failures.push(format!("length {length} outside [{lower_bound}, {upper_bound}]"));
    }
    ConnectionReport {
        length,
        lower_bound,
        upper_bound,
        all_simple,
        all_steps_legal,
        endpoints_ok,
        within_bounds,
        couples,
        failures,
    }
}

const SAMPLE_ATTEMPTS: usize = 2000;

fn planted<R: Rng + ?Sized>(n: usize, d: usize, k_max: usize, rng: &mut R) -> Option<BipartiteMultigraph> {
    let g = sample_uniform_simple(n, d, rng);
    let k = rng.random_range(1..=k_max.max(1));
    plant_multiedges(&g, k, rng)
}

/// A random type-2 tuple: two random simple paths from one planted multigraph.
pub fn sample_type2<R: Rng + ?Sized>(n: usize, d: usize, k_max: usize, rng: &mut R) -> Result<AdmissibleTuple> {
    for _ in 0..SAMPLE_ATTEMPTS {
        let Some(gp) = planted(n, d, k_max, rng) else { continue };
        let (Some(p1), Some(p2)) = (sample_sn(&gp, rng, 1000)?, sample_sn(&gp, rng, 1000)?) else { continue };
        return classify_tuple(&p1.end, &gp, &p2.end, &gp);
    }
    Err(Error::Construction(format!("no type-2 tuple found at n={n}, d={d}")))
}

/// A random type-1 tuple: a planted multigraph, an imperfect neighbour with
/// double edges, and a random simple path from each.
pub fn sample_type1<R: Rng + ?Sized>(n: usize, d: usize, k_max: usize, rng: &mut R) -> Result<AdmissibleTuple> {
    for _ in 0..SAMPLE_ATTEMPTS {
        let Some(g1p) = planted(n, d, k_max, rng) else { continue };
        let mut moves = neighbor_switches(&g1p, false);
        moves.shuffle(rng);
        let Some(g2p) = moves.into_iter().find_map(|(op, _)| {
            let h = apply_switch(&g1p, op).ok()?;
            (in_range(&h) && is_perfect(&g1p, &h).is_none()).then_some(h)
        }) else {
            continue;
        };
        let (Some(p1), Some(p2)) = (sample_sn(&g1p, rng, 1000)?, sample_sn(&g2p, rng, 1000)?) else { continue };
        return classify_tuple(&p1.end, &g1p, &p2.end, &g2p);
    }
    Err(Error::Construction(format!("no type-1 tuple found at n={n}, d={d}")))
}

/// A random type-3 tuple: a simple graph with a 4-cycle `a-b-a'-b'`, whose two
/// edges `(a, b')` and `(a', b)` are switched onto `(a, b)` and `(a', b')` to form `G2'`.
pub fn sample_type3<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<AdmissibleTuple> {
    for _ in 0..SAMPLE_ATTEMPTS {
        let g1 = sample_uniform_simple(n, d, rng);
        let mut cycles = Vec::new();
        for a in 0..n {
            for ap in a + 1..n {
                let common: Vec<usize> = g1.support(a).into_iter().filter(|&c| g1.has_edge(ap, c)).collect();
                for &b in &common {
                    for &bp in &common {
                        if b != bp {
                            cycles.push(SwitchOp::new(a, ap, bp, b));
                        }
                    }
                }
            }
        }
        let Some(&op) = cycles.choose(rng) else { continue };
        let g2p = apply_switch(&g1, op)?;
        if classify(&g2p) != Category::Category(2) || is_in_sn(&g2p, &g1) {
            continue;
        }
        let Some(p2) = sample_sn(&g2p, rng, 1000)? else { continue };
        return classify_tuple(&g1, &g1, &p2.end, &g2p);
    }
    Err(Error::Construction(format!("no type-3 tuple found at n={n}, d={d}")))
}

/// A random admissible tuple of a uniformly chosen type.
pub fn sample_tuple<R: Rng + ?Sized>(n: usize, d: usize, k_max: usize, rng: &mut R) -> Result<AdmissibleTuple> {
    match rng.random_range(0..3) {
        0 => sample_type1(n, d, k_max, rng),
        1 => sample_type2(n, d, k_max, rng),
        _ => sample_type3(n, d, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check(t: &AdmissibleTuple) -> Connection {
        let c = build_connection(t).unwrap();
        let report = validate_connection(t, &c.states);
        assert!(report.passed(), "{:?}", report.failures);
        c
    }

    #[test]
    fn type_two_classification_and_connection() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let t = sample_type2(30, 3, 2, &mut rng).unwrap();
            assert_eq!(t.ttype, TupleType::Two);
            let c = check(&t);
            if i_ns(&t).is_empty() {
                assert_eq!(c.len(), 2 * m_standard_edges(&t).len());
            }
        }
    }

    #[test]
    fn type_three_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let t = sample_type3(30, 3, &mut rng).unwrap();
            assert_eq!(t.ttype, TupleType::Three);
            assert_eq!(classify(&t.g2p), Category::Category(2));
            assert!(m_standard_edges(&t).is_empty());
            assert_eq!(i_ns(&t).len(), 4);
            assert_eq!(canonical_partition(&t).unwrap().blocks.len(), 1);
            assert!(check(&t).len() <= 10);
        }
    }

    #[test]
    fn type_one_connections_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let t = sample_type1(30, 3, 2, &mut rng).unwrap();
            assert_eq!(t.ttype, TupleType::One);
            if t.kind == Some(SwitchKind::B) {
                assert!(t.link_rows().is_subset(&i_ns(&t)));
            }
            check(&t);
        }
    }

    #[test]
    fn perfect_pair_is_not_type_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pair = crate::matching::construct_perfect_pair(12, 3, 1, &mut rng).unwrap();
        let g1 = sample_sn(&pair.g1, &mut rng, 100).unwrap().unwrap().end;
        let g2 = sample_sn(&pair.g2, &mut rng, 100).unwrap().unwrap().end;
        assert!(matches!(classify_tuple(&g1, &pair.g1, &g2, &pair.g2), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn corrupted_paths_are_flagged() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = sample_type3(30, 3, &mut rng).unwrap();
        let c = build_connection(&t).unwrap();
        let mut truncated = c.states.clone();
        truncated.pop();
        assert!(!validate_connection(&t, &truncated).endpoints_ok);
        let mut corrupted = c.states.clone();
        let mid = corrupted.len() / 2;
        corrupted[mid] = t.g2p.clone();
        let r = validate_connection(&t, &corrupted);
        assert!(!r.all_simple && !r.passed());
    }
}
