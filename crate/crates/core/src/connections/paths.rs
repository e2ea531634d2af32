//! Switching paths between two simple bipartite graphs on a small left vertex
//! set `[m]` with equal left degrees and equal right degree sequences.
//!
//! Left vertices are local indices `0..m`; callers map them back to the rows of
//! a larger graph with [`globalize`].

use crate::error::{Error, Result};
use crate::graph::BipartiteMultigraph;
use crate::kernels::SwitchOp;
use std::collections::BTreeMap;
use std::fmt;

/// A simple bipartite graph given by the sorted neighbour lists of its left vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RowGraph {
    rows: Vec<Vec<usize>>,
}

impl RowGraph {
    /// Builds the graph from neighbour lists, rejecting repeated neighbours.
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut rows = rows;
        for r in &mut rows {
            r.sort_unstable();
            if r.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::NotSimple);
            }
        }
        Ok(RowGraph { rows })
    }

    /// The subgraph of `g` induced by the left vertices `w` (in the given order) and all right vertices.
    pub fn from_graph(g: &BipartiteMultigraph, w: &[usize]) -> Result<Self> {
        RowGraph::new(w.iter().map(|&i| g.row(i).iter().map(|&c| c as usize).collect()).collect())
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn has(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&j).is_ok()
    }

    /// Number of left vertices adjacent to `j`.
    pub fn degree(&self, j: usize) -> usize {
        (0..self.m()).filter(|&i| self.has(i, j)).count()
    }

    /// Degree of every right vertex with at least one neighbour.
    pub fn right_degrees(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for r in &self.rows {
            for &c in r {
                *out.entry(c).or_insert(0) += 1;
            }
        }
        out
    }

    /// The smallest common neighbour of `a` and `b`.
    pub fn common(&self, a: usize, b: usize) -> Option<usize> {
        self.rows[a].iter().copied().find(|&c| self.has(b, c))
    }

    pub fn shares(&self, a: usize, b: usize) -> bool {
        a != b && self.common(a, b).is_some()
    }

    /// Whether `a` has a common neighbour with some left vertex outside `excluded` (and other than `a`).
    pub fn shares_outside(&self, a: usize, excluded: &[usize]) -> bool {
        (0..self.m()).any(|c| c != a && !excluded.contains(&c) && self.shares(a, c))
    }

    /// Whether `op` is a switching that keeps the graph simple.
    pub fn is_legal(&self, op: SwitchOp) -> bool {
        op.i1 < self.m()
            && op.i2 < self.m()
            && op.i1 != op.i2
            && op.j1 != op.j2
            && self.has(op.i1, op.j1)
            && self.has(op.i2, op.j2)
            && !self.has(op.i1, op.j2)
            && !self.has(op.i2, op.j1)
    }

    /// Applies a simple switching.
    pub fn switch(&mut self, op: SwitchOp) -> Result<()> {
        if !self.is_legal(op) {
            return Err(Error::Construction(format!("switching {op} is not a simple switching here")));
        }
        for (i, old, new) in [(op.i1, op.j1, op.j2), (op.i2, op.j2, op.j1)] {
            let r = &mut self.rows[i];
            let pos = r.binary_search(&old).expect("legal switching removes an edge");
            r.remove(pos);
            let pos = r.binary_search(&new).expect_err("legal switching adds a new edge");
            r.insert(pos, new);
        }
        Ok(())
    }

    /// Number of pairs `(i, j)` that are an edge in exactly one of the two graphs.
    pub fn disc(&self, other: &RowGraph) -> usize {
        self.rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().filter(|c| b.binary_search(c).is_err()).count() * 2)
            .sum()
    }

    fn first_differing(&self, tgt: &RowGraph) -> Option<usize> {
        (0..self.m()).find(|&i| self.rows[i] != tgt.rows[i])
    }

    fn surplus(&self, tgt: &RowGraph, i: usize) -> Option<usize> {
        self.rows[i].iter().copied().find(|&c| !tgt.has(i, c))
    }

    fn deficit(&self, tgt: &RowGraph, i: usize) -> Option<usize> {
        tgt.rows[i].iter().copied().find(|&c| !self.has(i, c))
    }

    fn sharing_pairs(&self) -> Vec<(usize, usize)> {
        let m = self.m();
        (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).filter(|&(a, b)| self.shares(a, b)).collect()
    }

    /// All simple switchings, each listed once with `i1 < i2`.
    fn legal_switchings(&self) -> Vec<SwitchOp> {
        let mut out = Vec::new();
        for a in 0..self.m() {
            for b in a + 1..self.m() {
                for &c in &self.rows[a] {
                    if self.has(b, c) {
                        continue;
                    }
                    for &e in &self.rows[b] {
                        if !self.has(a, e) {
                            out.push(SwitchOp::new(a, b, c, e));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Maps a switching on local left indices to the rows `w` of the ambient graph.
pub fn globalize(op: SwitchOp, w: &[usize]) -> SwitchOp {
    SwitchOp::new(w[op.i1], w[op.i2], op.j1, op.j2)
}

fn check_compatible(h1: &RowGraph, h2: &RowGraph) -> Result<()> {
    if h1.m() != h2.m() {
        return Err(Error::DegreeMismatch(format!("{} versus {} left vertices", h1.m(), h2.m())));
    }
    let d = h1.rows.first().map_or(0, Vec::len);
    if h1.rows.iter().chain(&h2.rows).any(|r| r.len() != d) {
        return Err(Error::DegreeMismatch("left degrees are not all equal".into()));
    }
    if h1.right_degrees() != h2.right_degrees() {
        return Err(Error::DegreeMismatch("right degree sequences differ".into()));
    }
    Ok(())
}

/// Which part of the small-block construction produced a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum SmallStage {
    /// First stage, direct switching.
    Stage1A,
    /// First stage, one of the two switchings of the detour through a third row.
    Stage1B,
    /// Second stage: relocation, two-row repair and restoration.
    Stage2,
    /// A first-stage move taken while no pair of rows shares a neighbour, or when `m = 2`.
    Direct,
}

/// One switching of a small-block path with the common-neighbour facts that held before it.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct SmallStep {
    pub op: SwitchOp,
    pub stage: SmallStage,
    /// The two switched rows had no common neighbour.
    pub no_common_neighbor: bool,
    /// The smallest other row with a common neighbour with some row besides itself.
    pub witness: Option<usize>,
}

impl SmallStep {
    /// Whether at least one of the two common-neighbour conditions held.
    pub fn disjunction_holds(&self) -> bool {
        self.no_common_neighbor || self.witness.is_some()
    }
}

/// A path produced by [`build_path_small`].
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct SmallPath {
    pub steps: Vec<SmallStep>,
}

impl SmallPath {
    pub fn ops(&self) -> Vec<SwitchOp> {
        self.steps.iter().map(|s| s.op).collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

fn push_small(cur: &mut RowGraph, steps: &mut Vec<SmallStep>, op: SwitchOp, stage: SmallStage) -> Result<()> {
    let witness = (0..cur.m()).find(|&i| i != op.i1 && i != op.i2 && cur.shares_outside(i, &[]));
    let no_common_neighbor = !cur.shares(op.i1, op.i2);
    cur.switch(op)?;
    steps.push(SmallStep { op, stage, no_common_neighbor, witness });
    Ok(())
}

/// A path of simple switchings from `h1` to `h2` of length at most `k + 2`, where
/// `k` is the number of entries in which the two graphs differ.
///
/// Ties are broken by the smallest eligible indices.
pub fn build_path_small(h1: &RowGraph, h2: &RowGraph) -> Result<SmallPath> {
    check_compatible(h1, h2)?;
    let limit = h1.disc(h2) + 2;
    let m = h1.m();
    let mut cur = h1.clone();
    let mut steps = Vec::new();
    while cur != *h2 {
        if steps.len() > limit {
            return Err(Error::Construction("small-block path exceeded its length budget".into()));
        }
        let pairs = cur.sharing_pairs();
        let triple = (0..m).find(|&i| cur.row(i) != h2.row(i) && pairs.iter().any(|&(a, b)| a != i && b != i));
        if let Some(i1) = triple {
            stage_one(&mut cur, h2, i1, false, &mut steps)?;
        } else if m >= 3 && !pairs.is_empty() {
            let (a, b) = pairs[0];
            stage_two(&mut cur, h2, a, b, &mut steps)?;
        } else {
            let i1 = cur.first_differing(h2).expect("graphs differ");
            stage_one(&mut cur, h2, i1, true, &mut steps)?;
        }
    }
    Ok(SmallPath { steps })
}

fn missing(what: &str) -> Error {
    Error::Construction(format!("no eligible {what}"))
}

fn stage_one(cur: &mut RowGraph, tgt: &RowGraph, i1: usize, direct: bool, steps: &mut Vec<SmallStep>) -> Result<()> {
    let j1 = cur.surplus(tgt, i1).ok_or_else(|| missing("j1"))?;
    let j2 = cur.deficit(tgt, i1).ok_or_else(|| missing("j2"))?;
    let i2 = (0..cur.m()).find(|&r| r != i1 && cur.has(r, j2) && !tgt.has(r, j2)).ok_or_else(|| missing("i2"))?;
    let main = SwitchOp::new(i1, i2, j1, j2);
    if !cur.has(i2, j1) {
        let stage = if direct { SmallStage::Direct } else { SmallStage::Stage1A };
        return push_small(cur, steps, main, stage);
    }
    let stage = if direct { SmallStage::Direct } else { SmallStage::Stage1B };
    let i3 = (0..cur.m()).find(|&r| tgt.has(r, j1) && !cur.has(r, j1)).ok_or_else(|| missing("i3"))?;
    let j3 = cur.row(i3).iter().copied().find(|&c| !cur.has(i2, c)).ok_or_else(|| missing("j3"))?;
    push_small(cur, steps, SwitchOp::new(i2, i3, j1, j3), stage)?;
    push_small(cur, steps, main, stage)
}

fn stage_two(cur: &mut RowGraph, tgt: &RowGraph, a: usize, b: usize, steps: &mut Vec<SmallStep>) -> Result<()> {
    let jt = cur.row(a).iter().copied().find(|&c| cur.has(b, c) && cur.degree(c) == 2).ok_or_else(|| missing("shared column"))?;
    let i = (0..cur.m()).find(|&r| r != a && r != b).ok_or_else(|| missing("third row"))?;
    let jh = cur.row(i)[0];
    push_small(cur, steps, SwitchOp::new(i, a, jh, jt), SmallStage::Stage2)?;
    let skip = |c: &usize| *c != jt && *c != jh;
    while let Some(r) = [a, b]
        .into_iter()
        .find(|&r| cur.row(r).iter().filter(|c| skip(c)).ne(tgt.row(r).iter().filter(|c| skip(c))))
    {
        let other = if r == a { b } else { a };
        let j1 = cur.row(r).iter().copied().filter(|c| skip(c)).find(|&c| !tgt.has(r, c)).ok_or_else(|| missing("j1"))?;
        let j2 = tgt.row(r).iter().copied().filter(|c| skip(c)).find(|&c| !cur.has(r, c)).ok_or_else(|| missing("j2"))?;
        push_small(cur, steps, SwitchOp::new(r, other, j1, j2), SmallStage::Stage2)?;
    }
    push_small(cur, steps, SwitchOp::new(i, a, jt, jh), SmallStage::Stage2)
}

/// Two distinct rows `(first, second)` outside `avoid` such that `second` has a
/// common neighbour with some other row and `first` has a common neighbour with
/// a row other than `first` and `second`.
pub fn anchored_pair(g: &RowGraph, avoid: &[usize]) -> Option<(usize, usize)> {
    let m = g.m();
    for second in (0..m).filter(|r| !avoid.contains(r)) {
        if !g.shares_outside(second, &[]) {
            continue;
        }
        for first in (0..m).filter(|&r| r != second && !avoid.contains(&r)) {
            if g.shares_outside(first, &[second]) {
                return Some((first, second));
            }
        }
    }
    None
}

/// Whether `(first, second)` is an anchored pair of `g`.
pub fn is_anchored(g: &RowGraph, first: usize, second: usize) -> bool {
    first != second && first < g.m() && second < g.m() && g.shares_outside(second, &[]) && g.shares_outside(first, &[second])
}

/// Anchored pairs certifying the common-neighbour hypothesis for both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Anchors {
    pub start: (usize, usize),
    pub end: (usize, usize),
}

/// The subcase of the large-block construction that produced a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum LargeCase {
    OneA,
    OneB,
    OneC,
    OneD,
    OneE,
    OneF,
    OneG,
    TwoA,
    TwoB,
    /// No subcase pattern applied and a short verified sequence was found by search.
    Search,
}

impl fmt::Display for LargeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LargeCase::OneA => "1(a)",
            LargeCase::OneB => "1(b)",
            LargeCase::OneC => "1(c)",
            LargeCase::OneD => "1(d)",
            LargeCase::OneE => "1(e)",
            LargeCase::OneF => "1(f)",
            LargeCase::OneG => "1(g)",
            LargeCase::TwoA => "2(a)",
            LargeCase::TwoB => "2(b)",
            LargeCase::Search => "search",
        };
        f.write_str(s)
    }
}

/// One switching of a large-block path with the anchored pair that avoided it.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct LargeStep {
    pub op: SwitchOp,
    pub case: LargeCase,
    pub anchors: (usize, usize),
}

/// A path produced by [`build_path_large`].
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct LargePath {
    pub steps: Vec<LargeStep>,
}

impl LargePath {
    pub fn ops(&self) -> Vec<SwitchOp> {
        self.steps.iter().map(|s| s.op).collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The distinct subcases used, in order of first use.
    pub fn cases(&self) -> Vec<LargeCase> {
        let mut out: Vec<LargeCase> = Vec::new();
        for s in &self.steps {
            if !out.contains(&s.case) {
                out.push(s.case);
            }
        }
        out
    }
}

/// A path of simple switchings from `h1` to `h2` of length at most `⌈3k/2⌉`, in
/// which every switching avoids some anchored pair of the graph it acts on.
///
/// Requires `m ≥ 4` and anchored pairs in both endpoints, supplied as `anchors`.
pub fn build_path_large(h1: &RowGraph, h2: &RowGraph, anchors: Anchors) -> Result<LargePath> {
    check_compatible(h1, h2)?;
    if h1.m() < 4 {
        return Err(Error::HypothesisViolated(format!("need at least 4 left vertices, got {}", h1.m())));
    }
    if !is_anchored(h1, anchors.start.0, anchors.start.1) {
        return Err(Error::HypothesisViolated(format!("{:?} is not an anchored pair of the start", anchors.start)));
    }
    if !is_anchored(h2, anchors.end.0, anchors.end.1) {
        return Err(Error::HypothesisViolated(format!("{:?} is not an anchored pair of the end", anchors.end)));
    }
    let mut cur = h1.clone();
    let mut steps = Vec::new();
    while cur != *h2 {
        let disc0 = cur.disc(h2);
        let planned = plan_macro(&cur, h2).filter(|(_, ops)| verify_macro(&cur, h2, ops, disc0));
        let (case, ops) = match planned {
            Some(p) => p,
            None => (LargeCase::Search, search_macro(&cur, h2, disc0).ok_or_else(|| missing("switching sequence"))?),
        };
        for op in ops {
            let anchors = anchored_pair(&cur, &[op.i1, op.i2]).expect("verified sequence");
            cur.switch(op)?;
            steps.push(LargeStep { op, case, anchors });
        }
    }
    Ok(LargePath { steps })
}

fn verify_macro(cur: &RowGraph, tgt: &RowGraph, ops: &[SwitchOp], disc0: usize) -> bool {
    let mut g = cur.clone();
    for &op in ops {
        if !g.is_legal(op) || anchored_pair(&g, &[op.i1, op.i2]).is_none() {
            return false;
        }
        g.switch(op).expect("legal");
    }
    g.disc(tgt) + 2 <= disc0 && (g == *tgt || anchored_pair(&g, &[]).is_some())
}

fn search_macro(cur: &RowGraph, tgt: &RowGraph, disc0: usize) -> Option<Vec<SwitchOp>> {
    fn dfs(g: &RowGraph, tgt: &RowGraph, disc0: usize, left: usize, acc: &mut Vec<SwitchOp>) -> bool {
        if left == 0 {
            return false;
        }
        let mut cands: Vec<(usize, SwitchOp, RowGraph)> = g
            .legal_switchings()
            .into_iter()
            .filter(|op| anchored_pair(g, &[op.i1, op.i2]).is_some())
            .map(|op| {
                let mut h = g.clone();
                h.switch(op).expect("legal");
                (h.disc(tgt), op, h)
            })
            .collect();
        cands.sort_by_key(|c| (c.0, c.1));
        for (dh, op, h) in cands {
            acc.push(op);
            if dh + 2 <= disc0 && (h == *tgt || anchored_pair(&h, &[]).is_some()) {
                return true;
            }
            if dh + 2 <= disc0 + 4 * (left - 1) && dfs(&h, tgt, disc0, left - 1, acc) {
                return true;
            }
            acc.pop();
        }
        false
    }
    (1..=3).find_map(|depth| {
        let mut acc = Vec::new();
        dfs(cur, tgt, disc0, depth, &mut acc).then_some(acc)
    })
}

fn plan_macro(cur: &RowGraph, tgt: &RowGraph) -> Option<(LargeCase, Vec<SwitchOp>)> {
    let i1 = cur.first_differing(tgt)?;
    let j1 = cur.surplus(tgt, i1)?;
    let j2 = cur.deficit(tgt, i1)?;
    let i2 = (0..cur.m()).find(|&r| r != i1 && cur.has(r, j2) && !tgt.has(r, j2))?;
    if cur.has(i2, j1) {
        case_two(cur, tgt, i1, i2, j1, j2)
    } else {
        case_one(cur, tgt, i1, i2, j1, j2)
    }
}

fn outside(m: usize, used: &[usize]) -> Option<usize> {
    (0..m).find(|r| !used.contains(r))
}

fn case_one(cur: &RowGraph, tgt: &RowGraph, i1: usize, i2: usize, j1: usize, j2: usize) -> Option<(LargeCase, Vec<SwitchOp>)> {
    let m = cur.m();
    let main = SwitchOp::new(i1, i2, j1, j2);
    if anchored_pair(cur, &[i1, i2]).is_some() {
        return Some((LargeCase::OneA, vec![main]));
    }
    let i3 = (0..m).filter(|&r| r != i1 && r != i2).find(|&r| {
        cur.shares_outside(r, &[])
            && (0..m).filter(|v| ![i1, i2, r].contains(v)).all(|v| !cur.shares(v, i1) && !cur.shares(v, i2))
    })?;
    let i4 = outside(m, &[i1, i2, i3])?;
    if let Some(j3) = cur.common(i1, i2) {
        let j4 = cur.row(i4)[0];
        let ops = vec![SwitchOp::new(i1, i4, j3, j4), main, SwitchOp::new(i1, i4, j4, j3)];
        return Some((LargeCase::OneB, ops));
    }
    if let Some(u) = (0..m).find(|r| ![i1, i2, i3].contains(r) && cur.row(*r) != tgt.row(*r)) {
        let jp = cur.surplus(tgt, u)?;
        let jpp = cur.deficit(tgt, u)?;
        let q = (0..m).find(|&r| r != u && cur.has(r, jpp) && !tgt.has(r, jpp))?;
        return Some((LargeCase::OneC, vec![SwitchOp::new(u, q, jp, jpp)]));
    }
    match (cur.degree(j1), cur.degree(j2)) {
        (1, 1) => {
            let j5 = cur.common(i2, i3)?;
            let j6 = cur.row(i4)[0];
            Some((LargeCase::OneD, vec![SwitchOp::new(i3, i4, j5, j6), main, SwitchOp::new(i3, i4, j6, j5)]))
        }
        (2, 2) => {
            let j4 = cur.row(i4)[0];
            Some((LargeCase::OneE, vec![SwitchOp::new(i3, i4, j2, j4), main, SwitchOp::new(i3, i4, j4, j2)]))
        }
        (1, 2) => subcase_f(cur, tgt, [i1, i2, i3, i4], j1, j2).map(|ops| (LargeCase::OneF, ops)),
        (2, 1) => subcase_f(cur, tgt, [i2, i1, i3, i4], j2, j1).map(|ops| (LargeCase::OneG, ops)),
        _ => None,
    }
}

/// The mixed-degree subcase with `a1` losing the degree-one column `b1` and `a2`
/// losing the degree-two column `b2`.
fn subcase_f(cur: &RowGraph, tgt: &RowGraph, rows: [usize; 4], b1: usize, b2: usize) -> Option<Vec<SwitchOp>> {
    let [a1, a2, i3, i4] = rows;
    let j4 = tgt
        .row(a2)
        .iter()
        .copied()
        .find(|&c| c != b2 && tgt.degree(c) == 2 && (tgt.has(a1, c) || tgt.has(i3, c)))?;
    let j5 = cur.row(i4)[0];
    let lead = SwitchOp::new(i3, i4, j4, j5);
    let back = SwitchOp::new(i3, i4, j5, j4);
    if cur.has(a2, j4) && cur.has(i3, j4) {
        Some(vec![lead, SwitchOp::new(a1, a2, b1, b2), back])
    } else if cur.has(a1, j4) && cur.has(i3, j4) {
        Some(vec![lead, SwitchOp::new(a2, a1, b2, j4), back])
    } else {
        None
    }
}

fn case_two(cur: &RowGraph, tgt: &RowGraph, i1: usize, i2: usize, j1: usize, j2: usize) -> Option<(LargeCase, Vec<SwitchOp>)> {
    let m = cur.m();
    let i3 = (0..m).find(|&r| tgt.has(r, j1) && !cur.has(r, j1))?;
    let j3 = cur.row(i3).iter().copied().find(|&c| !cur.has(i2, c))?;
    if (0..m).any(|r| ![i1, i2, i3].contains(&r) && cur.shares_outside(r, &[])) {
        let ops = vec![SwitchOp::new(i2, i3, j1, j3), SwitchOp::new(i1, i2, j1, j2)];
        return Some((LargeCase::TwoA, ops));
    }
    let j4 = cur.deficit(tgt, i2)?;
    let i5 = (0..m).find(|&r| cur.has(r, j4) && !tgt.has(r, j4))?;
    if !cur.has(i5, j2) {
        return case_one(cur, tgt, i2, i5, j2, j4).map(|(_, ops)| (LargeCase::TwoB, ops));
    }
    let i4 = outside(m, &[i1, i2, i5])?;
    let j6 = cur.row(i4)[0];
    let ops = vec![SwitchOp::new(i2, i4, j2, j6), SwitchOp::new(i1, i5, j1, j2), SwitchOp::new(i2, i4, j6, j2)];
    Some((LargeCase::TwoB, ops))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, VecDeque};

    fn rg(rows: &[&[usize]]) -> RowGraph {
        RowGraph::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn replay(h1: &RowGraph, ops: &[SwitchOp]) -> RowGraph {
        let mut g = h1.clone();
        for &op in ops {
            g.switch(op).unwrap();
        }
        g
    }

    fn bfs_distance(h1: &RowGraph, h2: &RowGraph) -> Option<usize> {
        let mut seen = HashMap::new();
        let mut queue = VecDeque::new();
        seen.insert(h1.clone(), 0);
        queue.push_back(h1.clone());
        while let Some(g) = queue.pop_front() {
            let dist = seen[&g];
            if g == *h2 {
                return Some(dist);
            }
            for op in g.legal_switchings() {
                let mut h = g.clone();
                h.switch(op).unwrap();
                if !seen.contains_key(&h) {
                    seen.insert(h.clone(), dist + 1);
                    queue.push_back(h);
                }
            }
        }
        None
    }

    #[test]
    fn identical_graphs_give_empty_paths() {
        let h = rg(&[&[0, 1, 2], &[2, 3, 4], &[4, 5, 0], &[1, 3, 5]]);
        assert!(build_path_small(&h, &h).unwrap().is_empty());
        let a = anchored_pair(&h, &[]).unwrap();
        assert!(build_path_large(&h, &h, Anchors { start: a, end: a }).unwrap().is_empty());
    }

    #[test]
    fn two_row_swap_matches_bfs() {
        let h1 = rg(&[&[0, 1, 2], &[3, 4, 5]]);
        let h2 = rg(&[&[3, 4, 5], &[0, 1, 2]]);
        let p = build_path_small(&h1, &h2).unwrap();
        assert_eq!(replay(&h1, &p.ops()), h2);
        let k = h1.disc(&h2);
        assert_eq!(k, 12);
        assert!(p.len() <= k + 2);
        assert_eq!(bfs_distance(&h1, &h2), Some(3));
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn degree_mismatch_is_rejected() {
        let h1 = rg(&[&[0, 1, 2], &[3, 4, 5]]);
        let h2 = rg(&[&[0, 1, 2], &[3, 4, 6]]);
        assert!(matches!(build_path_small(&h1, &h2), Err(Error::DegreeMismatch(_))));
    }

    #[test]
    fn stage_two_instance() {
        // Rows 0 and 1 share column 0 and nothing else is shared.
        let h1 = rg(&[&[0, 1, 2], &[0, 3, 4], &[5, 6, 7]]);
        let h2 = rg(&[&[0, 1, 3], &[0, 2, 4], &[5, 6, 7]]);
        let p = build_path_small(&h1, &h2).unwrap();
        assert_eq!(replay(&h1, &p.ops()), h2);
        assert!(p.len() <= h1.disc(&h2) + 2);
        assert!(p.steps.iter().all(|s| s.stage == SmallStage::Stage2));
        assert!(p.steps.iter().all(SmallStep::disjunction_holds));
    }

    #[test]
    fn large_rejects_bad_hypotheses() {
        let h1 = rg(&[&[0, 1, 2], &[3, 4, 5], &[6, 7, 8], &[9, 10, 11]]);
        let h2 = rg(&[&[0, 1, 3], &[2, 4, 5], &[6, 7, 8], &[9, 10, 11]]);
        let r = build_path_large(&h1, &h2, Anchors { start: (0, 1), end: (0, 1) });
        assert!(matches!(r, Err(Error::HypothesisViolated(_))));
        let small = rg(&[&[0, 1], &[0, 2], &[1, 2]]);
        let r = build_path_large(&small, &small, Anchors { start: (0, 1), end: (0, 1) });
        assert!(matches!(r, Err(Error::HypothesisViolated(_))));
    }
}
