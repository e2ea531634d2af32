//! d-regular bipartite multigraphs on `[n] ⊔ [n]`.
//!
//! A graph is stored as a flat array of `n·d` right endpoints: row `i`
//! occupies positions `i·d .. (i+1)·d` and lists its neighbours as a sorted
//! multiset. The array doubles as the list of edge instances, so instance
//! `a` is the pair `(a / d, slots[a])` and uniform instance sampling is O(1).

use crate::error::{Axis, Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A d-regular bipartite multigraph with `n` vertices on each side.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BipartiteMultigraph {
    n: usize,
    d: usize,
    slots: Vec<u32>,
}

impl fmt::Debug for BipartiteMultigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G[{}]", encode(self))
    }
}

/// Outcome of [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    /// All multiplicities are at most one.
    Simple,
    /// Exactly `k ≥ 1` multiplicity-two edges, pairwise non-incident, no entry above two.
    Category(usize),
    /// Any other multigraph.
    Unclassified,
}

impl Category {
    /// The category number, with simple graphs mapped to 0.
    pub fn number(self) -> Option<usize> {
        match self {
            Category::Simple => Some(0),
            Category::Category(k) => Some(k),
            Category::Unclassified => None,
        }
    }
}

/// Derived global parameters for a given `(n, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Params {
    pub n: usize,
    pub d: usize,
    /// Constant `r0 = 40`.
    pub r0: usize,
    /// Anti-expansion threshold `⌊n / (d ln² n)⌋`.
    pub z: usize,
    /// Number of field cells `⌈n / d⌉`.
    pub nhat: usize,
    /// Largest category with an s-neighbourhood extension, `d² ⌊ln n⌋`.
    pub mhat: usize,
}

impl Params {
    /// Computes the parameters with natural logarithms.
    ///
    /// For `n = 1` the threshold `z` would divide by zero; it is set to `n·d`
    /// so that every graph counts as having small anti-expansion.
    pub fn new(n: usize, d: usize) -> Params {
        let ln = (n as f64).ln();
        let z = if n <= 1 {
            n * d
        } else {
            (n as f64 / (d as f64 * ln * ln)).floor() as usize
        };
        Params {
            n,
            d,
            r0: 40,
            z,
            nhat: n.div_ceil(d.max(1)),
            mhat: d * d * (ln.floor() as usize),
        }
    }
}

impl BipartiteMultigraph {
    /// Builds a graph from an `n × n` matrix of multiplicities.
    pub fn from_matrix(n: usize, d: usize, entries: &[Vec<i64>]) -> Result<Self> {
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch(format!("expected a {n}x{n} matrix")));
        }
        if n == 0 || d == 0 {
            return Err(Error::InvalidParameter("n and d must be positive".into()));
        }
        for (i, row) in entries.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v < 0 {
                    return Err(Error::NegativeEntry { row: i, col: j });
                }
            }
        }
        for (i, row) in entries.iter().enumerate() {
            let sum: i64 = row.iter().sum();
            if sum != d as i64 {
                return Err(Error::Margin { axis: Axis::Row, index: i, sum, d });
            }
        }
        for j in 0..n {
            let sum: i64 = entries.iter().map(|r| r[j]).sum();
            if sum != d as i64 {
                return Err(Error::Margin { axis: Axis::Column, index: j, sum, d });
            }
        }
        let mut slots = Vec::with_capacity(n * d);
        for row in entries {
            for (j, &v) in row.iter().enumerate() {
                for _ in 0..v {
                    slots.push(j as u32);
                }
            }
        }
        Ok(BipartiteMultigraph { n, d, slots })
    }

    /// Builds a graph from the neighbour multiset of every left vertex (0-indexed).
    pub fn from_rows(n: usize, d: usize, rows: &[Vec<usize>]) -> Result<Self> {
        if rows.len() != n {
            return Err(Error::ShapeMismatch(format!("expected {n} rows")));
        }
        let mut m = vec![vec![0i64; n]; n];
        for (i, row) in rows.iter().enumerate() {
            for &j in row {
                if j >= n {
                    return Err(Error::ShapeMismatch(format!("column {j} out of range")));
                }
                m[i][j] += 1;
            }
        }
        Self::from_matrix(n, d, &m)
    }

    /// Builds a graph from `(i, j, mult)` triples (0-indexed).
    pub fn from_triples(n: usize, d: usize, triples: &[(usize, usize, u32)]) -> Result<Self> {
        let mut m = vec![vec![0i64; n]; n];
        for &(i, j, k) in triples {
            if i >= n || j >= n {
                return Err(Error::ShapeMismatch(format!("vertex ({i}, {j}) out of range")));
            }
            m[i][j] += k as i64;
        }
        Self::from_matrix(n, d, &m)
    }

    /// Builds the graph whose instance array is `slots` after sorting each row.
    ///
    /// Returns an error if a column has the wrong degree.
    pub fn from_slots(n: usize, d: usize, mut slots: Vec<u32>) -> Result<Self> {
        if slots.len() != n * d {
            return Err(Error::ShapeMismatch(format!("expected {} instances", n * d)));
        }
        let mut col = vec![0i64; n];
        for &j in &slots {
            if j as usize >= n {
                return Err(Error::ShapeMismatch(format!("column {j} out of range")));
            }
            col[j as usize] += 1;
        }
        if let Some((j, &s)) = col.iter().enumerate().find(|(_, &s)| s != d as i64) {
            return Err(Error::Margin { axis: Axis::Column, index: j, sum: s, d });
        }
        for row in slots.chunks_mut(d) {
            row.sort_unstable();
        }
        Ok(BipartiteMultigraph { n, d, slots })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of edge instances, `n·d`.
    pub fn num_instances(&self) -> usize {
        self.slots.len()
    }

    /// The edge instance with index `a`, as `(left, right)`.
    #[inline]
    pub fn instance(&self, a: usize) -> (usize, usize) {
        (a / self.d, self.slots[a] as usize)
    }

    /// All edge instances in row-major order.
    pub fn instances(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.slots.len()).map(move |a| self.instance(a))
    }

    /// The sorted neighbour multiset of left vertex `i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.slots[i * self.d..(i + 1) * self.d]
    }

    /// The raw instance array.
    pub fn slots(&self) -> &[u32] {
        &self.slots
    }

    /// Multiplicity of the edge `(i, j)`.
    #[inline]
    pub fn mult(&self, i: usize, j: usize) -> u32 {
        let j = j as u32;
        self.row(i).iter().filter(|&&c| c == j).count() as u32
    }

    /// Whether `(i, j)` is an edge.
    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let j = j as u32;
        self.row(i).contains(&j)
    }

    /// Distinct neighbours of `i` in increasing order.
    pub fn support(&self, i: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.row(i).iter().map(|&c| c as usize).collect();
        v.dedup();
        v
    }

    /// Left vertices adjacent to right vertex `j` (with repetition for multiedges).
    pub fn column(&self, j: usize) -> Vec<usize> {
        self.instances().filter(|&(_, c)| c == j).map(|(i, _)| i).collect()
    }

    /// Adjacency lists of all right vertices, each sorted and repeated by multiplicity.
    pub fn columns(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::with_capacity(self.d); self.n];
        for (i, j) in self.instances() {
            cols[j].push(i);
        }
        cols
    }

    /// Dense multiplicity matrix.
    pub fn matrix(&self) -> Vec<Vec<u32>> {
        let mut m = vec![vec![0u32; self.n]; self.n];
        for (i, j) in self.instances() {
            m[i][j] += 1;
        }
        m
    }

    /// Sorted nonzero `(i, j, mult)` triples, 0-indexed.
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            let row = self.row(i);
            let mut a = 0;
            while a < row.len() {
                let mut b = a;
                while b < row.len() && row[b] == row[a] {
                    b += 1;
                }
                out.push((i, row[a] as usize, (b - a) as u32));
                a = b;
            }
        }
        out
    }

    /// Whether every multiplicity is at most one.
    pub fn is_simple(&self) -> bool {
        self.slots.chunks(self.d).all(|r| r.windows(2).all(|w| w[0] != w[1]))
    }

    /// Recomputes both margins and checks that they all equal `d`.
    pub fn validate(&self) -> Result<()> {
        if self.slots.len() != self.n * self.d {
            return Err(Error::ShapeMismatch("instance count differs from n*d".into()));
        }
        let mut col = vec![0i64; self.n];
        for &j in &self.slots {
            col[j as usize] += 1;
        }
        if let Some((j, &s)) = col.iter().enumerate().find(|(_, &s)| s != self.d as i64) {
            return Err(Error::Margin { axis: Axis::Column, index: j, sum: s, d: self.d });
        }
        Ok(())
    }

    /// Replaces one occurrence of `old` by `new` in row `i`, keeping the row sorted.
    ///
    /// The caller guarantees that `old` is present.
    #[inline]
    pub(crate) fn replace_in_row(&mut self, i: usize, old: u32, new: u32) {
        let d = self.d;
        let row = &mut self.slots[i * d..(i + 1) * d];
        let mut p = row.iter().position(|&c| c == old).expect("entry present");
        row[p] = new;
        while p > 0 && row[p - 1] > row[p] {
            row.swap(p - 1, p);
            p -= 1;
        }
        while p + 1 < d && row[p + 1] < row[p] {
            row.swap(p, p + 1);
            p += 1;
        }
    }

    /// Applies simultaneous permutations to both sides: vertex `i` becomes `row_perm[i]`
    /// and vertex `j` becomes `col_perm[j]`.
    pub fn relabel(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<Self> {
        if row_perm.len() != self.n || col_perm.len() != self.n {
            return Err(Error::ShapeMismatch("permutation length differs from n".into()));
        }
        let mut m = vec![vec![0i64; self.n]; self.n];
        for (i, j) in self.instances() {
            m[row_perm[i]][col_perm[j]] += 1;
        }
        Self::from_matrix(self.n, self.d, &m)
    }

    /// Left vertices carrying an edge of multiplicity at least two, paired with that column.
    pub fn multiedges(&self) -> Vec<(usize, usize)> {
        self.edges()
            .into_iter()
            .filter(|&(_, _, m)| m >= 2)
            .map(|(i, j, _)| (i, j))
            .collect()
    }
}

/// Classifies a graph as simple, of category `k`, or unclassified.
pub fn classify(g: &BipartiteMultigraph) -> Category {
    let mut rows = std::collections::HashSet::new();
    let mut cols = std::collections::HashSet::new();
    let mut k = 0;
    for (i, j, m) in g.edges() {
        if m >= 3 {
            return Category::Unclassified;
        }
        if m == 2 {
            if !rows.insert(i) || !cols.insert(j) {
                return Category::Unclassified;
            }
            k += 1;
        }
    }
    if k == 0 {
        Category::Simple
    } else {
        Category::Category(k)
    }
}

/// Number of edges `(i, j)` for which another row through column `j`
/// shares at least two distinct columns with row `i`.
pub fn anti_expansion(g: &BipartiteMultigraph) -> Result<usize> {
    if !g.is_simple() {
        return Err(Error::NotSimple);
    }
    let n = g.n();
    let cols = g.columns();
    let mut overlap = vec![0u32; n * n];
    for col in &cols {
        for (a, &x) in col.iter().enumerate() {
            for &y in &col[a + 1..] {
                overlap[x * n + y] += 1;
                overlap[y * n + x] += 1;
            }
        }
    }
    let mut z = 0;
    for (i, j) in g.instances() {
        if cols[j].iter().any(|&k| k != i && overlap[i * n + k] >= 2) {
            z += 1;
        }
    }
    Ok(z)
}

/// Number of positions where the multiplicity matrices of two graphs differ.
pub fn tilde_distance(g1: &BipartiteMultigraph, g2: &BipartiteMultigraph) -> Result<usize> {
    if g1.n() != g2.n() || g1.d() != g2.d() {
        return Err(Error::ShapeMismatch("graphs have different (n, d)".into()));
    }
    let (m1, m2) = (g1.matrix(), g2.matrix());
    Ok(m1
        .iter()
        .zip(&m2)
        .map(|(a, b)| a.iter().zip(b).filter(|(x, y)| x != y).count())
        .sum())
}

/// Canonical text form: `n d:` followed by comma-separated `i j mult` triples,
/// 1-indexed and in lexicographic order.
pub fn encode(g: &BipartiteMultigraph) -> String {
    let body: Vec<String> = g
        .edges()
        .iter()
        .map(|&(i, j, m)| format!("{} {} {}", i + 1, j + 1, m))
        .collect();
    format!("{} {}: {}", g.n(), g.d(), body.join(", "))
}

/// Parses the canonical text form produced by [`encode`].
pub fn decode(s: &str) -> Result<BipartiteMultigraph> {
    let (head, body) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse("missing ':' after header".into()))?;
    let header: Vec<&str> = head.split_whitespace().collect();
    if header.len() != 2 {
        return Err(Error::Parse(format!("malformed header '{head}'")));
    }
    let parse = |t: &str| -> Result<usize> {
        t.parse::<usize>().map_err(|_| Error::Parse(format!("not a nonnegative integer: '{t}'")))
    };
    let (n, d) = (parse(header[0])?, parse(header[1])?);
    let mut triples = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for item in body.split(',') {
        let parts: Vec<&str> = item.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("malformed triple '{}'", item.trim())));
        }
        let (i, j, m) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if i == 0 || j == 0 || i > n || j > n || m == 0 {
            return Err(Error::Parse(format!("triple '{}' out of range", item.trim())));
        }
        if !seen.insert((i, j)) {
            return Err(Error::Parse(format!("duplicate entry ({i}, {j})")));
        }
        triples.push((i - 1, j - 1, m as u32));
    }
    BipartiteMultigraph::from_triples(n, d, &triples)
}

/// JSON interchange form with 1-indexed `[i, j, mult]` edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub d: usize,
    pub edges: Vec<[usize; 3]>,
}

impl From<&BipartiteMultigraph> for GraphJson {
    fn from(g: &BipartiteMultigraph) -> Self {
        GraphJson {
            n: g.n(),
            d: g.d(),
            edges: g.edges().iter().map(|&(i, j, m)| [i + 1, j + 1, m as usize]).collect(),
        }
    }
}

impl GraphJson {
    /// Converts back to a validated graph.
    pub fn to_graph(&self) -> Result<BipartiteMultigraph> {
        let mut triples = Vec::with_capacity(self.edges.len());
        for &[i, j, m] in &self.edges {
            if i == 0 || j == 0 {
                return Err(Error::Parse("vertices are 1-indexed".into()));
            }
            triples.push((i - 1, j - 1, m as u32));
        }
        BipartiteMultigraph::from_triples(self.n, self.d, &triples)
    }
}

/// Serializes a graph as a single-line JSON object.
pub fn to_json(g: &BipartiteMultigraph) -> String {
    serde_json::to_string(&GraphJson::from(g)).expect("graph serialization cannot fail")
}

/// Parses a graph from its JSON form.
pub fn from_json(s: &str) -> Result<BipartiteMultigraph> {
    let gj: GraphJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    gj.to_graph()
}
