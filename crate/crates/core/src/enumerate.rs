//! Exhaustive enumeration of d-regular bipartite (multi)graphs by backtracking
//! over rows under column-capacity constraints.

use crate::error::{Error, Result};
use crate::graph::BipartiteMultigraph;

/// Default cap on the number of states an enumeration may produce.
pub const DEFAULT_CAP: usize = 20_000;

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|x| (x as f64).ln()).sum()
}

/// Heuristic size estimate used to refuse infeasible enumerations up front.
///
/// Multigraphs: `(nd)! / (d!)^{2n}`, the number of configurations divided by the
/// largest fibre. Simple graphs: the same count times `e^{-(d-1)²/2}`.
pub fn estimate_size(n: usize, d: usize, simple_only: bool) -> f64 {
    let ln = ln_factorial(n * d) - 2.0 * n as f64 * ln_factorial(d);
    let ln = if simple_only { ln - ((d as f64 - 1.0).powi(2)) / 2.0 } else { ln };
    ln.exp()
}

/// All d-regular bipartite graphs on `[n] ⊔ [n]` (simple ones only if requested),
/// in lexicographic order of their instance arrays.
pub fn enumerate_graphs(n: usize, d: usize, simple_only: bool, cap: usize) -> Result<Vec<BipartiteMultigraph>> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter("n and d must be positive".into()));
    }
    if simple_only && d > n {
        return Ok(Vec::new());
    }
    let estimate = estimate_size(n, d, simple_only);
    if estimate > cap as f64 {
        return Err(Error::TooLargeToEnumerate { estimate, cap });
    }
    let hard_limit = cap.saturating_mul(4);
    let mut out = Vec::new();
    let mut slots = vec![0u32; n * d];
    let mut col_left = vec![d; n];
    let mut st = Search { n, d, simple_only, hard_limit, out: &mut out, cap };
    st.row(0, &mut slots, &mut col_left)?;
    Ok(out)
}

struct Search<'a> {
    n: usize,
    d: usize,
    simple_only: bool,
    hard_limit: usize,
    cap: usize,
    out: &'a mut Vec<BipartiteMultigraph>,
}

impl Search<'_> {
    fn row(&mut self, i: usize, slots: &mut [u32], col_left: &mut [usize]) -> Result<()> {
        if i == self.n {
            self.out.push(BipartiteMultigraph::from_slots(self.n, self.d, slots.to_vec())?);
            if self.out.len() > self.hard_limit {
                return Err(Error::TooLargeToEnumerate { estimate: self.out.len() as f64, cap: self.cap });
            }
            return Ok(());
        }
        self.fill(i, 0, 0, slots, col_left)
    }

    fn fill(&mut self, i: usize, pos: usize, min_col: usize, slots: &mut [u32], col_left: &mut [usize]) -> Result<()> {
        if pos == self.d {
            let rows_after = self.n - i - 1;
            let per_row = if self.simple_only { 1 } else { self.d };
            if col_left.iter().all(|&c| c <= rows_after * per_row) {
                self.row(i + 1, slots, col_left)?;
            }
            return Ok(());
        }
        let remaining = self.d - pos;
        for c in min_col..self.n {
            if self.simple_only && self.n - c < remaining {
                break;
            }
            if col_left[c] == 0 {
                continue;
            }
            col_left[c] -= 1;
            slots[i * self.d + pos] = c as u32;
            let next = if self.simple_only { c + 1 } else { c };
            self.fill(i, pos + 1, next, slots, col_left)?;
            col_left[c] += 1;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_counts() {
        assert_eq!(enumerate_graphs(3, 2, true, DEFAULT_CAP).unwrap().len(), 6);
        assert_eq!(enumerate_graphs(3, 2, false, DEFAULT_CAP).unwrap().len(), 21);
        assert_eq!(enumerate_graphs(4, 3, true, DEFAULT_CAP).unwrap().len(), 24);
        assert_eq!(enumerate_graphs(4, 2, true, DEFAULT_CAP).unwrap().len(), 90);
        assert_eq!(enumerate_graphs(4, 2, false, DEFAULT_CAP).unwrap().len(), 282);
    }

    #[test]
    fn respects_cap() {
        assert!(matches!(enumerate_graphs(8, 4, false, 1000), Err(Error::TooLargeToEnumerate { .. })));
    }

    #[test]
    fn output_is_sorted_and_distinct() {
        let v = enumerate_graphs(4, 2, false, DEFAULT_CAP).unwrap();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }
}
