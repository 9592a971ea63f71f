//! Expanders whose Tanner codes contain a weight-`d0` codeword.
//!
//! Left vertices split into `L1 = 0..n-d0` and `L2 = n-d0..n`. Right
//! vertices are ordered `R1, R2, R3`:
//!
//! * `R1`: a random `(c-1, d)` graph on `L1`, checked to expand by 3/4.
//! * `R2`: `c` constraints; constraint `i` sees `i(d-d0)..(i+1)(d-d0)` and all of `L2`.
//! * `R3`: disjoint blocks of `d` consecutive vertices covering
//!   `(d-d0)c..n-d0`.
//!
//! The word `0^{n-d0} 1^{d0}` restricts to zero on `R1 ∪ R3` and to
//! `0^{d-d0} 1^{d0}` on `R2`, so it lies in the Tanner code for any inner code
//! containing that pattern.

use serde::Serialize;

use super::{verify_expansion, BipartiteGraph};
use crate::error::{Error, Result};

/// Candidate `alpha` values, tried largest first.
pub const LOWERBOUND_ALPHAS: [f64; 4] = [0.2, 0.15, 0.1, 0.05];

const SEEDS_PER_DEGREE: u64 = 32;
const MAX_C: usize = 16;

#[derive(Clone, Debug)]
pub struct LowerBoundGraph {
    pub graph: BipartiteGraph,
    pub c: usize,
    /// Expansion fraction of the `R1` subgraph; the whole graph expands at `0.9 alpha`.
    pub alpha: f64,
    pub d0: usize,
    /// Number of `R1` constraints (they come first in right order).
    pub r1: usize,
    /// Seed that produced the accepted `R1` subgraph.
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundSummary {
    pub c: usize,
    pub d: usize,
    pub d0: usize,
    pub n: usize,
    pub alpha: f64,
    pub r1: usize,
    pub r2: usize,
    pub r3: usize,
    pub seed: u64,
}

impl LowerBoundGraph {
    /// Index range of the `R2` constraints.
    pub fn r2_range(&self) -> std::ops::Range<usize> {
        self.r1..self.r1 + self.c
    }

    /// Index range of the `R3` constraints.
    pub fn r3_range(&self) -> std::ops::Range<usize> {
        self.r1 + self.c..self.graph.n_right()
    }

    /// The weight-`d0` word `0^{n-d0} 1^{d0}`.
    pub fn heavy_tail_word(&self) -> crate::gf2::BitVector {
        let n = self.graph.n_left();
        crate::gf2::BitVector::from_support(n, n - self.d0..n)
    }

    pub fn summary(&self) -> LowerBoundSummary {
        LowerBoundSummary {
            c: self.c,
            d: self.graph.d(),
            d0: self.d0,
            n: self.graph.n_left(),
            alpha: self.alpha,
            r1: self.r1,
            r2: self.c,
            r3: self.graph.n_right() - self.r1 - self.c,
            seed: self.seed,
        }
    }
}

/// Left degrees `c >= 3` for which the construction's counts work out.
pub fn admissible_degrees(d: usize, d0: usize, n: usize) -> Vec<usize> {
    if d0 >= d || n < d0 {
        return Vec::new();
    }
    let n1 = n - d0;
    (3..=MAX_C)
        .filter(|&c| {
            let covered = (d - d0) * c;
            covered <= n1 && (n1 - covered).is_multiple_of(d) && ((c - 1) * n1).is_multiple_of(d)
        })
        .collect()
}

/// Tries each `alpha` in [`LOWERBOUND_ALPHAS`] (largest first) and returns the
/// first successful construction.
pub fn build_lowerbound_graph(d: usize, d0: usize, n: usize, seed: u64) -> Result<LowerBoundGraph> {
    let mut last = None;
    for &alpha in &LOWERBOUND_ALPHAS {
        match build_lowerbound_graph_at(d, d0, n, alpha, seed) {
            Ok(g) => return Ok(g),
            Err(e @ Error::Generation(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Generation("no candidate alpha".into())))
}

/// Builds the graph at a fixed `alpha`, searching `c` upward from 3 and a
/// bounded number of seeds per `c`.
pub fn build_lowerbound_graph_at(
    d: usize,
    d0: usize,
    n: usize,
    alpha: f64,
    seed: u64,
) -> Result<LowerBoundGraph> {
    if d0 < 2 || d <= d0 {
        return Err(Error::InvalidParameter(format!(
            "need 2 <= d0 < d, got d = {d}, d0 = {d0}"
        )));
    }
    if n < 10 * d0 {
        return Err(Error::InvalidParameter(format!("need n >= 10 d0 = {}, got {n}", 10 * d0)));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let degrees = admissible_degrees(d, d0, n);
    if degrees.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no c in 3..={MAX_C} satisfies the divisibility conditions for d = {d}, d0 = {d0}, n = {n}"
        )));
    }
    let n1 = n - d0;
    for c in degrees {
        for k in 0..SEEDS_PER_DEGREE {
            let s = seed.wrapping_add(k);
            let Ok(g1) = BipartiteGraph::random_biregular(c - 1, d, n1, s) else {
                continue;
            };
            if !verify_expansion(&g1, alpha, 0.75)?.verified {
                continue;
            }
            let graph = assemble(&g1, c, d, d0, n)?;
            if !verify_expansion(&graph, 0.9 * alpha, 1.0 / d0 as f64)?.verified {
                continue;
            }
            return Ok(LowerBoundGraph {
                graph,
                c,
                alpha,
                d0,
                r1: g1.n_right(),
                seed: s,
            });
        }
    }
    Err(Error::Generation(format!(
        "no verifiable (c-1, {d}, {alpha}, 3/4) expander found; try a smaller alpha or another seed"
    )))
}

fn assemble(g1: &BipartiteGraph, c: usize, d: usize, d0: usize, n: usize) -> Result<BipartiteGraph> {
    let n1 = n - d0;
    let r1 = g1.n_right();
    let block = d - d0;
    let mut lists: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            if v < n1 {
                g1.left_neighbors(v).iter().map(|&u| u as usize).collect()
            } else {
                (r1..r1 + c).collect()
            }
        })
        .collect();
    for (v, list) in lists.iter_mut().enumerate().take(n1) {
        let u = if v < block * c {
            r1 + v / block
        } else {
            r1 + c + (v - block * c) / d
        };
        list.push(u);
    }
    let n_right = r1 + c + (n1 - block * c) / d;
    BipartiteGraph::from_left_adjacency(c, d, n_right, &lists)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r2_neighborhoods_follow_the_block_formula() {
        let lb = build_lowerbound_graph(4, 2, 20, 0).unwrap();
        let g = &lb.graph;
        assert_eq!((g.n_left(), g.d()), (20, 4));
        assert!(lb.c >= 3);
        for (i, u) in lb.r2_range().enumerate() {
            let nb: Vec<usize> = g.right_neighbors(u).iter().map(|&v| v as usize).collect();
            assert_eq!(nb, vec![2 * i, 2 * i + 1, 18, 19]);
        }
        for u in lb.r3_range() {
            let nb = g.right_neighbors(u);
            assert!(nb.windows(2).all(|w| w[1] == w[0] + 1));
            assert!((nb[3] as usize) < 18);
        }
    }

    #[test]
    fn heavy_tail_word_meets_constraints_all_or_nothing() {
        for &(d, d0, n) in &[(4, 2, 20), (6, 3, 33), (8, 2, 26)] {
            let Ok(lb) = build_lowerbound_graph(d, d0, n, 1) else {
                panic!("construction failed for {d} {d0} {n}");
            };
            let y = lb.heavy_tail_word();
            for u in 0..lb.graph.n_right() {
                let hits = lb.graph.right_neighbors(u).iter().filter(|&&v| y.get(v as usize)).count();
                if lb.r2_range().contains(&u) {
                    assert_eq!(hits, d0);
                } else {
                    assert_eq!(hits, 0);
                }
            }
            assert!(verify_expansion(&lb.graph, 0.9 * lb.alpha, 1.0 / d0 as f64).unwrap().verified);
        }
    }

    #[test]
    fn bad_arguments_are_rejected() {
        assert!(build_lowerbound_graph(4, 2, 19, 0).is_err());
        assert!(build_lowerbound_graph(2, 2, 40, 0).is_err());
        assert!(build_lowerbound_graph(4, 1, 40, 0).is_err());
    }
}
