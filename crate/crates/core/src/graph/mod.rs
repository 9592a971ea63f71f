//! Biregular bipartite graphs.
//!
//! Left vertices are code coordinates (variables), right vertices are
//! constraints. All indices are 0-based.

mod expansion;
mod lowerbound;

pub use expansion::{
    count_bounded_neighbors, expected_neighbor_lower_bound, sample_expansion,
    verify_counting_bound, verify_expansion, ExpansionReport, NeighborCounts, SampleSummary,
    EXHAUSTIVE_BUDGET,
};
pub use lowerbound::{
    admissible_degrees, build_lowerbound_graph, build_lowerbound_graph_at, LowerBoundGraph,
    LowerBoundSummary, LOWERBOUND_ALPHAS,
};

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A simple `(c, d)`-biregular bipartite graph.
///
/// Both adjacency directions are stored flat; every neighbor list is strictly
/// ascending.
#[derive(Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n_left: usize,
    n_right: usize,
    c: usize,
    d: usize,
    left_adj: Vec<u32>,
    right_adj: Vec<u32>,
    // position of each left-adjacency entry inside the right vertex's list
    left_pos: Vec<u32>,
}

impl std::fmt::Debug for BipartiteGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "BipartiteGraph {{ c: {}, d: {}, n_left: {}, n_right: {} }}",
            self.c, self.d, self.n_left, self.n_right
        )
    }
}

impl BipartiteGraph {
    /// Builds a graph from per-left-vertex neighbor lists, validating
    /// simplicity and biregularity. Lists need not be sorted.
    pub fn from_left_adjacency(
        c: usize,
        d: usize,
        n_right: usize,
        lists: &[Vec<usize>],
    ) -> Result<Self> {
        let n_left = lists.len();
        if c == 0 || d == 0 {
            return Err(Error::InvalidParameter("degrees must be positive".into()));
        }
        if n_left * c != n_right * d {
            return Err(Error::InvalidParameter(format!(
                "n_left * c = {} but n_right * d = {}",
                n_left * c,
                n_right * d
            )));
        }
        let mut left_adj = Vec::with_capacity(n_left * c);
        let mut right_deg = vec![0usize; n_right];
        for (v, list) in lists.iter().enumerate() {
            if list.len() != c {
                return Err(Error::InvalidParameter(format!(
                    "left vertex {v} has degree {} instead of {c}",
                    list.len()
                )));
            }
            let mut sorted = list.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "left vertex {v} has a repeated neighbor"
                )));
            }
            for &u in &sorted {
                if u >= n_right {
                    return Err(Error::InvalidParameter(format!(
                        "left vertex {v} names right vertex {u} >= {n_right}"
                    )));
                }
                right_deg[u] += 1;
                left_adj.push(u as u32);
            }
        }
        if let Some(u) = right_deg.iter().position(|&k| k != d) {
            return Err(Error::InvalidParameter(format!(
                "right vertex {u} has degree {} instead of {d}",
                right_deg[u]
            )));
        }
        let mut right_adj = vec![0u32; n_right * d];
        let mut left_pos = vec![0u32; n_left * c];
        let mut fill = vec![0usize; n_right];
        // left vertices are visited in ascending order, so right lists come out sorted
        for v in 0..n_left {
            for i in v * c..(v + 1) * c {
                let u = left_adj[i] as usize;
                right_adj[u * d + fill[u]] = v as u32;
                left_pos[i] = fill[u] as u32;
                fill[u] += 1;
            }
        }
        Ok(BipartiteGraph {
            n_left,
            n_right,
            c,
            d,
            left_adj,
            right_adj,
            left_pos,
        })
    }

    /// Uniformly paired stubs followed by edge-swap repair of repeated edges.
    ///
    /// The result is a deterministic function of `(c, d, n, seed)`.
    pub fn random_biregular(c: usize, d: usize, n: usize, seed: u64) -> Result<Self> {
        if c == 0 || d == 0 || n == 0 {
            return Err(Error::InvalidParameter("c, d and n must be positive".into()));
        }
        if !(n * c).is_multiple_of(d) {
            return Err(Error::InvalidParameter(format!(
                "n * c = {} is not divisible by d = {d}",
                n * c
            )));
        }
        let n_right = n * c / d;
        if c > n_right || d > n {
            return Err(Error::InvalidParameter(format!(
                "no simple ({c},{d})-biregular graph with {n} left and {n_right} right vertices"
            )));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // slot s belongs to left vertex s / c
        let mut slots: Vec<u32> = (0..n_right as u32)
            .flat_map(|u| std::iter::repeat_n(u, d))
            .collect();
        slots.shuffle(&mut rng);

        let has = |slots: &[u32], v: usize, u: u32, skip: usize| {
            (v * c..(v + 1) * c).any(|s| s != skip && slots[s] == u)
        };
        let cap = 100 * n * c;
        let mut attempts = 0usize;
        loop {
            // slots repeating an earlier slot of the same left vertex
            let bad: Vec<usize> = (0..n * c)
                .filter(|&s| (s / c * c..s).any(|x| slots[x] == slots[s]))
                .collect();
            if bad.is_empty() {
                break;
            }
            for s in bad {
                let v = s / c;
                // an earlier swap in this pass may already have fixed it
                if !has(&slots, v, slots[s], s) {
                    continue;
                }
                loop {
                    attempts += 1;
                    if attempts > cap {
                        return Err(Error::Generation(format!(
                            "duplicate-edge repair exceeded {cap} swap attempts; try another seed"
                        )));
                    }
                    let s2 = rng.gen_range(0..n * c);
                    let v2 = s2 / c;
                    if v2 == v {
                        continue;
                    }
                    let (u, u2) = (slots[s], slots[s2]);
                    if has(&slots, v, u2, s) || has(&slots, v2, u, s2) {
                        continue;
                    }
                    slots.swap(s, s2);
                    break;
                }
            }
        }

        let lists: Vec<Vec<usize>> = slots
            .chunks(c)
            .map(|ch| ch.iter().map(|&u| u as usize).collect())
            .collect();
        Self::from_left_adjacency(c, d, n_right, &lists)
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    /// Left degree.
    pub fn c(&self) -> usize {
        self.c
    }

    /// Right degree.
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn left_neighbors(&self, v: usize) -> &[u32] {
        &self.left_adj[v * self.c..(v + 1) * self.c]
    }

    /// `left_positions(v)[i]` is the index of `v` within
    /// `right_neighbors(left_neighbors(v)[i])`.
    #[inline]
    pub fn left_positions(&self, v: usize) -> &[u32] {
        &self.left_pos[v * self.c..(v + 1) * self.c]
    }

    #[inline]
    pub fn right_neighbors(&self, u: usize) -> &[u32] {
        &self.right_adj[u * self.d..(u + 1) * self.d]
    }

    /// Serializes in the `bigraph v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.left_adj.len() * 6 + 32);
        writeln!(out, "{} {} {} {}", self.c, self.d, self.n_left, self.n_right).unwrap();
        for v in 0..self.n_left {
            let mut first = true;
            for u in self.left_neighbors(v) {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{u}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Parses the `bigraph v1` text format: a `c d nL nR` header and `nL`
    /// lines of `c` ascending right indices.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty graph file"))?;
        let head = parse_ints(ln, header)?;
        let [c, d, n_left, n_right] = head[..] else {
            return Err(Error::parse(ln, "header must be `c d nL nR`"));
        };
        let mut lists = Vec::with_capacity(n_left);
        for v in 0..n_left {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| Error::parse(ln, format!("expected {n_left} adjacency lines")))?;
            let list = parse_ints(ln, line)?;
            if list.len() != c {
                return Err(Error::parse(ln, format!("left vertex {v} lists {} neighbors, expected {c}", list.len())));
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::parse(ln, "neighbor list must be strictly ascending"));
            }
            lists.push(list);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::parse(ln, "trailing content after adjacency lines"));
        }
        Self::from_left_adjacency(c, d, n_right, &lists)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        Ok(std::fs::write(path, self.to_text())?)
    }
}

fn parse_ints(line_no: usize, line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|f| {
            f.parse()
                .map_err(|_| Error::parse(line_no, format!("bad integer {f:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k32() -> BipartiteGraph {
        BipartiteGraph::from_left_adjacency(2, 3, 2, &[vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap()
    }

    fn assert_invariants(g: &BipartiteGraph) {
        assert_eq!(g.n_left() * g.c(), g.n_right() * g.d());
        for v in 0..g.n_left() {
            let nb = g.left_neighbors(v);
            assert_eq!(nb.len(), g.c());
            assert!(nb.windows(2).all(|w| w[0] < w[1]));
            for (&u, &j) in nb.iter().zip(g.left_positions(v)) {
                assert_eq!(g.right_neighbors(u as usize)[j as usize], v as u32);
            }
        }
        for u in 0..g.n_right() {
            let nb = g.right_neighbors(u);
            assert!(nb.windows(2).all(|w| w[0] < w[1]));
            for &v in nb {
                assert!(g.left_neighbors(v as usize).contains(&(u as u32)));
            }
        }
    }

    #[test]
    fn forced_complete_graph() {
        for seed in 0..20 {
            let g = BipartiteGraph::random_biregular(2, 3, 3, seed).unwrap();
            assert_eq!(g, k32());
        }
    }

    #[test]
    fn generated_graph_is_biregular() {
        let g = BipartiteGraph::random_biregular(3, 6, 12, 7).unwrap();
        assert_eq!(g.n_right(), 6);
        assert_invariants(&g);
    }

    #[test]
    fn divisibility_is_checked() {
        assert!(matches!(
            BipartiteGraph::random_biregular(2, 3, 4, 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let a = BipartiteGraph::random_biregular(12, 8, 200, 99).unwrap();
        let b = BipartiteGraph::random_biregular(12, 8, 200, 99).unwrap();
        let c = BipartiteGraph::random_biregular(12, 8, 200, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_invariants(&a);
    }

    #[test]
    fn rejects_inconsistent_adjacency() {
        assert!(BipartiteGraph::from_left_adjacency(2, 3, 2, &[vec![0, 0], vec![0, 1], vec![1, 1]]).is_err());
        assert!(BipartiteGraph::from_left_adjacency(2, 2, 3, &[vec![0, 1], vec![0, 1], vec![2, 2]]).is_err());
        assert!(BipartiteGraph::from_text("2 3 3 2\n0 1\n1 0\n0 1\n").is_err());
        assert!(BipartiteGraph::from_text("2 3 3 2\n0 1\n0 1\n").is_err());
    }

    #[test]
    fn text_round_trip() {
        let g = BipartiteGraph::random_biregular(3, 6, 12, 7).unwrap();
        let text = g.to_text();
        assert!(text.starts_with("3 6 12 6\n"));
        assert_eq!(BipartiteGraph::from_text(&text).unwrap(), g);
    }

    proptest! {
        #[test]
        fn random_graphs_satisfy_invariants(c in 1usize..6, d in 1usize..7, k in 1usize..6, seed: u64) {
            // n chosen so that n * c is divisible by d and the graph can be simple
            let n = d * k.max(c);
            let g = BipartiteGraph::random_biregular(c, d, n, seed).unwrap();
            assert_invariants(&g);
            prop_assert_eq!(BipartiteGraph::from_text(&g.to_text()).unwrap(), g);
        }
    }
}
