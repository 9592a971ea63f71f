//! Vertex-expansion checks.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::BipartiteGraph;
use crate::error::{Error, Result};

/// Maximum number of subsets the exhaustive checker will enumerate.
pub const EXHAUSTIVE_BUDGET: u64 = 100_000_000;

const TOL: f64 = 1e-9;

/// Result of an expansion check.
///
/// `verified` is only ever set by the exhaustive checker; sampling can refute
/// expansion but never establish it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub alpha: f64,
    pub delta: f64,
    /// Largest subset size examined, `floor(alpha * n)`.
    pub max_size: usize,
    pub verified: bool,
    /// A left set with `|S| <= alpha n` and `|N(S)| < delta c |S|`.
    pub witness: Option<Vec<usize>>,
    pub subsets_checked: u64,
    /// Present when the report came from random sampling.
    pub sampled: Option<SampleSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleSummary {
    pub samples: u64,
    pub violations: u64,
    /// One-sided 95% upper bound on the fraction of violating subsets
    /// (rule of three when no violation was seen).
    pub violation_rate_upper95: f64,
}

fn max_subset_size(alpha: f64, n: usize) -> usize {
    (alpha * n as f64 + TOL).floor().max(0.0) as usize
}

fn binomial_prefix_sum(n: usize, k: usize) -> u64 {
    let mut total = 0u64;
    let mut term = 1u64;
    for i in 1..=k.min(n) {
        // C(n, i) = C(n, i-1) * (n - i + 1) / i
        term = term.saturating_mul((n - i + 1) as u64) / i as u64;
        total = total.saturating_add(term);
    }
    total
}

fn expands(neighbors: usize, size: usize, c: usize, delta: f64) -> bool {
    neighbors as f64 + TOL >= delta * (c * size) as f64
}

/// Exhaustively checks every nonempty left set of size at most
/// `floor(alpha n)` for `|N(S)| >= delta c |S|`.
///
/// Sets are visited in lexicographic order of their ascending index lists,
/// and the first violating set is returned as the witness.
pub fn verify_expansion(g: &BipartiteGraph, alpha: f64, delta: f64) -> Result<ExpansionReport> {
    if !(alpha > 0.0 && alpha <= 1.0) || !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha and delta must lie in (0, 1], got {alpha} and {delta}"
        )));
    }
    let n = g.n_left();
    let k = max_subset_size(alpha, n);
    let total = binomial_prefix_sum(n, k);
    if total > EXHAUSTIVE_BUDGET {
        return Err(Error::TooLarge {
            what: "expansion subset enumeration (use sampled mode)",
            size: total,
            limit: EXHAUSTIVE_BUDGET,
        });
    }

    // One independent search per smallest element; lexicographic order across
    // branches is the order of their first elements.
    let branches: Vec<(u64, Option<Vec<usize>>)> = if k == 0 {
        Vec::new()
    } else {
        (0..n)
            .into_par_iter()
            .map(|first| search_branch(g, first, k, delta))
            .collect()
    };

    let mut checked = 0u64;
    let mut witness = None;
    for (count, w) in branches {
        checked += count;
        if w.is_some() {
            witness = w;
            break;
        }
    }
    Ok(ExpansionReport {
        alpha,
        delta,
        max_size: k,
        verified: witness.is_none(),
        witness,
        subsets_checked: checked,
        sampled: None,
    })
}

/// Enumerates sets whose minimum is `first`, stopping at the first violation.
fn search_branch(
    g: &BipartiteGraph,
    first: usize,
    k: usize,
    delta: f64,
) -> (u64, Option<Vec<usize>>) {
    struct Walk<'a> {
        g: &'a BipartiteGraph,
        k: usize,
        delta: f64,
        hits: Vec<u32>,
        covered: usize,
        stack: Vec<usize>,
        checked: u64,
    }

    impl Walk<'_> {
        fn push(&mut self, v: usize) {
            for &u in self.g.left_neighbors(v) {
                let h = &mut self.hits[u as usize];
                if *h == 0 {
                    self.covered += 1;
                }
                *h += 1;
            }
            self.stack.push(v);
        }

        fn pop(&mut self) {
            let v = self.stack.pop().unwrap();
            for &u in self.g.left_neighbors(v) {
                let h = &mut self.hits[u as usize];
                *h -= 1;
                if *h == 0 {
                    self.covered -= 1;
                }
            }
        }

        // true when a violating set was found (left on the stack)
        fn visit(&mut self) -> bool {
            self.checked += 1;
            if !expands(self.covered, self.stack.len(), self.g.c(), self.delta) {
                return true;
            }
            if self.stack.len() < self.k {
                let last = *self.stack.last().unwrap();
                for v in last + 1..self.g.n_left() {
                    self.push(v);
                    if self.visit() {
                        return true;
                    }
                    self.pop();
                }
            }
            false
        }
    }

    let mut walk = Walk {
        g,
        k,
        delta,
        hits: vec![0; g.n_right()],
        covered: 0,
        stack: Vec::with_capacity(k),
        checked: 0,
    };
    walk.push(first);
    let found = walk.visit();
    (walk.checked, found.then(|| walk.stack.clone()))
}

/// Random-subset refutation for graphs too large to check exhaustively.
///
/// Each sample draws a size uniformly from `1..=floor(alpha n)` and then a
/// uniform subset of that size. The returned report is never `verified`.
pub fn sample_expansion(
    g: &BipartiteGraph,
    alpha: f64,
    delta: f64,
    samples: u64,
    seed: u64,
) -> Result<ExpansionReport> {
    if !(alpha > 0.0 && alpha <= 1.0) || !(delta > 0.0 && delta <= 1.0) || samples == 0 {
        return Err(Error::InvalidParameter(
            "alpha, delta must lie in (0, 1] and samples must be positive".into(),
        ));
    }
    let n = g.n_left();
    let k = max_subset_size(alpha, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0u64;
    let mut witness: Option<Vec<usize>> = None;
    let mut seen = vec![false; g.n_right()];
    let mut touched = Vec::new();
    if k > 0 {
        for _ in 0..samples {
            let size = rng.gen_range(1..=k);
            let mut set = sample(&mut rng, n, size).into_vec();
            for &v in &set {
                for &u in g.left_neighbors(v) {
                    if !seen[u as usize] {
                        seen[u as usize] = true;
                        touched.push(u);
                    }
                }
            }
            let covered = touched.len();
            for u in touched.drain(..) {
                seen[u as usize] = false;
            }
            if !expands(covered, size, g.c(), delta) {
                violations += 1;
                if witness.is_none() {
                    set.sort_unstable();
                    witness = Some(set);
                }
            }
        }
    }
    let upper = if violations == 0 {
        3.0 / samples as f64
    } else {
        let p = violations as f64 / samples as f64;
        (p + 1.645 * (p * (1.0 - p) / samples as f64).sqrt()).min(1.0)
    };
    Ok(ExpansionReport {
        alpha,
        delta,
        max_size: k,
        verified: false,
        witness,
        subsets_checked: if k > 0 { samples } else { 0 },
        sampled: Some(SampleSummary {
            samples,
            violations,
            violation_rate_upper95: upper,
        }),
    })
}

/// Right-vertex counts by how many neighbors they have inside a left set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeighborCounts {
    /// `|{u : 1 <= |N(u) ∩ S| <= t}|`
    pub le_t: usize,
    /// `|{u : |N(u) ∩ S| >= t}|`
    pub ge_t: usize,
    /// `histogram[k] = |{u : |N(u) ∩ S| = k}|` for `k = 0..=d`.
    pub histogram: Vec<usize>,
}

pub fn count_bounded_neighbors(g: &BipartiteGraph, set: &[usize], t: usize) -> NeighborCounts {
    let mut hits: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();
    for &v in set {
        for &u in g.left_neighbors(v) {
            *hits.entry(u).or_default() += 1;
        }
    }
    let mut histogram = vec![0usize; g.d() + 1];
    for &k in hits.values() {
        histogram[k] += 1;
    }
    histogram[0] = g.n_right() - hits.len();
    let le_t = histogram[1..=t.min(g.d())].iter().sum();
    let ge_t = histogram[t.max(1).min(g.d() + 1)..].iter().sum();
    NeighborCounts {
        le_t,
        ge_t,
        histogram,
    }
}

/// Whether `|N_{<=t}(S)| >= ((delta (t+1) - 1) / t) c |S|` holds for this set.
pub fn verify_counting_bound(g: &BipartiteGraph, set: &[usize], t: usize, delta: f64) -> bool {
    assert!(t >= 1, "t must be at least 1");
    let counts = count_bounded_neighbors(g, set, t);
    let bound = (delta * (t + 1) as f64 - 1.0) / t as f64 * (g.c() * set.len()) as f64;
    counts.le_t as f64 + TOL >= bound
}

/// Per-`n` lower bound on `|N(S)|` for sets of size `alpha n` in a random
/// `(c, d)`-biregular graph: `(c/d)(1 - (1-alpha)^d) - 2 alpha sqrt(c ln(e/alpha))`.
pub fn expected_neighbor_lower_bound(c: usize, d: usize, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let (c, d) = (c as f64, d as f64);
    let coverage = c / d * (1.0 - (1.0 - alpha).powf(d));
    let deviation = 2.0 * alpha * (c * (1.0 - alpha.ln())).sqrt();
    Ok(coverage - deviation)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k32() -> BipartiteGraph {
        BipartiteGraph::from_left_adjacency(2, 3, 2, &[vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap()
    }

    /// Independent check: enumerate every subset of the left side by bitmask.
    fn brute_force_expansion(g: &BipartiteGraph, alpha: f64, delta: f64) -> bool {
        let n = g.n_left();
        let k = (alpha * n as f64 + 1e-9).floor() as u32;
        (1u64..1 << n).filter(|m| m.count_ones() <= k).all(|mask| {
            let mut nb = std::collections::BTreeSet::new();
            for v in (0..n).filter(|v| mask >> v & 1 == 1) {
                nb.extend(g.left_neighbors(v).iter().copied());
            }
            nb.len() as f64 + 1e-9 >= delta * (g.c() * mask.count_ones() as usize) as f64
        })
    }

    #[test]
    fn k32_expansion_examples() {
        let g = k32();
        let r = verify_expansion(&g, 1.0 / 3.0, 1.0).unwrap();
        assert!(r.verified);
        assert_eq!(r.subsets_checked, 3);

        let r = verify_expansion(&g, 2.0 / 3.0, 1.0).unwrap();
        assert!(!r.verified);
        assert_eq!(r.witness, Some(vec![0, 1]));

        let r = verify_expansion(&g, 0.2, 1.0).unwrap();
        assert!(r.verified);
        assert_eq!((r.max_size, r.subsets_checked), (0, 0));
    }

    #[test]
    fn exhaustive_agrees_with_bitmask_enumeration() {
        for seed in 0..6 {
            let g = BipartiteGraph::random_biregular(3, 4, 16, seed).unwrap();
            for &(alpha, delta) in &[(0.125, 0.75), (0.2, 0.6), (0.25, 0.5), (0.3, 0.7)] {
                let r = verify_expansion(&g, alpha, delta).unwrap();
                assert_eq!(r.verified, brute_force_expansion(&g, alpha, delta));
                if let Some(w) = &r.witness {
                    let nb = count_bounded_neighbors(&g, w, g.d());
                    let covered = g.n_right() - nb.histogram[0];
                    assert!((covered as f64) < delta * (g.c() * w.len()) as f64);
                    assert!(w.len() <= r.max_size);
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let g = BipartiteGraph::random_biregular(12, 8, 2000, 1).unwrap();
        assert!(matches!(verify_expansion(&g, 0.1, 0.8), Err(Error::TooLarge { .. })));
        let r = sample_expansion(&g, 0.01, 0.5, 200, 3).unwrap();
        assert!(!r.verified);
        assert_eq!(r.sampled.as_ref().unwrap().samples, 200);
    }

    #[test]
    fn sampling_refutes_a_bad_graph() {
        let r = sample_expansion(&k32(), 2.0 / 3.0, 1.0, 100, 0).unwrap();
        assert!(!r.verified);
        assert!(r.sampled.unwrap().violations > 0);
        assert_eq!(r.witness.unwrap().len(), 2);
    }

    #[test]
    fn neighbor_count_examples() {
        let g = k32();
        assert_eq!(count_bounded_neighbors(&g, &[0], 1).le_t, 2);
        let empty = count_bounded_neighbors(&g, &[], 1);
        assert_eq!((empty.le_t, empty.ge_t), (0, 0));
        assert_eq!(empty.histogram, vec![2, 0, 0, 0]);
        let pair = count_bounded_neighbors(&g, &[0, 1], 1);
        assert_eq!(pair.le_t, 0);
        assert_eq!(pair.histogram, vec![0, 0, 2, 0]);
    }

    #[test]
    fn counting_bound_examples() {
        let g = k32();
        // equality: 2 >= ((1*2 - 1)/1) * 2 * 1
        assert!(verify_counting_bound(&g, &[0], 1, 1.0));
        // delta = 1/2, t = 1 gives a zero bound
        assert!(verify_counting_bound(&g, &[0, 1, 2], 1, 0.5));
    }

    #[test]
    fn neighbor_bound_examples() {
        let at_one = expected_neighbor_lower_bound(12, 8, 1.0).unwrap();
        assert!((at_one - (12.0 / 8.0 - 2.0 * 12f64.sqrt())).abs() < 1e-12);

        // (2/3)(1 - (2/3)^3) - (2/3) sqrt(2 ln(3e))
        let v = expected_neighbor_lower_bound(2, 3, 1.0 / 3.0).unwrap();
        let by_hand = (2.0 / 3.0) * (1.0 - 8.0 / 27.0) - (2.0 / 3.0) * (2.0 * (3.0f64 * std::f64::consts::E).ln()).sqrt();
        assert!((v - by_hand).abs() < 1e-12);

        // c=12, d=8, alpha=0.05 evaluated term by term
        let cover = 1.5 * (1.0 - 0.95f64.powi(8));
        let dev = 0.1 * (12.0 * (1.0 + 20f64.ln())).sqrt();
        assert!((expected_neighbor_lower_bound(12, 8, 0.05).unwrap() - (cover - dev)).abs() < 1e-12);

        assert!(expected_neighbor_lower_bound(12, 8, 0.0).is_err());
        assert!(expected_neighbor_lower_bound(12, 8, 1.5).is_err());
    }
}
