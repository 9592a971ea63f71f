#![allow(dead_code)]

use expander_codes::decode::DecoderParams;
use expander_codes::graph::verify_expansion;
use expander_codes::{BipartiteGraph, BitMatrix, BitVector, InnerCode, TannerCode};

/// K_{3,2}: three left vertices, each joined to both right vertices.
pub fn k32() -> BipartiteGraph {
    BipartiteGraph::from_left_adjacency(2, 3, 2, &[vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap()
}

pub fn k32_rep3() -> TannerCode {
    TannerCode::new(k32(), InnerCode::repetition(3).unwrap()).unwrap()
}

/// `d / d0` aligned blocks of `d0` ones: distance `d0`, and it contains
/// `0^{d-d0} 1^{d0}`.
pub fn block_repetition(d: usize, d0: usize) -> InnerCode {
    assert_eq!(d % d0, 0);
    let rows = (0..d / d0)
        .map(|b| BitVector::from_support(d, b * d0..(b + 1) * d0))
        .collect();
    InnerCode::from_generator(BitMatrix::from_rows(d, rows).unwrap()).unwrap()
}

/// The [6,3,3] shortened Hamming code.
pub fn shortened_hamming_6() -> InnerCode {
    InnerCode::from_generator(BitMatrix::from_strs(&["100110", "010101", "001011"]).unwrap()).unwrap()
}

/// A code together with expansion parameters it was checked to satisfy.
pub struct Fixture {
    pub name: String,
    pub code: TannerCode,
    pub alpha: f64,
    pub delta: f64,
}

impl Fixture {
    pub fn alpha_n(&self) -> usize {
        (self.alpha * self.code.len() as f64 + 1e-9).floor() as usize
    }

    pub fn params(&self) -> DecoderParams {
        let g = self.code.graph();
        expander_codes::decode::derive_params(
            g.c(),
            g.d(),
            self.alpha,
            self.delta,
            self.code.inner().distance(),
            self.code.len(),
        )
        .unwrap()
    }
}

/// Exact `min |N(S)| / (c |S|)` over nonempty `S` with `|S| <= alpha n`, by
/// enumeration. The library verifier must accept `g` at this `delta`.
pub fn expansion_delta(g: &BipartiteGraph, alpha: f64) -> f64 {
    let k = (alpha * g.n_left() as f64 + 1e-9).floor() as usize;
    let mut best = f64::INFINITY;
    let mut seen = vec![0u32; g.n_right()];
    let mut stamp = 0u32;
    for_each_subset(g.n_left(), k, |s| {
        if s.is_empty() {
            return;
        }
        stamp += 1;
        let mut hits = 0usize;
        for &v in s {
            for &u in g.left_neighbors(v) {
                if seen[u as usize] != stamp {
                    seen[u as usize] = stamp;
                    hits += 1;
                }
            }
        }
        best = best.min(hits as f64 / (g.c() * s.len()) as f64);
    });
    assert!(verify_expansion(g, alpha, best).unwrap().verified);
    best
}

/// Random `(c, d)` graphs at the first seeds whose exact expansion at
/// `alpha` exceeds `min_delta`.
pub fn verified_random(
    c: usize,
    d: usize,
    n: usize,
    inner: &InnerCode,
    alpha: f64,
    min_delta: f64,
    count: usize,
) -> Vec<Fixture> {
    let mut out = Vec::new();
    for seed in 0..200 {
        if out.len() == count {
            break;
        }
        let g = BipartiteGraph::random_biregular(c, d, n, seed).unwrap();
        let delta = expansion_delta(&g, alpha);
        if delta > min_delta + 1e-6 {
            out.push(Fixture {
                name: format!("random({c},{d}) n={n} seed={seed} delta={delta:.3}"),
                code: TannerCode::new(g, inner.clone()).unwrap(),
                alpha,
                delta,
            });
        }
    }
    assert_eq!(out.len(), count, "not enough verified ({c},{d}) graphs at n={n}");
    out
}

/// Calls `f` on every subset of `0..n` with at most `k` elements, in
/// lexicographic order, starting with the empty set.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    fn walk(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        f(cur);
        if cur.len() == k {
            return;
        }
        for v in start..n {
            cur.push(v);
            walk(n, k, v + 1, cur, f);
            cur.pop();
        }
    }
    walk(n, k, 0, &mut Vec::new(), &mut f);
}

/// Every codeword, by enumerating the generator's span.
pub fn codewords(code: &TannerCode) -> Vec<BitVector> {
    let g = code.generator();
    let k = g.num_rows();
    assert!(k <= 16, "dimension {k} is too large to enumerate");
    (0u32..1 << k)
        .map(|m| {
            let msg = BitVector::from_bools(&(0..k).map(|i| m >> i & 1 == 1).collect::<Vec<_>>());
            code.encode(&msg).unwrap()
        })
        .collect()
}

pub fn word_from_mask(n: usize, mask: u64) -> BitVector {
    BitVector::from_support(n, (0..n).filter(|&i| mask >> i & 1 == 1))
}
