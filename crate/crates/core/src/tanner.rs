//! Tanner codes `T(G, C0)`.
//!
//! A word `x` of length `n` is a codeword when, for every constraint `u`, the
//! restriction `x_{N(u)}` lies in the inner code. Restrictions list
//! coordinates in ascending left-vertex order: bit `j` of the local word is
//! `x[N(u)[j]]`.

use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::graph::BipartiteGraph;
use crate::inner::InnerCode;

/// Largest code dimension accepted by [`TannerCode::min_distance_bruteforce`].
pub const MAX_MINDIST_DIM: usize = 24;
/// Largest code dimension accepted by [`TannerCode::nearest_codeword_oracle`].
pub const MAX_ORACLE_DIM: usize = 20;

#[derive(Clone)]
pub struct TannerCode {
    graph: Arc<BipartiteGraph>,
    inner: Arc<InnerCode>,
    // Global matrices cost O(n^2 n_right) to reduce, so they are only built
    // when encoding or brute-force oracles ask for them.
    generator: Arc<OnceLock<BitMatrix>>,
}

impl std::fmt::Debug for TannerCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TannerCode")
            .field("graph", &self.graph)
            .field("inner", &self.inner)
            .finish_non_exhaustive()
    }
}

impl TannerCode {
    pub fn new(graph: BipartiteGraph, inner: InnerCode) -> Result<Self> {
        if graph.d() != inner.len() {
            return Err(Error::InvalidParameter(format!(
                "right degree {} differs from inner block length {}",
                graph.d(),
                inner.len()
            )));
        }
        Ok(TannerCode {
            graph: Arc::new(graph),
            inner: Arc::new(inner),
            generator: Arc::new(OnceLock::new()),
        })
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn inner(&self) -> &InnerCode {
        &self.inner
    }

    /// Block length `n`.
    pub fn len(&self) -> usize {
        self.graph.n_left()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The restriction `x_{N(u)}` as a mask.
    #[inline]
    pub fn local_word(&self, x: &BitVector, u: usize) -> u32 {
        self.graph
            .right_neighbors(u)
            .iter()
            .enumerate()
            .fold(0u32, |w, (j, &v)| w | (u32::from(x.get(v as usize)) << j))
    }

    #[inline]
    pub fn is_satisfied(&self, x: &BitVector, u: usize) -> bool {
        self.inner.syndrome(self.local_word(x, u)) == 0
    }

    pub fn is_codeword(&self, x: &BitVector) -> Result<bool> {
        Error::check_len(self.len(), x.len())?;
        Ok((0..self.graph.n_right()).all(|u| self.is_satisfied(x, u)))
    }

    /// Ascending indices of constraints whose restriction is not an inner codeword.
    pub fn unsatisfied(&self, x: &BitVector) -> Result<Vec<usize>> {
        Error::check_len(self.len(), x.len())?;
        Ok((0..self.graph.n_right())
            .filter(|&u| !self.is_satisfied(x, u))
            .collect())
    }

    /// Stacks the inner parity checks of every constraint, mapped through its
    /// neighbor order: `(d - k0) * n_right` rows by `n` columns.
    pub fn global_parity_check(&self) -> BitMatrix {
        let n = self.len();
        let h = self.inner.parity_check();
        let mut rows = Vec::with_capacity(h.num_rows() * self.graph.n_right());
        for u in 0..self.graph.n_right() {
            let nb = self.graph.right_neighbors(u);
            for r in h.rows() {
                rows.push(BitVector::from_support(n, r.ones_iter().map(|j| nb[j] as usize)));
            }
        }
        BitMatrix::from_rows(n, rows).expect("rows have length n")
    }

    /// Basis of the code, one row per dimension. Computed on first use.
    pub fn generator(&self) -> &BitMatrix {
        self.generator.get_or_init(|| {
            let basis = self.global_parity_check().nullspace_basis();
            BitMatrix::from_rows(self.len(), basis).expect("basis vectors have length n")
        })
    }

    pub fn dimension(&self) -> usize {
        self.generator().num_rows()
    }

    /// `sum_i msg[i] * generator[i]`.
    pub fn encode(&self, msg: &BitVector) -> Result<BitVector> {
        let g = self.generator();
        Error::check_len(g.num_rows(), msg.len())?;
        let mut x = BitVector::zeros(self.len());
        for i in msg.ones_iter() {
            x.add_assign(g.row(i))?;
        }
        Ok(x)
    }

    /// Encoding of a uniformly random message drawn from `seed`.
    pub fn random_codeword(&self, seed: u64) -> BitVector {
        let k = self.dimension();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let msg = BitVector::from_bools(&(0..k).map(|_| rng.gen::<bool>()).collect::<Vec<_>>());
        self.encode(&msg).expect("message has code dimension")
    }

    /// Exact minimum distance, by enumerating all codewords.
    pub fn min_distance_bruteforce(&self) -> Result<usize> {
        let g = self.generator();
        let k = g.num_rows();
        if k == 0 {
            return Err(Error::ZeroDimension);
        }
        if k > MAX_MINDIST_DIM {
            return Err(Error::TooLarge {
                what: "code dimension",
                size: k as u64,
                limit: MAX_MINDIST_DIM as u64,
            });
        }
        let mut best = usize::MAX;
        gray_walk(g, |w| {
            if !w.is_zero() {
                best = best.min(w.weight());
            }
        });
        Ok(best)
    }

    /// A codeword at minimum Hamming distance from `x`; among ties, the
    /// lexicographically smallest (compared from coordinate 0).
    pub fn nearest_codeword_oracle(&self, x: &BitVector) -> Result<(BitVector, usize)> {
        Error::check_len(self.len(), x.len())?;
        let g = self.generator();
        if g.num_rows() > MAX_ORACLE_DIM {
            return Err(Error::TooLarge {
                what: "code dimension",
                size: g.num_rows() as u64,
                limit: MAX_ORACLE_DIM as u64,
            });
        }
        let mut best: Option<(BitVector, usize)> = None;
        gray_walk(g, |w| {
            let dist = w.hamming_distance(x).expect("equal lengths");
            let better = match &best {
                None => true,
                Some((b, bd)) => dist < *bd || (dist == *bd && lex_less(w, b)),
            };
            if better {
                best = Some((w.clone(), dist));
            }
        });
        Ok(best.expect("the zero word is always a codeword"))
    }

    /// Flips `weight` distinct coordinates of `x` chosen uniformly from `seed`.
    pub fn corrupt(&self, x: &BitVector, weight: usize, seed: u64) -> Result<BitVector> {
        corrupt(x, weight, seed)
    }
}

/// Flips `weight` distinct coordinates of `x` chosen uniformly from `seed`.
pub fn corrupt(x: &BitVector, weight: usize, seed: u64) -> Result<BitVector> {
    if weight > x.len() {
        return Err(Error::InvalidParameter(format!(
            "cannot flip {weight} of {} coordinates",
            x.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = x.clone();
    for i in sample(&mut rng, x.len(), weight) {
        y.flip(i);
    }
    Ok(y)
}

fn lex_less(a: &BitVector, b: &BitVector) -> bool {
    let diff = a.add(b).expect("equal lengths");
    let first = diff.ones_iter().next();
    first.is_some_and(|i| !a.get(i))
}

/// Calls `f` on every vector in the row span of `g`, in Gray-code order.
fn gray_walk(g: &BitMatrix, mut f: impl FnMut(&BitVector)) {
    let k = g.num_rows();
    let mut w = BitVector::zeros(g.num_cols());
    f(&w);
    for i in 1u64..1 << k {
        w.add_assign(g.row(i.trailing_zeros() as usize)).expect("equal lengths");
        f(&w);
    }
}

/// The `tanner v1` manifest: one line naming a graph file and an inner-code
/// file. Relative paths resolve against the manifest's directory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub graph: PathBuf,
    pub inner: PathBuf,
}

impl Manifest {
    pub fn to_text(&self) -> String {
        format!("tanner v1 {} {}\n", self.graph.display(), self.inner.display())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (ln, line) = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .find(|(_, l)| !l.is_empty())
            .ok_or_else(|| Error::parse(1, "empty manifest"))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[..] {
            ["tanner", "v1", graph, inner] => Ok(Manifest {
                graph: graph.into(),
                inner: inner.into(),
            }),
            _ => Err(Error::parse(ln, "expected `tanner v1 <graph-path> <inner-path>`")),
        }
    }

    /// Loads and validates the bundle the manifest at `path` points to.
    pub fn load(path: impl AsRef<Path>) -> Result<TannerCode> {
        let path = path.as_ref();
        let m = Self::from_text(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let graph = BipartiteGraph::read_file(base.join(&m.graph))?;
        let inner = InnerCode::read_file(base.join(&m.inner))?;
        TannerCode::new(graph, inner)
    }

    /// Writes the graph, inner code and manifest side by side in `dir`.
    pub fn save(code: &TannerCode, dir: impl AsRef<Path>, stem: &str) -> Result<PathBuf> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let m = Manifest {
            graph: format!("{stem}.graph").into(),
            inner: format!("{stem}.inner").into(),
        };
        code.graph().write_file(dir.join(&m.graph))?;
        code.inner().write_file(dir.join(&m.inner))?;
        let path = dir.join(format!("{stem}.tanner"));
        std::fs::write(&path, m.to_text())?;
        Ok(path)
    }
}
