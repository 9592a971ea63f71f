//! Ground-truth view of one voting round, for tests and experiment reports.

use serde::Serialize;

use super::state::DecodeState;
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Sets and ratios of a voting round relative to a known codeword `y`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruthTrace {
    /// Corrupt variables: where the current word differs from `y`.
    pub f: Vec<usize>,
    /// Voting constraints whose local decode agrees with `y`.
    pub a: Vec<usize>,
    /// Voting constraints whose local decode disagrees with `y`.
    pub b: Vec<usize>,
    /// Correct variables receiving at least one vote.
    pub z: Vec<usize>,
    /// `s[m]`: variables with exactly `m` votes, ascending; `s[0]` is empty.
    pub s: Vec<Vec<usize>>,
    /// `s_corrupt[m] = |S_m ∩ F|`.
    pub s_corrupt: Vec<usize>,
    /// `from_a[m]`: votes sent from `A` into `S_m`.
    pub from_a: Vec<usize>,
    /// Constraints seeing between 1 and `t` corrupt variables.
    pub le_t: Vec<usize>,
}

impl TruthTrace {
    /// `|A| + |B|`.
    pub fn senders(&self) -> usize {
        self.a.len() + self.b.len()
    }

    /// `sum_m m |S_m|`.
    pub fn votes_received(&self) -> usize {
        self.s.iter().enumerate().map(|(m, s)| m * s.len()).sum()
    }

    /// Fraction of `S_m` that is corrupt, when `S_m` is nonempty.
    pub fn alpha(&self, m: usize) -> Option<f64> {
        let size = self.s[m].len();
        (size > 0).then(|| self.s_corrupt[m] as f64 / size as f64)
    }

    /// Fraction of the votes received by `S_m` that come from `A`.
    pub fn beta(&self, m: usize) -> Option<f64> {
        let size = self.s[m].len();
        (size > 0).then(|| self.from_a[m] as f64 / (m * size) as f64)
    }

    /// `|F'|` after flipping `S_m`: `|F \ S_m| + |S_m ∩ Z|`.
    pub fn corrupt_after(&self, m: usize) -> usize {
        self.f.len() - self.s_corrupt[m] + (self.s[m].len() - self.s_corrupt[m])
    }
}

/// Classifies the current voting round of `state` against codeword `y`.
pub fn compute_truth_trace(state: &DecodeState<'_>, y: &BitVector) -> Result<TruthTrace> {
    let code = state.code();
    Error::check_len(code.len(), y.len())?;
    if !code.is_codeword(y)? {
        return Err(Error::InvalidParameter("reference word is not a codeword".into()));
    }
    let g = code.graph();
    let inner = code.inner();
    let c = g.c();
    let diff = state.word().add(y)?;
    let f: Vec<usize> = diff.ones_iter().collect();

    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut le_t = Vec::new();
    let mut from_a_by_var = vec![0usize; code.len()];
    for u in 0..g.n_right() {
        let seen = g.right_neighbors(u).iter().filter(|&&v| diff.get(v as usize)).count();
        if (1..=state.t()).contains(&seen) {
            le_t.push(u);
        }
        let Some(v) = state.vote_target(u) else {
            continue;
        };
        let word = code.local_word(state.word(), u);
        let e = inner.leader(inner.syndrome(word)).expect("a voting constraint decoded");
        if word ^ e == code.local_word(y, u) {
            a.push(u);
            from_a_by_var[v] += 1;
        } else {
            b.push(u);
        }
    }

    let mut s = vec![Vec::new(); c + 1];
    let mut s_corrupt = vec![0; c + 1];
    let mut from_a = vec![0; c + 1];
    let mut z = Vec::new();
    for (v, &a) in from_a_by_var.iter().enumerate() {
        let m = state.votes(v);
        if m == 0 {
            continue;
        }
        s[m].push(v);
        from_a[m] += a;
        if diff.get(v) {
            s_corrupt[m] += 1;
        } else {
            z.push(v);
        }
    }
    Ok(TruthTrace {
        f,
        a,
        b,
        z,
        s,
        s_corrupt,
        from_a,
        le_t,
    })
}
