//! Incremental decoding state shared by both decoders.
//!
//! Everything the voting round needs is kept current after each batch of
//! flips: per-constraint local words, the unsatisfied indicator, the flip
//! target each constraint votes for, per-variable vote counts, and buckets of
//! variables grouped by vote count. A flip only touches the constraints next
//! to the flipped variables.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::tanner::TannerCode;

const NONE: u32 = u32::MAX;

/// Work counters. Each field counts unit-cost steps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OpCounters {
    /// Syndrome evaluations of a local word.
    pub checks: u64,
    /// Coset-leader lookups.
    pub inner_decodes: u64,
    /// Single-variable flips (including restorations).
    pub flips: u64,
    /// Vote-count changes.
    pub vote_updates: u64,
    /// Search bookkeeping: candidate moves examined.
    pub branch_steps: u64,
}

impl OpCounters {
    pub fn total(&self) -> u64 {
        self.checks + self.inner_decodes + self.flips + self.vote_updates + self.branch_steps
    }

    pub fn since(&self, earlier: &OpCounters) -> OpCounters {
        OpCounters {
            checks: self.checks - earlier.checks,
            inner_decodes: self.inner_decodes - earlier.inner_decodes,
            flips: self.flips - earlier.flips,
            vote_updates: self.vote_updates - earlier.vote_updates,
            branch_steps: self.branch_steps - earlier.branch_steps,
        }
    }

    pub fn add(&mut self, other: &OpCounters) {
        self.checks += other.checks;
        self.inner_decodes += other.inner_decodes;
        self.flips += other.flips;
        self.vote_updates += other.vote_updates;
        self.branch_steps += other.branch_steps;
    }
}

/// Mutable decoding state over a shared code.
#[derive(Clone)]
pub struct DecodeState<'a> {
    code: &'a TannerCode,
    t: usize,
    x: BitVector,
    /// Coordinates flipped since the last [`DecodeState::reset_flip_record`].
    w: BitVector,
    w_touched: Vec<u32>,
    local: Vec<u32>,
    unsat: Vec<bool>,
    n_unsat: usize,
    /// Variable each constraint votes to flip, or `NONE`.
    target: Vec<u32>,
    votes: Vec<u8>,
    /// `buckets[m]` holds the variables with exactly `m` votes (`m >= 1`).
    buckets: Vec<Vec<u32>>,
    bucket_pos: Vec<u32>,
    mark: Vec<u32>,
    epoch: u32,
    ops: OpCounters,
}

impl<'a> DecodeState<'a> {
    /// Full initial scan of every constraint. `t` is the largest local
    /// correction that triggers a vote.
    pub fn new(code: &'a TannerCode, t: usize, x: BitVector) -> Result<Self> {
        Error::check_len(code.len(), x.len())?;
        let g = code.graph();
        if g.c() > u8::MAX as usize {
            return Err(Error::InvalidParameter("left degree above 255".into()));
        }
        let n = code.len();
        let nr = g.n_right();
        let mut s = DecodeState {
            code,
            t,
            w: BitVector::zeros(n),
            w_touched: Vec::new(),
            local: (0..nr).map(|u| code.local_word(&x, u)).collect(),
            x,
            unsat: vec![false; nr],
            n_unsat: 0,
            target: vec![NONE; nr],
            votes: vec![0; n],
            buckets: vec![Vec::new(); g.c() + 1],
            bucket_pos: vec![0; n],
            mark: vec![0; nr],
            epoch: 0,
            ops: OpCounters::default(),
        };
        for u in 0..nr {
            s.refresh(u);
        }
        Ok(s)
    }

    pub fn code(&self) -> &'a TannerCode {
        self.code
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn word(&self) -> &BitVector {
        &self.x
    }

    pub fn into_word(self) -> BitVector {
        self.x
    }

    pub fn unsat_count(&self) -> usize {
        self.n_unsat
    }

    pub fn is_unsatisfied(&self, u: usize) -> bool {
        self.unsat[u]
    }

    /// Ascending indices of unsatisfied constraints (full scan).
    pub fn unsatisfied(&self) -> Vec<usize> {
        (0..self.unsat.len()).filter(|&u| self.unsat[u]).collect()
    }

    /// The variable constraint `u` currently votes to flip.
    pub fn vote_target(&self, u: usize) -> Option<usize> {
        match self.target[u] {
            NONE => None,
            v => Some(v as usize),
        }
    }

    /// Number of votes variable `v` receives.
    pub fn votes(&self, v: usize) -> usize {
        self.votes[v] as usize
    }

    /// Variables receiving exactly `m` votes, in no particular order.
    pub fn bucket(&self, m: usize) -> &[u32] {
        &self.buckets[m]
    }

    pub fn ops(&self) -> &OpCounters {
        &self.ops
    }

    pub(crate) fn ops_mut(&mut self) -> &mut OpCounters {
        &mut self.ops
    }

    /// Coordinates flipped since the last reset; `word() + flip_record()`
    /// is the word at that time.
    pub fn flip_record(&self) -> &BitVector {
        &self.w
    }

    /// Makes the current word the new baseline.
    pub fn reset_flip_record(&mut self) {
        for &v in &self.w_touched {
            self.w.set(v as usize, false);
        }
        self.w_touched.clear();
    }

    /// Returns to the baseline word by re-flipping every recorded coordinate.
    pub fn restore_flip_record(&mut self) {
        let mut vs: Vec<u32> = self
            .w_touched
            .iter()
            .copied()
            .filter(|&v| self.w.get(v as usize))
            .collect();
        vs.sort_unstable();
        vs.dedup();
        self.flip_set(&vs);
        debug_assert!(self.w.is_zero());
        self.w_touched.clear();
    }

    /// EasyFlip: flips every variable with exactly `m` votes and brings the
    /// bookkeeping up to date. Returns the flipped variables.
    pub fn easy_flip(&mut self, m: usize) -> Vec<u32> {
        assert!(m >= 1 && m < self.buckets.len(), "m must lie in 1..=c");
        let set = self.buckets[m].clone();
        self.flip_set(&set);
        set
    }

    /// Flips the given distinct variables, then re-examines their constraints.
    pub fn flip_set(&mut self, vs: &[u32]) {
        if vs.is_empty() {
            return;
        }
        let g = self.code.graph();
        for &v in vs {
            let v = v as usize;
            self.x.flip(v);
            self.w.flip(v);
            self.w_touched.push(v as u32);
            for (&u, &j) in g.left_neighbors(v).iter().zip(g.left_positions(v)) {
                self.local[u as usize] ^= 1 << j;
            }
        }
        self.ops.flips += vs.len() as u64;
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.fill(0);
            self.epoch = 1;
        }
        for &v in vs {
            for &u in g.left_neighbors(v as usize) {
                let u = u as usize;
                if self.mark[u] != self.epoch {
                    self.mark[u] = self.epoch;
                    self.refresh(u);
                }
            }
        }
    }

    fn refresh(&mut self, u: usize) {
        let inner = self.code.inner();
        let syn = inner.syndrome(self.local[u]);
        self.ops.checks += 1;
        let bad = syn != 0;
        if bad != self.unsat[u] {
            self.unsat[u] = bad;
            if bad {
                self.n_unsat += 1;
            } else {
                self.n_unsat -= 1;
            }
        }
        let mut new_target = NONE;
        if bad {
            self.ops.inner_decodes += 1;
            if let Some(e) = inner.leader(syn) {
                if e.count_ones() as usize <= self.t {
                    new_target = self.code.graph().right_neighbors(u)[e.trailing_zeros() as usize];
                }
            }
        }
        let old = self.target[u];
        if old != new_target {
            self.target[u] = new_target;
            if old != NONE {
                self.shift_votes(old as usize, -1);
            }
            if new_target != NONE {
                self.shift_votes(new_target as usize, 1);
            }
        }
    }

    fn shift_votes(&mut self, v: usize, delta: i32) {
        self.ops.vote_updates += 1;
        let old = self.votes[v] as usize;
        let new = (old as i32 + delta) as usize;
        if old > 0 {
            let b = &mut self.buckets[old];
            let p = self.bucket_pos[v] as usize;
            let last = *b.last().unwrap();
            b.swap_remove(p);
            if last as usize != v {
                self.bucket_pos[last as usize] = p as u32;
            }
        }
        if new > 0 {
            self.bucket_pos[v] = self.buckets[new].len() as u32;
            self.buckets[new].push(v as u32);
        }
        self.votes[v] = new as u8;
    }

    /// Recomputes everything from scratch and panics on any disagreement.
    /// Test support.
    pub fn assert_consistent(&self) {
        let fresh = DecodeState::new(self.code, self.t, self.x.clone()).unwrap();
        assert_eq!(self.local, fresh.local, "local words");
        assert_eq!(self.unsat, fresh.unsat, "unsatisfied indicator");
        assert_eq!(self.n_unsat, fresh.n_unsat, "unsatisfied count");
        assert_eq!(self.target, fresh.target, "vote targets");
        assert_eq!(self.votes, fresh.votes, "vote counts");
        for m in 1..self.buckets.len() {
            let mut a = self.buckets[m].clone();
            let mut b = fresh.buckets[m].clone();
            a.sort_unstable();
            b.sort_unstable();
            assert_eq!(a, b, "bucket {m}");
            for (p, &v) in self.buckets[m].iter().enumerate() {
                assert_eq!(self.bucket_pos[v as usize] as usize, p);
            }
        }
        assert_eq!(
            self.unsatisfied(),
            self.code.unsatisfied(&self.x).unwrap(),
            "unsatisfied set against the code"
        );
    }
}
