//! The deterministic decoder: DeepFlip, HardSearch and MainDecode.

use serde::Serialize;

use super::params::DecoderParams;
use super::report::{DecodeReport, Outcome};
use super::state::{DecodeState, OpCounters};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::tanner::TannerCode;

/// Default HardSearch work budget per unit of `n + n_right * d`.
pub const DEFAULT_BUDGET_FACTOR: u64 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// HardSearch gives up with [`Error::SearchBudgetExhausted`] after
    /// `budget_factor * (n + n_right * d)` work units in a single call.
    /// `None` disables the limit.
    pub budget_factor: Option<u64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget_factor: Some(DEFAULT_BUDGET_FACTOR),
        }
    }
}

impl SearchOptions {
    pub fn unlimited() -> Self {
        SearchOptions { budget_factor: None }
    }

    pub fn budget(&self, code: &TannerCode) -> Option<u64> {
        let g = code.graph();
        self.budget_factor
            .map(|f| f.saturating_mul((g.n_left() + g.n_right() * g.d()) as u64))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeepFlipOutcome {
    /// All steps ran; `unsat[k]` is `|U^k|` with `unsat[0]` the input's.
    Completed { unsat: Vec<usize> },
    /// Step `step` (1-based) broke the pruning bound.
    Pruned { step: usize, unsat: Vec<usize> },
}

/// Runs EasyFlip with `seq[0], seq[1], ...`, stopping with `Pruned` as soon as
/// `|U^k| > (1 - eps3)^k c gamma n`.
///
/// The flip record is reset on entry, so after either outcome
/// `state.restore_flip_record()` returns to the input word.
pub fn deep_flip(state: &mut DecodeState<'_>, params: &DecoderParams, seq: &[usize]) -> DeepFlipOutcome {
    state.reset_flip_record();
    let mut unsat = vec![state.unsat_count()];
    for (i, &m) in seq.iter().enumerate() {
        state.easy_flip(m);
        unsat.push(state.unsat_count());
        if !params.within_bound(state.unsat_count(), i + 1) {
            return DeepFlipOutcome::Pruned { step: i + 1, unsat };
        }
    }
    DeepFlipOutcome::Completed { unsat }
}

/// Counters for one HardSearch call.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct HardSearchStats {
    pub input_unsat: usize,
    pub output_unsat: usize,
    /// Branches that reached depth `s0` and were tested for acceptance.
    pub leaves: u64,
    /// Moves rejected by the pruning bound.
    pub pruned: u64,
    /// EasyFlip calls that changed the word (later undone or kept).
    pub moves: u64,
    /// The moves of the accepted branch that changed the word, as
    /// `(step, m)` with 1-based steps; every other step flips nothing.
    pub accepted_moves: Vec<(usize, usize)>,
    pub ops: OpCounters,
}

struct Frame {
    /// The frame stands for the nodes at depths `lo..=cur` on one path that
    /// share a word: each is reached from the previous by a move that flips
    /// nothing.
    lo: usize,
    cur: usize,
    next_m: usize,
    noop_used: bool,
    leaf_tested: bool,
    /// Move that produced this word, undone when the frame is popped.
    via: Option<(usize, usize, Vec<u32>)>,
}

/// Searches DeepFlip sequences in `[c]^s0` in lexicographic order and keeps
/// the first one that is never pruned and ends with `|U'| <= eps4 |U|`.
///
/// The search walks the sequence tree depth first, sharing prefixes: each
/// move is undone by flipping the same set again. Sibling moves that flip
/// nothing lead to identical subtrees, so only the first is explored; runs
/// of such moves are handled in one step. The result is the same word the
/// plain enumeration would return.
///
/// On success the state holds the accepted word and its flip record holds
/// the changes. On error the state is back at the input word.
pub fn hard_search(
    state: &mut DecodeState<'_>,
    params: &DecoderParams,
    options: &SearchOptions,
) -> Result<HardSearchStats> {
    let c = state.code().graph().c();
    let s = params.s0;
    let budget = options.budget(state.code());
    let start_ops = *state.ops();
    state.reset_flip_record();
    let u0 = state.unsat_count();
    let mut stats = HardSearchStats {
        input_unsat: u0,
        ..HardSearchStats::default()
    };

    let open = |state: &DecodeState<'_>, stats: &mut HardSearchStats, depth: usize, via| -> Frame {
        if state.bucket(1).is_empty() {
            let last = params
                .last_surviving_step(state.unsat_count())
                .unwrap_or(0)
                .max(depth)
                .min(s);
            if last < s {
                // the move-1 child of the deepest node breaks the bound
                stats.pruned += 1;
            }
            Frame {
                lo: depth,
                cur: last,
                next_m: 2,
                noop_used: true,
                leaf_tested: false,
                via,
            }
        } else {
            Frame {
                lo: depth,
                cur: depth,
                next_m: 1,
                noop_used: false,
                leaf_tested: false,
                via,
            }
        }
    };

    let mut stack = vec![open(state, &mut stats, 0, None)];
    loop {
        if let Some(limit) = budget {
            if state.ops().since(&start_ops).total() > limit {
                unwind(state, &mut stack);
                return Err(Error::SearchBudgetExhausted(limit));
            }
        }
        let Some(frame) = stack.last_mut() else {
            stats.ops = state.ops().since(&start_ops);
            return Err(Error::NoAcceptableBranch);
        };

        if frame.cur == s {
            if !frame.leaf_tested {
                frame.leaf_tested = true;
                stats.leaves += 1;
                if params.accepts(state.unsat_count(), u0) {
                    stats.output_unsat = state.unsat_count();
                    stats.accepted_moves = stack
                        .iter()
                        .filter_map(|f| f.via.as_ref().map(|(k, m, _)| (*k, *m)))
                        .collect();
                    stats.ops = state.ops().since(&start_ops);
                    return Ok(stats);
                }
            }
            step_back(state, &mut stack);
            continue;
        }

        let depth = frame.cur + 1;
        let mut child = None;
        while frame.next_m <= c {
            let m = frame.next_m;
            frame.next_m += 1;
            state.ops_mut().branch_steps += 1;
            if state.bucket(m).is_empty() {
                if frame.noop_used {
                    continue;
                }
                frame.noop_used = true;
                if !params.within_bound(state.unsat_count(), depth) {
                    stats.pruned += 1;
                    continue;
                }
                child = Some(None);
                break;
            }
            let flipped = state.easy_flip(m);
            stats.moves += 1;
            if !params.within_bound(state.unsat_count(), depth) {
                state.flip_set(&flipped);
                stats.pruned += 1;
                continue;
            }
            child = Some(Some((depth, m, flipped)));
            break;
        }
        match child {
            Some(via) => {
                let f = open(state, &mut stats, depth, via);
                stack.push(f);
            }
            None => step_back(state, &mut stack),
        }
    }
}

/// Moves the top frame one node up its chain, or pops it.
fn step_back(state: &mut DecodeState<'_>, stack: &mut Vec<Frame>) {
    let frame = stack.last_mut().expect("nonempty stack");
    if frame.cur > frame.lo {
        // the move-1 child of the node above is the node just finished
        frame.cur -= 1;
        frame.next_m = 2;
        frame.noop_used = true;
        frame.leaf_tested = false;
    } else {
        let frame = stack.pop().unwrap();
        if let Some((_, _, flipped)) = frame.via {
            state.flip_set(&flipped);
        }
    }
}

fn unwind(state: &mut DecodeState<'_>, stack: &mut Vec<Frame>) {
    while let Some(frame) = stack.pop() {
        if let Some((_, _, flipped)) = frame.via {
            state.flip_set(&flipped);
        }
    }
}

fn check_compatible(code: &TannerCode, params: &DecoderParams) -> Result<()> {
    let g = code.graph();
    let spec = &params.spec;
    if (spec.c, spec.d, spec.n, spec.d0) != (g.c(), g.d(), g.n_left(), code.inner().distance()) {
        return Err(Error::InvalidParameter(format!(
            "parameters are for (c, d, n, d0) = ({}, {}, {}, {}) but the code has ({}, {}, {}, {})",
            spec.c,
            spec.d,
            spec.n,
            spec.d0,
            g.c(),
            g.d(),
            g.n_left(),
            code.inner().distance()
        )));
    }
    Ok(())
}

/// MainDecode with default search options.
pub fn main_decode(code: &TannerCode, params: &DecoderParams, x: &BitVector) -> Result<BitVector> {
    main_decode_with_report(code, params, x, &SearchOptions::default()).0
}

/// MainDecode, also returning a report of the run.
pub fn main_decode_with_report(
    code: &TannerCode,
    params: &DecoderParams,
    x: &BitVector,
    options: &SearchOptions,
) -> (Result<BitVector>, DecodeReport) {
    let mut report = DecodeReport::new("deterministic", code.len());
    if let Err(e) = check_compatible(code, params) {
        report.finish(&e.to_string(), Outcome::from_error(&e));
        return (Err(e), report);
    }
    let mut state = match DecodeState::new(code, params.t, x.clone()) {
        Ok(s) => s,
        Err(e) => {
            report.finish(&e.to_string(), Outcome::from_error(&e));
            return (Err(e), report);
        }
    };
    report.input_unsat = state.unsat_count();
    let result = run_main(&mut state, params, options, &mut report);
    report.ops = *state.ops();
    match &result {
        Ok(_) => report.finish("", Outcome::Decoded),
        Err(e) => report.finish(&e.to_string(), Outcome::from_error(e)),
    }
    (result.map(|_| state.into_word()), report)
}

/// The body of MainDecode on an existing state; the decoded word is left in
/// the state.
pub(crate) fn run_main(
    state: &mut DecodeState<'_>,
    params: &DecoderParams,
    options: &SearchOptions,
    report: &mut DecodeReport,
) -> Result<()> {
    report.unsat_per_round.push(state.unsat_count());
    let mut round = 0u64;
    while round < params.ell && state.unsat_count() > 0 {
        let stats = hard_search(state, params, options)?;
        round += 1;
        report.unsat_per_round.push(state.unsat_count());
        report.hard_search_ops.push(stats.ops.total());
        report.rounds += 1;
    }
    if state.unsat_count() == 0 {
        return Ok(());
    }

    let code = state.code();
    let inner = code.inner();
    for u in 0..code.graph().n_right() {
        if !state.is_unsatisfied(u) {
            continue;
        }
        let word = code.local_word(state.word(), u);
        state.ops_mut().inner_decodes += 1;
        if let Some(e) = inner.leader(inner.syndrome(word)) {
            let nb = code.graph().right_neighbors(u);
            let flips: Vec<u32> = (0..nb.len()).filter(|&j| e >> j & 1 == 1).map(|j| nb[j]).collect();
            state.flip_set(&flips);
        }
    }
    report.final_repairs = true;
    if state.unsat_count() == 0 {
        Ok(())
    } else {
        Err(Error::DecodeFailure)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decode::params::derive_params;
    use crate::graph::BipartiteGraph;
    use crate::inner::InnerCode;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn k32_rep3() -> (TannerCode, DecoderParams) {
        let g = BipartiteGraph::from_left_adjacency(2, 3, 2, &[vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap();
        let t = TannerCode::new(g, InnerCode::repetition(3).unwrap()).unwrap();
        (t, derive_params(2, 3, 1.0 / 3.0, 1.0, 3, 3).unwrap())
    }

    #[test]
    fn deep_flip_examples() {
        let (t, p) = k32_rep3();
        let mut s = DecodeState::new(&t, p.t, bv("100")).unwrap();
        assert_eq!(deep_flip(&mut s, &p, &[2]), DeepFlipOutcome::Completed { unsat: vec![2, 0] });
        assert_eq!(s.word(), &bv("000"));
        s.restore_flip_record();
        assert_eq!(deep_flip(&mut s, &p, &[1]), DeepFlipOutcome::Pruned { step: 1, unsat: vec![2, 2] });
        s.restore_flip_record();
        assert_eq!(s.word(), &bv("100"));

        let mut s = DecodeState::new(&t, p.t, bv("111")).unwrap();
        assert!(matches!(deep_flip(&mut s, &p, &[1, 2, 1]), DeepFlipOutcome::Completed { .. }));
        assert_eq!(s.word(), &bv("111"));
    }

    #[test]
    fn hard_search_examples() {
        let (t, p) = k32_rep3();
        let mut s = DecodeState::new(&t, p.t, bv("100")).unwrap();
        let stats = hard_search(&mut s, &p, &SearchOptions::default()).unwrap();
        assert_eq!(s.word(), &bv("000"));
        assert_eq!(stats.accepted_moves, vec![(1, 2)]);
        assert_eq!(stats.pruned, 1);

        let mut s = DecodeState::new(&t, p.t, bv("111")).unwrap();
        let stats = hard_search(&mut s, &p, &SearchOptions::default()).unwrap();
        assert_eq!(s.word(), &bv("111"));
        assert!(stats.accepted_moves.is_empty());
    }

    #[test]
    fn main_decode_examples() {
        let (t, p) = k32_rep3();
        assert_eq!(main_decode(&t, &p, &bv("100")).unwrap(), bv("000"));
        assert_eq!(main_decode(&t, &p, &bv("111")).unwrap(), bv("111"));
        assert_eq!(main_decode(&t, &p, &bv("011")).unwrap(), bv("111"));
        let (_, report) = main_decode_with_report(&t, &p, &bv("100"), &SearchOptions::default());
        assert_eq!(report.rounds, 0);
        assert_eq!(report.outcome, Outcome::Decoded);
        assert!(report.final_repairs);
    }

    #[test]
    fn mismatched_parameters_are_rejected() {
        let (t, _) = k32_rep3();
        let p = derive_params(2, 3, 1.0 / 3.0, 1.0, 3, 6).unwrap();
        assert!(matches!(main_decode(&t, &p, &bv("100")), Err(Error::InvalidParameter(_))));
    }
}
