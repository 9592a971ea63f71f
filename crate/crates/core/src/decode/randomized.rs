//! The randomized decoder: vote, flip a random subset of the voted
//! variables, repeat until few constraints are unsatisfied, then hand off to
//! MainDecode.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::det::{run_main, SearchOptions};
use super::params::DecoderParams;
use super::report::{DecodeReport, IterationStats, Outcome};
use super::state::DecodeState;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::tanner::TannerCode;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RandDecodeConfig {
    /// Concentration margin; the default is `eps0 delta^2 / 4`.
    pub eps: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl RandDecodeConfig {
    /// Defaults derived from `params`.
    pub fn from_params(params: &DecoderParams, seed: u64) -> Result<Self> {
        let delta = params.spec.delta;
        Self::with_eps(params, params.eps0 * delta * delta / 4.0, seed)
    }

    /// Uses `eps` and the iteration bound it implies.
    pub fn with_eps(params: &DecoderParams, eps: f64, seed: u64) -> Result<Self> {
        Ok(RandDecodeConfig {
            eps,
            max_iters: max_iterations(params, eps)?,
            seed,
        })
    }
}

/// `ceil( ln(gamma/alpha) / ln(1 - 3 eps (delta(t+1) - 1) / (4t)) )`, at least 1.
pub fn max_iterations(params: &DecoderParams, eps: f64) -> Result<usize> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let t = params.t as f64;
    let delta = params.spec.delta;
    let rate = 3.0 * eps * (delta * (t + 1.0) - 1.0) / (4.0 * t);
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "per-iteration reduction {rate} is not in (0, 1)"
        )));
    }
    let iters = ((params.gamma / params.spec.alpha).ln() / (-rate).ln_1p() - 1e-9).ceil();
    Ok(iters.max(1.0) as usize)
}

/// Acceptance threshold for a variable with `m` votes out of `c`:
/// `floor(m / (2c) * 2^64)`.
fn threshold(m: usize, c: usize) -> u64 {
    (((m as u128) << 64) / (2 * c as u128)) as u64
}

/// The 64-bit draw for `vertex` in iteration `stream` under `seed`.
///
/// Each draw sits at its own position of a ChaCha8 stream, so the result
/// does not depend on the order in which vertices are visited.
pub fn draw(seed: u64, stream: u64, vertex: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(2 * vertex as u128);
    rng.next_u64()
}

/// Picks each variable of `buckets[m - 1]` (the variables with `m` votes)
/// independently with probability `m / (2c)`. The result is ascending.
pub fn sample_flip_set(buckets: &[&[u32]], c: usize, seed: u64, stream: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut picked = Vec::new();
    for (i, bucket) in buckets.iter().enumerate() {
        let cut = threshold(i + 1, c);
        for &v in bucket.iter() {
            rng.set_word_pos(2 * v as u128);
            if rng.next_u64() < cut {
                picked.push(v);
            }
        }
    }
    picked.sort_unstable();
    picked
}

/// Randomized decoding with default search options for the hand-off.
pub fn randomized_decode(
    code: &TannerCode,
    params: &DecoderParams,
    config: &RandDecodeConfig,
    x: &BitVector,
) -> Result<BitVector> {
    randomized_decode_with_report(code, params, config, x, None, &SearchOptions::default()).0
}

/// Randomized decoding with a report. When `truth` is given, per-iteration
/// corruption counts are recorded too.
pub fn randomized_decode_with_report(
    code: &TannerCode,
    params: &DecoderParams,
    config: &RandDecodeConfig,
    x: &BitVector,
    truth: Option<&BitVector>,
    options: &SearchOptions,
) -> (Result<BitVector>, DecodeReport) {
    let mut report = DecodeReport::new("randomized", code.len());
    let result = run(code, params, config, x, truth, options, &mut report);
    match result {
        Ok((word, ops)) => {
            report.ops = ops;
            report.finish("", Outcome::Decoded);
            (Ok(word), report)
        }
        Err((e, ops)) => {
            report.ops = ops;
            report.finish(&e.to_string(), Outcome::from_error(&e));
            (Err(e), report)
        }
    }
}

type RunResult = std::result::Result<(BitVector, super::state::OpCounters), (Error, super::state::OpCounters)>;

fn run(
    code: &TannerCode,
    params: &DecoderParams,
    config: &RandDecodeConfig,
    x: &BitVector,
    truth: Option<&BitVector>,
    options: &SearchOptions,
    report: &mut DecodeReport,
) -> RunResult {
    let zero = Default::default();
    if config.max_iters == 0 || config.eps.is_nan() || config.eps <= 0.0 {
        return Err((Error::InvalidParameter("max_iters and eps must be positive".into()), zero));
    }
    if let Some(y) = truth {
        if y.len() != code.len() {
            return Err((Error::LengthMismatch { expected: code.len(), found: y.len() }, zero));
        }
    }
    let mut state = DecodeState::new(code, params.t, x.clone()).map_err(|e| (e, zero))?;
    report.input_unsat = state.unsat_count();
    let c = code.graph().c();
    let threshold = params.handoff_threshold();
    let corrupt = |s: &DecodeState<'_>| truth.map(|y| s.word().hamming_distance(y).unwrap());

    for iter in 0..config.max_iters {
        let messages: usize = (1..=c).map(|m| m * state.bucket(m).len()).sum();
        let buckets: Vec<&[u32]> = (1..=c).map(|m| state.bucket(m)).collect();
        let draws: usize = buckets.iter().map(|b| b.len()).sum();
        let picked = sample_flip_set(&buckets, c, config.seed, iter as u64);
        state.ops_mut().branch_steps += draws as u64;
        let corrupt_before = corrupt(&state);
        let sampled_corrupt = truth.map(|y| picked.iter().filter(|&&v| state.word().get(v as usize) != y.get(v as usize)).count());
        state.flip_set(&picked);
        report.iterations.push(IterationStats {
            messages,
            sampled: picked.len(),
            unsat_after: state.unsat_count(),
            sampled_corrupt,
            corrupt_before,
            corrupt_after: corrupt(&state),
        });
        if state.unsat_count() as f64 <= threshold + 1e-9 {
            state.reset_flip_record();
            let outcome = run_main(&mut state, params, options, report);
            let ops = *state.ops();
            return match outcome {
                Ok(()) => Ok((state.into_word(), ops)),
                Err(e) => Err((e, ops)),
            };
        }
    }
    let ops = *state.ops();
    Err((Error::Abort(config.max_iters), ops))
}
