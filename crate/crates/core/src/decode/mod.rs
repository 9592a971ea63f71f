//! Decoders for Tanner codes.
//!
//! [`main_decode`] is the deterministic decoder built from EasyFlip,
//! DeepFlip and HardSearch. [`randomized_decode`] samples flips from the
//! vote counts and hands off to it once few constraints remain unsatisfied.

pub mod det;
pub mod params;
pub mod randomized;
pub mod report;
pub mod state;
pub mod trace;

pub use det::{
    deep_flip, hard_search, main_decode, main_decode_with_report, DeepFlipOutcome, HardSearchStats,
    SearchOptions, DEFAULT_BUDGET_FACTOR,
};
pub use params::{derive_params, derive_params_with, DecoderParams, ExpanderSpec, ParamOverrides};
pub use randomized::{max_iterations, randomized_decode, randomized_decode_with_report, RandDecodeConfig};
pub use report::{DecodeReport, IterationStats, Outcome};
pub use state::{DecodeState, OpCounters};
pub use trace::{compute_truth_trace, TruthTrace};
