//! Per-run decoder reports, serialized as JSON lines.

use serde::Serialize;

use super::state::OpCounters;
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Decoded,
    DecodeFailure,
    NoAcceptableBranch,
    SearchBudgetExhausted,
    Abort,
    InvalidInput,
}

impl Outcome {
    pub fn from_error(e: &Error) -> Self {
        match e {
            Error::DecodeFailure => Outcome::DecodeFailure,
            Error::NoAcceptableBranch => Outcome::NoAcceptableBranch,
            Error::SearchBudgetExhausted(_) => Outcome::SearchBudgetExhausted,
            Error::Abort(_) => Outcome::Abort,
            _ => Outcome::InvalidInput,
        }
    }
}

/// One randomized-decoder iteration.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IterationStats {
    /// Flip messages sent, `sum_m m |S_m|`.
    pub messages: usize,
    /// Size of the sampled flip set `P`.
    pub sampled: usize,
    /// `|U|` after flipping `P`.
    pub unsat_after: usize,
    /// With a known codeword: corrupt variables in `P`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled_corrupt: Option<usize>,
    /// With a known codeword: `|F|` before and after the iteration.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrupt_before: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrupt_after: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecodeReport {
    pub decoder: &'static str,
    pub n: usize,
    /// Distance from the input to the intended codeword, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_weight: Option<usize>,
    pub input_unsat: usize,
    /// HardSearch rounds run by MainDecode.
    pub rounds: u64,
    /// `|U|` before the first round and after each round.
    pub unsat_per_round: Vec<usize>,
    /// Work units spent in each HardSearch call.
    pub hard_search_ops: Vec<u64>,
    /// Whether the final per-constraint repair loop ran.
    pub final_repairs: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub iterations: Vec<IterationStats>,
    pub ops: OpCounters,
    pub ops_total: u64,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub message: String,
}

impl DecodeReport {
    pub fn new(decoder: &'static str, n: usize) -> Self {
        DecodeReport {
            decoder,
            n,
            input_weight: None,
            input_unsat: 0,
            rounds: 0,
            unsat_per_round: Vec::new(),
            hard_search_ops: Vec::new(),
            final_repairs: false,
            iterations: Vec::new(),
            ops: OpCounters::default(),
            ops_total: 0,
            outcome: Outcome::InvalidInput,
            message: String::new(),
        }
    }

    pub(crate) fn finish(&mut self, message: &str, outcome: Outcome) {
        self.outcome = outcome;
        self.message = message.to_string();
        self.ops_total = self.ops.total();
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}
