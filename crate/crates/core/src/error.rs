use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("code has dimension 0, so its minimum distance is undefined")]
    ZeroDimension,

    #[error("{what} too large for exhaustive enumeration ({size} > {limit})")]
    TooLarge {
        what: &'static str,
        size: u64,
        limit: u64,
    },

    #[error("graph generation failed: {0}")]
    Generation(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("infeasible decoder parameters: {0}")]
    Infeasible(String),

    /// Every branch of the HardSearch enumeration was pruned or rejected.
    #[error("no DeepFlip branch satisfied the acceptance test")]
    NoAcceptableBranch,

    #[error("branch search exceeded its work budget of {0} units")]
    SearchBudgetExhausted(u64),

    /// The decoder finished but its output does not satisfy every constraint.
    #[error("decoding failed: output is not a codeword")]
    DecodeFailure,

    /// The randomized decoder used up its iterations without reaching the
    /// hand-off threshold.
    #[error("randomized decoder gave up after {0} iterations")]
    Abort(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected, found })
        }
    }
}
