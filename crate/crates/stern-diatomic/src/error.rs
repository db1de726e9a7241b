use thiserror::Error;

/// Errors shared by the whole crate. Math operations are total wherever the
/// underlying function is; everything else rejects its inputs through here.
#[derive(Error, Debug)]
pub enum Error {
    #[error("empty range: lo {lo} exceeds hi {hi}")]
    EmptyRange { lo: String, hi: String },

    #[error("index {n} below minimum {min}")]
    IndexBelowMin { n: u64, min: u64 },

    #[error("negative input {x}: the envelope is defined on x >= 0")]
    NegativeInput { x: String },

    #[error("precision {prec} bits too low (minimum {min})")]
    PrecisionTooLow { prec: u32, min: u32 },

    #[error("invalid interval: lo {lo} must be strictly below hi {hi}")]
    InvalidInterval { lo: String, hi: String },

    #[error("range [{lo}, {hi}] infeasible: {reason}")]
    InfeasibleRange { lo: String, hi: String, reason: String },

    #[error("interval ({lo}, {hi}) contains a refined breakpoint at {at}")]
    BreakpointInside { lo: String, hi: String, at: String },

    #[error(
        "precision policy violation computing {what}: runs at {prec} and {prec2} bits \
         agree to only {agree} bits (need {need})"
    )]
    PrecisionPolicy {
        what: String,
        prec: u32,
        prec2: u32,
        agree: i64,
        need: i64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("b-file line {line}: {reason}")]
    BFile { line: usize, reason: String },

    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: String, reason: String },

    #[error("fetch failed: {0}")]
    Fetch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
