use thiserror::Error;

/// Errors produced by the analysis toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("width mismatch: {left} bits vs {right} bits")]
    WidthMismatch { left: usize, right: usize },

    #[error("the all-ones string of width {width} is not a residue modulo 2^n-1")]
    InvalidResidue { width: usize },

    #[error("{0} is not divisible by the denominator")]
    NotDivisible(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("pattern length {actual} does not match width {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("adjacent blocks {index} and {next} share digit {digit}")]
    NonMaximalPattern {
        index: usize,
        next: usize,
        digit: u8,
    },

    #[error("invalid block length {0}")]
    InvalidLength(usize),

    #[error("infeasible carries (in={carry_in}, out={carry_out}) for digit {digit}")]
    InfeasibleCarries {
        digit: u8,
        carry_in: u8,
        carry_out: u8,
    },

    #[error("block type {tag} is infeasible for length {length}")]
    InfeasibleType { tag: &'static str, length: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("no blocks of length >= 2 to classify")]
    NoEligibleBlocks,

    #[error("at least one trial is required")]
    ZeroTrials,

    #[error("degenerate ellipse: cross coefficient must lie in [0, 1)")]
    DegenerateEllipse,

    #[error("remainder may only contain type 1 and type 4 blocks, found {0}")]
    WrongTypes(&'static str),

    #[error("alpha consists of a single block")]
    DegenerateAlpha,

    #[error("width {width} exceeds the limit of {max} bits")]
    TooWide { width: usize, max: usize },

    #[error("cannot parse {field}: {message}")]
    Parse { field: String, message: String },
}

impl Error {
    pub(crate) fn parse(field: &str, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
