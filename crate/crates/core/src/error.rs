use alloc::string::String;

/// Errors produced by the analysis kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{function}: argument {value} is outside the domain ({expected})")]
    Domain {
        function: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("significance level must lie in (0, 1), got {0}")]
    AlphaOutOfRange(f64),
    #[error("input is empty")]
    EmptyInput,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("{what} must be at least {min}, got {got}")]
    TooSmall {
        what: &'static str,
        min: usize,
        got: usize,
    },
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("p-value {value} for `{name}` is outside [0, 1]")]
    InvalidPValue { name: String, value: f64 },
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("input sequence is not sorted in nondecreasing order")]
    Unsorted,
    #[error("every paired difference is zero")]
    AllDifferencesZero,
    #[error("no discordant pairs (b + c = 0)")]
    NoDiscordantPairs,
    #[error("zero variance in ranks")]
    ZeroVariance,
    #[error("invalid simulation spec: {0}")]
    InvalidSpec(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
}

pub type Result<T> = core::result::Result<T, Error>;
