use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("label set is empty")]
    EmptyLabels,
    #[error("labels not strictly increasing at index {index}: {prev} >= {next}")]
    LabelsNotIncreasing { index: usize, prev: i64, next: i64 },
    #[error("label {label} outside feature range [0, {max}]")]
    LabelOutOfRange { label: i64, max: i64 },
    #[error("feature field is empty")]
    EmptyField,
    #[error("length mismatch: {what} has {got} entries, expected {expected}")]
    LengthMismatch { what: &'static str, got: usize, expected: usize },
    #[error("feature {value} at pixel {pixel} outside [0, {max}]")]
    FeatureOutOfRange { pixel: usize, value: i64, max: i64 },
    #[error("negative {what} weight at index {index}")]
    NegativeWeight { what: &'static str, index: usize },
    #[error("self-loop arc at pixel {0}")]
    SelfLoop(usize),
    #[error("arc ({from}, {to}) references a pixel outside 0..{n}")]
    ArcOutOfRange { from: usize, to: usize, n: usize },
    #[error("value {value} at pixel {pixel} is not an admissible label")]
    NotALabel { pixel: usize, value: i64 },
    #[error("value {value} outside [0, {max}]")]
    ValueOutOfRange { value: i64, max: i64 },
    #[error("Boolean level sequence is not non-increasing at level {level}")]
    NonMonotone { level: usize },
    #[error("integer overflow while {0}")]
    Overflow(&'static str),
    #[error("state space of {states} exceeds the configured cap {cap}")]
    StateSpaceTooLarge { states: u128, cap: u128 },
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
