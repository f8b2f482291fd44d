use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ground-set size {0} is outside the supported range 1..={max}", max = crate::setfam::MAX_GROUND)]
    GroundSize(usize),
    #[error("mask {bits:#b} does not fit a ground set of size {n}")]
    MaskOutOfRange { bits: u32, n: usize },
    #[error("element {elem} is outside the ground set [1..{n}]")]
    ElementOutOfRange { elem: usize, n: usize },
    #[error("ground sets differ: {left} vs {right}")]
    GroundMismatch { left: usize, right: usize },
    #[error("invalid generator system: {0}")]
    Generators(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("family is empty")]
    EmptyFamily,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid weight vector: {0}")]
    Weights(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("family is not union-closed")]
    NotUnionClosed,
    #[error("probe {index} is inadmissible: {reason}")]
    InadmissibleProbe { index: usize, reason: String },
}
