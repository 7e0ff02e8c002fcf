use thiserror::Error;

use crate::equivalence::EquivalenceReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} outside supported range 2..=16")]
    InvalidDimension(usize),

    #[error("digit {digit} out of range for dimension {dim}")]
    DigitOutOfRange { digit: usize, dim: usize },

    #[error("wire {wire} out of range for a {wires}-wire register")]
    WireOutOfRange { wire: usize, wires: usize },

    #[error("gate {kind} expects {expected} wire(s), got {got}")]
    Arity {
        kind: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("gate wires must be distinct, got {0:?}")]
    RepeatedWire(Vec<usize>),

    #[error("basis state has {got} digits, register has {expected} wires")]
    LengthMismatch { expected: usize, got: usize },

    #[error("shape mismatch: d={d1}, wires={n1} vs d={d2}, wires={n2}")]
    ShapeMismatch { d1: usize, n1: usize, d2: usize, n2: usize },

    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),

    #[error("{size}x{size} unitary exceeds the {cap}-amplitude cap")]
    TooLarge { size: usize, cap: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid gate #{index}: {reason}")]
    InvalidGate { index: usize, reason: String },

    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),

    #[error("rewrite {rule} not applicable at position {pos}: {reason}")]
    RuleNotApplicable {
        rule: &'static str,
        pos: usize,
        reason: String,
    },

    #[error("gate at position {pos} is not droppable under the given constraint (deviation {})", report.max_deviation)]
    NotDroppable { pos: usize, report: Box<EquivalenceReport> },

    #[error("verification failed at step {step}: deviation {}", report.max_deviation)]
    VerificationFailed {
        step: String,
        report: Box<EquivalenceReport>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
