use thiserror::Error;

/// Errors raised by the operator-theoretic constructions in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HardyError {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("element does not belong to the expected algebra")]
    AlgebraMismatch,
    #[error("tensor levels differ: {left} vs {right}")]
    LevelMismatch { left: usize, right: usize },
    #[error("elements belong to different correspondences")]
    CorrespondenceMismatch,
    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: String, actual: String },
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("creation operators need a level >= 1 element; use the left action for level 0")]
    LevelZero,
    #[error("truncation {truncation} is too small for a level-{level} creation operator")]
    TruncationTooSmall { level: usize, truncation: usize },
    #[error("operator is not lower-block-triangular (residual {residual:.3e})")]
    NotAnalytic { residual: f64 },
    #[error("matrix does not intertwine the representations (residual {residual:.3e})")]
    NotIntertwining { residual: f64 },
    #[error("point lies outside the closed unit disc (norm {norm})")]
    OutsideClosedDisc { norm: f64 },
    #[error("operation requires a strict contraction (norm {norm})")]
    NotStrictContraction { norm: f64 },
    #[error("operation requires a faithful representation")]
    FaithfulnessRequired,
    #[error("level {level} dimensions differ: {word_space} (quotient word space) vs {fock} (Fock level)")]
    DimensionMismatch { level: usize, word_space: usize, fock: usize },
    #[error("element is not in the open unit ball (norm {norm})")]
    NotInOpenBall { norm: f64 },
    #[error("operator is not in the required commutant (residual {residual:.3e})")]
    NotInCommutant { residual: f64 },
    #[error("only single-block (factor) algebras are supported here")]
    MultiBlockUnsupported,
    #[error("left dimension d = {d} is below one")]
    DLessThanOne { d: f64 },
    #[error("left dimension d = {d} is not below one")]
    DNotLessThanOne { d: f64 },
    #[error("no finite-dimensional instance realizes this configuration")]
    NotInstantiable,
    #[error("window level {window} needs one level of headroom below truncation {truncation}")]
    HeadroomExceeded { window: usize, truncation: usize },
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, HardyError>;
