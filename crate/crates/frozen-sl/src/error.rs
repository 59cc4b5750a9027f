//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("grid mismatch: expected {expected} samples, got {got}")]
    GridMismatch { expected: usize, got: usize },

    #[error("stacked vector has {got} blocks, expected {expected}")]
    BlockCount { expected: usize, got: usize },

    #[error("W function tagged ({w_alpha},{w_beta}) used with config ({alpha},{beta})")]
    BasisMismatch {
        w_alpha: u8,
        w_beta: u8,
        alpha: u8,
        beta: u8,
    },

    #[error("configuration is degenerate; use solve_main_degenerate")]
    RequiresNonDegenerate,

    #[error("configuration is non-degenerate; this operation applies to degenerate cases only")]
    RequiresDegenerate,

    #[error("degenerate continuation needs k > 1")]
    TrivialSubdivision,

    #[error(
        "inconsistent spectrum/W for degenerate case: residual {residual:.3e} exceeds {tol:.3e}"
    )]
    DegenerationResidual { residual: f64, tol: f64 },

    #[error(
        "spectrum not realizable in degenerate case: eigenvalue {index} off its forced value by {deviation:.3e} (tolerance {tol:.3e})"
    )]
    SpectrumNotRealizable {
        index: usize,
        deviation: f64,
        tol: f64,
    },

    #[error("restriction operator I + K is numerically singular")]
    SingularRestriction,

    #[error("root search failed for eigenvalue index {index}")]
    RootFindFailed { index: usize },

    #[error("non-finite eigenvalue at index {index}")]
    NonFiniteEigenvalue { index: usize },

    #[error("eigenvalue {index} coincides with an asymptotic tail zero; increase n_explicit")]
    TailCollision { index: usize },

    #[error("free block index {index} out of range for k = {k}")]
    FreeBlockOutOfRange { index: usize, k: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
