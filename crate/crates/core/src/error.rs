// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("empty Kraus list")]
    EmptyKraus,

    #[error("Kraus operator {index} is {rows}x{cols}, expected {dim}x{dim}")]
    RaggedKraus {
        index: usize,
        rows: usize,
        cols: usize,
        dim: usize,
    },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("trace is not one (got {0})")]
    InvalidTrace(f64),

    #[error("basis columns are not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("subspace is not invariant (max Q-block norm {residual:.3e})")]
    NotInvariant { residual: f64 },

    #[error("subspace is not globally asymptotically stable")]
    NotGas,

    #[error("subspaces are not mutually orthogonal (overlap {0:.3e})")]
    NotOrthogonal(f64),

    #[error("map is not trace preserving (residual {0:.3e})")]
    NotTracePreserving(f64),

    #[error("transition rates require a successful DID")]
    UnsuccessfulDid,

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
