//! Exact integer and rational linear algebra.
//!
//! Everything here is arbitrary precision; no floating point is used.

mod echelon;
mod int_matrix;
mod normal_form;
mod subspace;

use thiserror::Error;

pub use echelon::SmallEchelon;
pub use int_matrix::{rank, rank_of_rows, IntMatrix};
pub use normal_form::{
    hermite_normal_form, integer_kernel, saturate, smith_normal_form, Saturation, SmithForm,
};
pub use subspace::{canonical_span, contains, CanonicalSubspace, RatMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("expected {expected} entries, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("rows have different lengths")]
    RaggedRows,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },
}
