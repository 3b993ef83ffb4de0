//! Exact matrices, dense tensors, layer shapes and symbolic polynomials.

mod dense;
mod poly;
mod rational;
pub mod sfct;

pub use dense::{apply_matrix, DenseTensor, LayerConfig, NumMatrix};
pub use poly::{poly_reduce_dft4, poly_reduce_dft6, PolyElement, RingRule};
pub use rational::{rational_matmul, solve_exact, Rational, RationalMatrix};

#[derive(Debug, thiserror::Error)]
pub enum TensorError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("integer overflow in {0}")]
    Overflow(String),
    #[error("singular: {0}")]
    Singular(String),
    #[error("non-finite value in tensor")]
    NonFinite,
    #[error("format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
