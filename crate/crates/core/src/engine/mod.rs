//! Direct, Winograd and SFC convolution over whole feature maps.

mod direct;
mod fast;
mod iterative;
mod tiling;

pub use crate::catalog::derive_correction_spec;
pub use direct::direct_conv2d;
pub use fast::{
    fast_conv2d, fast_conv2d_with, transform_filters, FastConvOptions, FastConvOutput, ProductPath,
    TransformedFilterBank,
};
pub use iterative::{iterative_conv2d, IterativeOutput};
pub use tiling::{EdgePolicy, TilingPlan};

use crate::catalog::CatalogError;
use crate::quant::QuantError;
use crate::tensor::TensorError;

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("shape: {0}")]
    Shape(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Quant(#[from] QuantError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}
