//! Condition numbers, rounding-error experiments and the bit-operations cost model.

mod cost;
mod error;
mod svd;
mod table1;

pub use cost::{add_bops, bops, bops_ratio, mult_bops, CostReport, ACC_BITS};
pub use error::{bound_trials, error_bound, mse_experiment, BoundTrial, ErrorReport, Precision};
pub use svd::{condition_number, kappa, singular_values};
pub use table1::{table1_report, to_csv, Table1Row, TABLE1_ROWS};

use crate::catalog::CatalogError;
use crate::engine::EngineError;
use crate::quant::QuantError;
use crate::tensor::TensorError;

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("matrix is rank deficient")]
    RankDeficient,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Quant(#[from] QuantError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}
