use serde::Serialize;

use super::{kappa, mse_experiment, AnalysisError, Precision};
use crate::catalog::catalog_algorithm;

/// Algorithms compared in the error/complexity table, grouped by kernel size.
pub const TABLE1_ROWS: &[&str] = &[
    "direct-3x3",
    "wino-2x2-3x3",
    "wino-3x3-3x3",
    "wino-4x4-3x3",
    "sfc4-4x4-3x3",
    "sfc6-6x6-3x3",
    "sfc6-7x7-3x3",
    "wino-2x2-5x5",
    "sfc6-6x6-5x5",
    "wino-2x2-7x7",
    "sfc6-4x4-7x7",
];

#[derive(Clone, Debug, Serialize)]
pub struct Table1Row {
    pub algorithm: String,
    pub kernel: usize,
    /// Normalized fp16 MSE.
    pub mse: f64,
    pub kappa: f64,
    pub complexity_pct: f64,
}

pub fn table1_report(trials: usize, seed: u64) -> Result<Vec<Table1Row>, AnalysisError> {
    TABLE1_ROWS
        .iter()
        .map(|name| {
            let spec = catalog_algorithm(name)?;
            let e = mse_experiment(&spec, Precision::Fp16Sim, trials, seed)?;
            Ok(Table1Row {
                algorithm: spec.name.clone(),
                kernel: spec.r,
                mse: e.mse_normalized,
                kappa: kappa(&spec)?,
                complexity_pct: spec.complexity_pct(),
            })
        })
        .collect()
}

pub fn to_csv(rows: &[Table1Row]) -> String {
    let mut s = String::from("algorithm,mse,kappa,complexity_pct\n");
    for r in rows {
        s.push_str(&format!("{},{:.3},{:.3},{:.2}\n", r.algorithm, r.mse, r.kappa, r.complexity_pct));
    }
    s
}
