use serde::Serialize;

use super::AnalysisError;
use crate::catalog::{build_sft, direct_spec, AlgorithmSpec, Family};
use crate::quant::QuantConfig;
use crate::tensor::{LayerConfig, RationalMatrix};

/// Width of the channel accumulator, in bits.
pub const ACC_BITS: u64 = 32;

/// BOPs of one `bits`-wide multiplication.
pub fn mult_bops(bits: u64) -> u64 {
    bits * bits.saturating_sub(1)
}

/// BOPs of one `bits`-wide addition.
pub fn add_bops(bits: u64) -> u64 {
    bits
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostReport {
    pub algorithm: String,
    pub layer: LayerConfig,
    pub mults: u64,
    pub adds: u64,
    pub mult_bits: u64,
    pub add_bits: u64,
    pub bops: u64,
    /// Reduced multiplications over direct multiplications per tile, in percent.
    pub complexity_pct: f64,
}

impl CostReport {
    pub fn mult_bops(&self) -> u64 {
        self.mults * mult_bops(self.mult_bits)
    }

    pub fn add_bops(&self) -> u64 {
        self.adds * add_bops(self.add_bits)
    }
}

fn row_adds(m: &RationalMatrix) -> u64 {
    (0..m.rows()).map(|r| m.row_nnz(r).saturating_sub(1) as u64).sum()
}

/// Additions for one 1D application of `Bᵀ`.
fn input_adds_1d(spec: &AlgorithmSpec) -> Result<u64, AnalysisError> {
    if spec.family != Family::Sfc {
        return Ok(row_adds(&spec.bt));
    }
    let plan = build_sft(spec.n)?;
    let core = plan.points + plan.complex_groups();
    let corrections: u64 = (core..spec.bt.rows()).map(|r| spec.bt.row_nnz(r).saturating_sub(1) as u64).sum();
    Ok((plan.adds() + plan.complex_groups()) as u64 + corrections)
}

/// Multiplication and addition counts for one layer.
fn counts(layer: &LayerConfig, spec: &AlgorithmSpec) -> Result<(u64, u64), AnalysisError> {
    layer.validate()?;
    if layer.kernel != spec.r {
        return Err(AnalysisError::InvalidArgument(format!("{} on a {}x{} kernel", spec.name, layer.kernel, layer.kernel)));
    }
    if spec.m > 1 && layer.stride != 1 {
        return Err(AnalysisError::InvalidArgument(format!("{} needs stride 1, layer has {}", spec.name, layer.stride)));
    }
    let (oh, ow) = layer.output_hw()?;
    let tiles = (oh.div_ceil(spec.m) * ow.div_ceil(spec.m)) as u64;
    let (cin, cout) = (layer.in_channels as u64, layer.out_channels as u64);
    let (t, n, m, r) = (spec.t() as u64, spec.tile_in() as u64, spec.m as u64, spec.r as u64);
    let mults = spec.mults_reduced as u64 * tiles * cin * cout;
    let bt = input_adds_1d(spec)?;
    let g = row_adds(&spec.g);
    let at = row_adds(&spec.a.transpose());
    let input = (bt * n + bt * t) * tiles * cin;
    let filter = (g * r + g * t) * cin * cout;
    let output = (at * t + at * m) * tiles * cout;
    let accumulate = t * t * (cin - 1) * tiles * cout;
    Ok((mults, input + filter + output + accumulate))
}

/// BOPs of one layer: multiplications at the activation width, every addition at
/// the accumulator width, transforms included.
pub fn bops(layer: &LayerConfig, spec: &AlgorithmSpec, quant: &QuantConfig) -> Result<CostReport, AnalysisError> {
    quant.validate()?;
    let (mults, adds) = counts(layer, spec)?;
    let (mult_bits, add_bits) = (quant.act_bits as u64, ACC_BITS);
    Ok(CostReport {
        algorithm: spec.name.clone(),
        layer: *layer,
        mults,
        adds,
        mult_bits,
        add_bits,
        bops: mults * mult_bops(mult_bits) + adds * add_bops(add_bits),
        complexity_pct: spec.complexity_pct(),
    })
}

/// `bops(spec) / bops(direct)` for the same layer.
pub fn bops_ratio(layer: &LayerConfig, spec: &AlgorithmSpec, quant: &QuantConfig) -> Result<f64, AnalysisError> {
    let fast = bops(layer, spec, quant)?;
    let direct = bops(layer, &direct_spec(spec.r)?, quant)?;
    Ok(fast.bops as f64 / direct.bops as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_algorithm;

    fn layer(cin: usize) -> LayerConfig {
        LayerConfig { in_channels: cin, out_channels: 64, height: 56, width: 56, kernel: 3, stride: 1, padding: 1 }
    }

    #[test]
    fn unit_costs() {
        assert_eq!(mult_bops(8), 56);
        assert_eq!(add_bops(8), 8);
        assert_eq!(mult_bops(1), 0);
    }

    #[test]
    fn direct_counts() {
        let l = LayerConfig { in_channels: 2, out_channels: 3, height: 5, width: 5, kernel: 3, stride: 1, padding: 0 };
        let r = bops(&l, &direct_spec(3).unwrap(), &QuantConfig::default()).unwrap();
        assert_eq!(r.mults, 9 * 9 * 2 * 3);
        // each output sums 18 products
        assert_eq!(r.adds, 9 * 3 * 17);
        assert_eq!(r.bops, r.mults * 56 + r.adds * 32);
    }

    #[test]
    fn sfc6_input_transform_adds() {
        let s = catalog_algorithm("sfc6-6x6-3x3").unwrap();
        // 14 for the fast SFT, 2 group sums, 2 correction rows with one add each
        assert_eq!(input_adds_1d(&s).unwrap(), 18);
    }

    #[test]
    fn sfc_cheaper_than_direct() {
        let s = catalog_algorithm("sfc6-7x7-3x3").unwrap();
        let q = QuantConfig::default();
        let ratio = bops_ratio(&layer(64), &s, &q).unwrap();
        assert!(ratio < 1.0, "{ratio}");
    }

    #[test]
    fn mult_bops_linear_in_channels() {
        let s = catalog_algorithm("sfc6-6x6-3x3").unwrap();
        let q = QuantConfig::default();
        let a = bops(&layer(32), &s, &q).unwrap();
        let b = bops(&layer(64), &s, &q).unwrap();
        assert_eq!(b.mult_bops(), 2 * a.mult_bops());
    }

    #[test]
    fn stride_two_rejected_for_fast() {
        let mut l = layer(8);
        l.stride = 2;
        let s = catalog_algorithm("wino-2x2-3x3").unwrap();
        assert!(bops(&l, &s, &QuantConfig::default()).is_err());
        assert!(bops(&l, &direct_spec(3).unwrap(), &QuantConfig::default()).is_ok());
    }
}
