//! Granularity ablation on synthetic layers: output MSE of the quantized fast
//! pipeline against the fp64 direct oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::synth::{gaussian, Synthetic};
use super::{Grouping, QuantConfig};
use crate::catalog::AlgorithmSpec;
use crate::engine::{direct_conv2d, fast_conv2d, EngineError};
use crate::tensor::{DenseTensor, LayerConfig};

/// Activation and filter grouping pairs, coarsest first.
pub const GROUPINGS: &[(Grouping, Grouping)] = &[
    (Grouping::Tensor, Grouping::Channel),
    (Grouping::Frequency, Grouping::Channel),
    (Grouping::Frequency, Grouping::Frequency),
    (Grouping::Frequency, Grouping::ChannelFrequency),
];

#[derive(Clone, Debug, Serialize)]
pub struct AblationRow {
    pub layer: usize,
    pub algorithm: String,
    pub act_bits: u32,
    pub filter_bits: u32,
    pub act_grouping: Grouping,
    pub filter_grouping: Grouping,
    pub mse: f64,
    /// `mse` over the oracle's mean square.
    pub relative_mse: f64,
}

/// Batch-1 input and He-scaled Gaussian filters for `layer`, from `seed`.
pub fn synthetic_layer(layer: &LayerConfig, data: Synthetic, seed: u64) -> (DenseTensor, DenseTensor) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = data.generate([1, layer.in_channels, layer.height, layer.width], &mut rng);
    let mut f = gaussian([layer.out_channels, layer.in_channels, layer.kernel, layer.kernel], &mut rng);
    let std = (2.0 / (layer.in_channels * layer.kernel * layer.kernel) as f64).sqrt();
    f.data_mut().iter_mut().for_each(|v| *v *= std);
    (x, f)
}

/// Output MSE of the quantized fast pipeline and its oracle mean square.
pub fn layer_mse(
    x: &DenseTensor,
    f: &DenseTensor,
    layer: &LayerConfig,
    spec: &AlgorithmSpec,
    quant: &QuantConfig,
) -> Result<(f64, f64), EngineError> {
    let oracle = direct_conv2d(x, f, layer)?;
    let got = fast_conv2d(x, f, layer, spec, Some(quant))?;
    let power = oracle.data().iter().map(|v| v * v).sum::<f64>() / oracle.data().len() as f64;
    Ok((got.mse(&oracle), power))
}

/// One row per layer and configuration, each layer evaluated on identical data.
pub fn ablation(
    spec: &AlgorithmSpec,
    layers: &[(LayerConfig, DenseTensor, DenseTensor)],
    configs: &[QuantConfig],
) -> Result<Vec<AblationRow>, EngineError> {
    let mut rows = Vec::with_capacity(layers.len() * configs.len());
    for (i, (layer, x, f)) in layers.iter().enumerate() {
        for q in configs {
            let (mse, power) = layer_mse(x, f, layer, spec, q)?;
            rows.push(AblationRow {
                layer: i,
                algorithm: spec.name.clone(),
                act_bits: q.act_bits,
                filter_bits: q.filter_bits,
                act_grouping: q.act_grouping,
                filter_grouping: q.filter_grouping,
                mse,
                relative_mse: if power > 0.0 { mse / power } else { 0.0 },
            });
        }
    }
    Ok(rows)
}

/// Every grouping pair at each bit width (activations and filters share the width).
pub fn grid(bits: &[u32]) -> Vec<QuantConfig> {
    bits.iter()
        .flat_map(|&b| {
            GROUPINGS.iter().map(move |&(a, f)| QuantConfig {
                act_bits: b,
                filter_bits: b,
                act_grouping: a,
                filter_grouping: f,
                ..QuantConfig::default()
            })
        })
        .collect()
}
