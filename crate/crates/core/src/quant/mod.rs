//! Symmetric integer quantization of transform-domain tiles with grouped scales.

pub mod ablation;
mod energy;
pub mod synth;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use energy::frequency_energy;

/// Scales never drop below this, so all-zero groups still quantize.
pub const SCALE_FLOOR: f64 = 1e-8;
/// Candidates in the MSE grid search.
pub const GRID_POINTS: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum QuantError {
    #[error("bit width {0} outside 4..=8")]
    InvalidBits(u32),
    #[error("scale {0} is not positive")]
    NonPositiveScale(f64),
    #[error("no calibration samples")]
    EmptySamples,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("accumulator overflow: {0}")]
    Overflow(String),
    #[error("grouping `{0}` is not allowed here")]
    InvalidGrouping(String),
}

/// Which elements share a scale factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grouping {
    Tensor,
    Channel,
    /// One scale per transform coordinate (`T × T`).
    Frequency,
    ChannelFrequency,
}

impl fmt::Display for Grouping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Grouping::Tensor => "tensor",
            Grouping::Channel => "channel",
            Grouping::Frequency => "frequency",
            Grouping::ChannelFrequency => "channel+frequency",
        })
    }
}

impl FromStr for Grouping {
    type Err = QuantError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tensor" => Ok(Grouping::Tensor),
            "channel" => Ok(Grouping::Channel),
            "frequency" | "freq" => Ok(Grouping::Frequency),
            "channel+frequency" | "channel-frequency" | "freq+channel" | "frequency+channel" => {
                Ok(Grouping::ChannelFrequency)
            }
            _ => Err(QuantError::InvalidGrouping(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Calibration {
    MinMax,
    /// Min-max followed by a search over `[0.3, 1.0] × min-max`.
    MseGrid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantConfig {
    pub act_bits: u32,
    pub filter_bits: u32,
    pub act_grouping: Grouping,
    pub filter_grouping: Grouping,
    pub calibration: Calibration,
}

impl Default for QuantConfig {
    fn default() -> Self {
        QuantConfig {
            act_bits: 8,
            filter_bits: 8,
            act_grouping: Grouping::Frequency,
            filter_grouping: Grouping::ChannelFrequency,
            calibration: Calibration::MinMax,
        }
    }
}

impl QuantConfig {
    pub fn validate(&self) -> Result<(), QuantError> {
        check_bits(self.act_bits)?;
        check_bits(self.filter_bits)?;
        // activation scales must not vary over input channels, which are summed
        // before dequantization
        if !matches!(self.act_grouping, Grouping::Tensor | Grouping::Frequency) {
            return Err(QuantError::InvalidGrouping(format!("activations: {}", self.act_grouping)));
        }
        Ok(())
    }
}

fn check_bits(bits: u32) -> Result<(), QuantError> {
    if (4..=8).contains(&bits) {
        Ok(())
    } else {
        Err(QuantError::InvalidBits(bits))
    }
}

pub fn qmax(bits: u32) -> i32 {
    (1 << (bits - 1)) - 1
}

pub fn qmin(bits: u32) -> i32 {
    -(1 << (bits - 1))
}

/// `clamp(round_half_even(v / s))`.
pub fn quantize_value(v: f64, scale: f64, bits: u32) -> i32 {
    let q = (v / scale).round_ties_even();
    q.clamp(qmin(bits) as f64, qmax(bits) as f64) as i32
}

/// `channels × tiles` tiles of `t × t` values, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileLayout {
    pub channels: usize,
    pub tiles: usize,
    pub t: usize,
}

impl TileLayout {
    pub fn len(&self) -> usize {
        self.channels * self.tiles * self.t * self.t
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn scale_shape(&self, g: Grouping) -> Vec<usize> {
        match g {
            Grouping::Tensor => vec![1],
            Grouping::Channel => vec![self.channels],
            Grouping::Frequency => vec![self.t, self.t],
            Grouping::ChannelFrequency => vec![self.channels, self.t, self.t],
        }
    }

    pub fn group_count(&self, g: Grouping) -> usize {
        self.scale_shape(g).iter().product()
    }

    /// Group of the element at flat index `idx`.
    pub fn group_of(&self, g: Grouping, idx: usize) -> usize {
        let tt = self.t * self.t;
        let coord = idx % tt;
        let channel = idx / (self.tiles * tt);
        match g {
            Grouping::Tensor => 0,
            Grouping::Channel => channel,
            Grouping::Frequency => coord,
            Grouping::ChannelFrequency => channel * tt + coord,
        }
    }
}

/// Scale factors with zero points fixed at 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleSet {
    pub grouping: Grouping,
    pub shape: Vec<usize>,
    pub scales: Vec<f64>,
}

impl ScaleSet {
    pub fn new(grouping: Grouping, layout: &TileLayout, scales: Vec<f64>) -> Result<Self, QuantError> {
        let shape = layout.scale_shape(grouping);
        if scales.len() != shape.iter().product::<usize>() {
            return Err(QuantError::ShapeMismatch(format!(
                "{} scales for {grouping} grouping of shape {shape:?}",
                scales.len()
            )));
        }
        if let Some(&s) = scales.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
            return Err(QuantError::NonPositiveScale(s));
        }
        Ok(ScaleSet { grouping, shape, scales })
    }

    fn check(&self, layout: &TileLayout) -> Result<(), QuantError> {
        if self.shape != layout.scale_shape(self.grouping) {
            return Err(QuantError::ShapeMismatch(format!(
                "scale shape {:?} does not fit layout {layout:?}",
                self.shape
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("scale sets serialize")
    }
}

/// Integer tiles with their scales.
#[derive(Clone, Debug, PartialEq)]
pub struct QTiles {
    pub q: Vec<i32>,
    pub layout: TileLayout,
    pub bits: u32,
    pub scales: ScaleSet,
}

impl QTiles {
    pub fn dequantize(&self) -> Vec<f64> {
        self.q
            .iter()
            .enumerate()
            .map(|(i, &q)| q as f64 * self.scales.scales[self.layout.group_of(self.scales.grouping, i)])
            .collect()
    }
}

fn group_values<'a>(samples: &'a [&'a [f64]], layout: &TileLayout, g: Grouping) -> Vec<Vec<f64>> {
    let mut groups = vec![Vec::new(); layout.group_count(g)];
    for s in samples {
        for (i, &v) in s.iter().enumerate() {
            groups[layout.group_of(g, i)].push(v);
        }
    }
    groups
}

fn roundtrip_sse(values: &[f64], scale: f64, bits: u32) -> f64 {
    values
        .iter()
        .map(|&v| {
            let e = quantize_value(v, scale, bits) as f64 * scale - v;
            e * e
        })
        .sum()
}

/// Per-group scales from one or more sample tile sets sharing `layout`.
pub fn calibrate(
    samples: &[&[f64]],
    layout: &TileLayout,
    bits: u32,
    grouping: Grouping,
    method: Calibration,
) -> Result<ScaleSet, QuantError> {
    check_bits(bits)?;
    if samples.is_empty() {
        return Err(QuantError::EmptySamples);
    }
    if let Some(s) = samples.iter().find(|s| s.len() != layout.len()) {
        return Err(QuantError::ShapeMismatch(format!("sample of {} values, layout holds {}", s.len(), layout.len())));
    }
    let scales = group_values(samples, layout, grouping)
        .iter()
        .map(|vals| {
            let max = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let minmax = (max / qmax(bits) as f64).max(SCALE_FLOOR);
            match method {
                Calibration::MinMax => minmax,
                Calibration::MseGrid => {
                    let mut best = (roundtrip_sse(vals, minmax, bits), minmax);
                    for i in 0..GRID_POINTS - 1 {
                        let c = (minmax * (0.3 + 0.7 * i as f64 / (GRID_POINTS - 1) as f64)).max(SCALE_FLOOR);
                        let e = roundtrip_sse(vals, c, bits);
                        if e < best.0 {
                            best = (e, c);
                        }
                    }
                    best.1
                }
            }
        })
        .collect();
    ScaleSet::new(grouping, layout, scales)
}

/// Quantizes `values`, calibrating min-max scales from them if `scales` is `None`.
pub fn quantize(
    values: &[f64],
    layout: &TileLayout,
    bits: u32,
    grouping: Grouping,
    scales: Option<&ScaleSet>,
) -> Result<QTiles, QuantError> {
    check_bits(bits)?;
    if values.len() != layout.len() {
        return Err(QuantError::ShapeMismatch(format!("{} values, layout holds {}", values.len(), layout.len())));
    }
    let scales = match scales {
        Some(s) => {
            if s.grouping != grouping {
                return Err(QuantError::InvalidGrouping(format!("scales are {}, asked for {grouping}", s.grouping)));
            }
            s.check(layout)?;
            s.clone()
        }
        None => calibrate(&[values], layout, bits, grouping, Calibration::MinMax)?,
    };
    let q = values
        .iter()
        .enumerate()
        .map(|(i, &v)| quantize_value(v, scales.scales[layout.group_of(grouping, i)], bits))
        .collect();
    Ok(QTiles { q, layout: *layout, bits, scales })
}

/// Channel-accumulated integer products and the per-element combined scale.
#[derive(Clone, Debug, PartialEq)]
pub struct Accumulated {
    /// `[out_channels, tiles, t, t]`.
    pub values: Vec<i32>,
    /// `[out_channels, t, t]`, `s_act · s_filter`.
    pub combined: Vec<f64>,
    pub out_channels: usize,
    pub tiles: usize,
    pub t: usize,
}

impl Accumulated {
    pub fn dequantize(&self) -> Vec<f64> {
        let tt = self.t * self.t;
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| v as f64 * self.combined[(i / (self.tiles * tt)) * tt + i % tt])
            .collect()
    }
}

/// `Σ_ic act[ic, tile] ⊙ filt[oc, ic]` in checked 32-bit integers.
///
/// `act` is laid out `[in_channels, tiles]`, `filt` as `[out_channels, in_channels]`.
pub fn quantized_elementwise_multiply(act: &QTiles, filt: &QTiles) -> Result<Accumulated, QuantError> {
    let (la, lf) = (act.layout, filt.layout);
    if la.t != lf.t || lf.tiles != la.channels {
        return Err(QuantError::ShapeMismatch(format!("activations {la:?} vs filters {lf:?}")));
    }
    if !matches!(act.scales.grouping, Grouping::Tensor | Grouping::Frequency) {
        return Err(QuantError::InvalidGrouping(format!("activations: {}", act.scales.grouping)));
    }
    let (cin, tiles, tt, cout) = (la.channels, la.tiles, la.t * la.t, lf.channels);
    let mut values = vec![0i32; cout * tiles * tt];
    for oc in 0..cout {
        for p in 0..tiles {
            let out = &mut values[(oc * tiles + p) * tt..(oc * tiles + p + 1) * tt];
            for ic in 0..cin {
                let a = &act.q[(ic * tiles + p) * tt..(ic * tiles + p + 1) * tt];
                let f = &filt.q[(oc * cin + ic) * tt..(oc * cin + ic + 1) * tt];
                for c in 0..tt {
                    let prod = a[c].checked_mul(f[c]);
                    out[c] = prod.and_then(|v| out[c].checked_add(v)).ok_or_else(|| {
                        QuantError::Overflow(format!("out channel {oc}, tile {p}, coordinate {c}"))
                    })?;
                }
            }
        }
    }
    let mut combined = vec![0.0; cout * tt];
    for oc in 0..cout {
        for c in 0..tt {
            let sa = act.scales.scales[la.group_of(act.scales.grouping, c)];
            let sf = filt.scales.scales[lf.group_of(filt.scales.grouping, oc * cin * tt + c)];
            combined[oc * tt + c] = sa * sf;
        }
    }
    Ok(Accumulated { values, combined, out_channels: cout, tiles, t: la.t })
}
