use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::Serialize;
use sfc_core::catalog::catalog_algorithm;
use sfc_core::engine::{direct_conv2d, fast_conv2d_with, FastConvOptions};
use sfc_core::quant::ablation::synthetic_layer;
use sfc_core::quant::synth::Synthetic;
use sfc_core::tensor::LayerConfig;

use crate::error::CliError;
use crate::manifest::{emit_json, resolve_seed, RunManifest};

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "sfc6-6x6-3x3")]
    alg: String,
    /// A layer object as inline JSON or a path to a JSON file.
    #[arg(long, default_value = r#"{"in_channels":64,"out_channels":64,"height":56,"width":56,"kernel":3,"padding":1}"#)]
    layer: String,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value_t = 5)]
    repeat: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Timing {
    median_ms: f64,
    min_ms: f64,
    max_ms: f64,
}

#[derive(Serialize)]
struct Report {
    algorithm: String,
    layer: LayerConfig,
    threads: usize,
    repeat: usize,
    max_rel_error: f64,
    threads_bitwise_equal: bool,
    fast: Timing,
    direct: Timing,
    speedup: f64,
}

fn timing(mut ms: Vec<f64>) -> Timing {
    ms.sort_by(f64::total_cmp);
    let n = ms.len();
    let median = if n % 2 == 1 { ms[n / 2] } else { 0.5 * (ms[n / 2 - 1] + ms[n / 2]) };
    Timing { median_ms: median, min_ms: ms[0], max_ms: ms[n - 1] }
}

fn parse_layer(s: &str) -> Result<LayerConfig, CliError> {
    let text = if s.trim_start().starts_with('{') {
        s.to_string()
    } else {
        std::fs::read_to_string(s).map_err(|e| CliError::io(s, e))?
    };
    let layer: LayerConfig = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("--layer: {e}")))?;
    layer.validate()?;
    Ok(layer)
}

pub fn run(args: &BenchArgs) -> Result<(), CliError> {
    if args.repeat == 0 {
        return Err(CliError::Usage("--repeat must be at least 1".into()));
    }
    if args.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let seed = resolve_seed(args.seed)?;
    let spec = catalog_algorithm(&args.alg)?;
    let layer = parse_layer(&args.layer)?;
    let (x, f) = synthetic_layer(&layer, Synthetic::Gaussian, seed);
    let opts = FastConvOptions { threads: args.threads, ..FastConvOptions::default() };

    let reference = direct_conv2d(&x, &f, &layer)?;
    let fast = fast_conv2d_with(&x, &f, &layer, &spec, &opts)?.output;
    let max_rel_error = fast.max_rel_error(&reference);
    if max_rel_error > 1e-8 {
        return Err(CliError::Failed(format!("{} disagrees with direct convolution: {max_rel_error:.2e}", spec.name)));
    }
    let single = fast_conv2d_with(&x, &f, &layer, &spec, &FastConvOptions::default())?.output;
    let threads_bitwise_equal = single.data().iter().zip(fast.data()).all(|(a, b)| a.to_bits() == b.to_bits());
    if !threads_bitwise_equal {
        return Err(CliError::Failed(format!("output differs between 1 and {} threads", args.threads)));
    }

    let mut fast_ms = Vec::with_capacity(args.repeat);
    let mut direct_ms = Vec::with_capacity(args.repeat);
    for _ in 0..args.repeat {
        let t = Instant::now();
        fast_conv2d_with(&x, &f, &layer, &spec, &opts)?;
        fast_ms.push(t.elapsed().as_secs_f64() * 1e3);
        let t = Instant::now();
        direct_conv2d(&x, &f, &layer)?;
        direct_ms.push(t.elapsed().as_secs_f64() * 1e3);
    }
    let (fast, direct) = (timing(fast_ms), timing(direct_ms));
    let speedup = direct.median_ms / fast.median_ms;
    let manifest = RunManifest::new("bench", None, seed, args.out.as_deref())?;
    let report = Report {
        algorithm: spec.name.clone(),
        layer,
        threads: args.threads,
        repeat: args.repeat,
        max_rel_error,
        threads_bitwise_equal,
        fast,
        direct,
        speedup,
    };
    emit_json(args.out.as_deref(), &manifest, &report)
}
