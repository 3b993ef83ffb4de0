use std::path::PathBuf;

use clap::Args;
use sfc_core::analysis::{bops, bops_ratio};
use sfc_core::catalog::{catalog_algorithm, AlgorithmSpec};
use sfc_core::quant::QuantConfig;
use sfc_core::tensor::LayerConfig;

use crate::error::CliError;
use crate::manifest::{emit_csv, RunManifest};

#[derive(Args)]
pub struct BopsArgs {
    /// JSON array of layer objects.
    #[arg(long)]
    layers: PathBuf,
    /// Comma-separated algorithm names; `direct` matches any kernel.
    #[arg(long, default_value = "direct,sfc6-6x6-3x3")]
    alg: String,
    /// Multiplication width.
    #[arg(long, default_value_t = 8)]
    bits: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub const HEADER: &str = "layer,algorithm,mults,adds,mult_bits,add_bits,bops,complexity_pct,bops_vs_direct";

pub fn read_layers(path: &std::path::Path) -> Result<Vec<LayerConfig>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(LayerConfig::list_from_json(&text)?)
}

fn spec_for(name: &str, layer: &LayerConfig) -> Result<AlgorithmSpec, CliError> {
    if name == "direct" {
        return Ok(catalog_algorithm(&format!("direct-{0}x{0}", layer.kernel))?);
    }
    Ok(catalog_algorithm(name)?)
}

pub fn run(args: &BopsArgs) -> Result<(), CliError> {
    let layers = read_layers(&args.layers)?;
    let quant = QuantConfig { act_bits: args.bits, filter_bits: args.bits, ..QuantConfig::default() };
    quant.validate()?;
    let names: Vec<&str> = args.alg.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    for n in &names {
        if *n != "direct" {
            catalog_algorithm(n)?;
        }
    }
    let mut csv = format!("{HEADER}\n");
    for (i, layer) in layers.iter().enumerate() {
        for name in &names {
            let spec = spec_for(name, layer)?;
            let row = bops(layer, &spec, &quant).and_then(|r| Ok((r, bops_ratio(layer, &spec, &quant)?)));
            match row {
                Ok((r, ratio)) => csv.push_str(&format!(
                    "{i},{},{},{},{},{},{},{:.2},{:.4}\n",
                    r.algorithm, r.mults, r.adds, r.mult_bits, r.add_bits, r.bops, r.complexity_pct, ratio
                )),
                Err(_) => csv.push_str(&format!("{i},{},unsupported,,,,,,\n", spec.name)),
            }
        }
    }
    let manifest = RunManifest::new("bops", Some(&args.layers), 0, args.out.as_deref())?;
    emit_csv(args.out.as_deref(), &csv, &manifest)
}
