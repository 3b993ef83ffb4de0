use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;
use sfc_core::catalog::catalog_algorithm;
use sfc_core::quant::ablation::{ablation, synthetic_layer, AblationRow, GROUPINGS};
use sfc_core::quant::synth::Synthetic;
use sfc_core::quant::{Calibration, Grouping, QuantConfig};
use sfc_core::tensor::sfct::read_sfct;
use sfc_core::tensor::{DenseTensor, LayerConfig};

use crate::bops::read_layers;
use crate::error::CliError;
use crate::manifest::{emit_json, resolve_seed, RunManifest};

#[derive(Clone, Copy, ValueEnum)]
enum CalibrationArg {
    Minmax,
    Mse,
}

#[derive(Args)]
pub struct QuantsimArgs {
    #[arg(long, default_value = "sfc6-6x6-3x3")]
    alg: String,
    /// Sweeps 8, 6 and 4 bits when neither width is given.
    #[arg(long)]
    act_bits: Option<u32>,
    #[arg(long)]
    filter_bits: Option<u32>,
    /// tensor | frequency. Sweeps every grouping pair when neither grouping is given.
    #[arg(long)]
    act_group: Option<Grouping>,
    /// channel | frequency | channel+frequency.
    #[arg(long)]
    filter_group: Option<Grouping>,
    #[arg(long)]
    layers: PathBuf,
    /// A directory of `layer{i}_x.sfct` inputs (and optional `layer{i}_f.sfct`
    /// filters), or `synthetic:gaussian` / `synthetic:onef`.
    #[arg(long, default_value = "synthetic:onef")]
    data: String,
    #[arg(long, value_enum, default_value = "minmax")]
    calibration: CalibrationArg,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report {
    data: String,
    rows: Vec<AblationRow>,
}

fn load(path: &Path) -> Result<DenseTensor, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(read_sfct(std::io::BufReader::new(file))?)
}

fn layer_data(
    data: &str,
    layers: &[LayerConfig],
    seed: u64,
) -> Result<Vec<(LayerConfig, DenseTensor, DenseTensor)>, CliError> {
    if let Some(kind) = data.strip_prefix("synthetic:") {
        let kind: Synthetic = kind.parse().map_err(|_| CliError::Usage(format!("unknown generator `{kind}`")))?;
        return Ok(layers
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let (x, f) = synthetic_layer(l, kind, seed.wrapping_add(i as u64));
                (*l, x, f)
            })
            .collect());
    }
    let dir = Path::new(data);
    if !dir.is_dir() {
        return Err(CliError::Usage(format!("--data `{data}` is neither a directory nor synthetic:SPEC")));
    }
    layers
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let x = load(&dir.join(format!("layer{i}_x.sfct")))?;
            let fpath = dir.join(format!("layer{i}_f.sfct"));
            let f = if fpath.exists() {
                load(&fpath)?
            } else {
                synthetic_layer(l, Synthetic::Gaussian, seed.wrapping_add(i as u64)).1
            };
            Ok((*l, x, f))
        })
        .collect()
}

fn configs(args: &QuantsimArgs) -> Vec<QuantConfig> {
    let calibration = match args.calibration {
        CalibrationArg::Minmax => Calibration::MinMax,
        CalibrationArg::Mse => Calibration::MseGrid,
    };
    let bits: Vec<(u32, u32)> = match (args.act_bits, args.filter_bits) {
        (None, None) => vec![(8, 8), (6, 6), (4, 4)],
        (a, f) => {
            let a = a.or(f).expect("one width given");
            vec![(a, f.unwrap_or(a))]
        }
    };
    let groups: Vec<(Grouping, Grouping)> = match (args.act_group, args.filter_group) {
        (None, None) => GROUPINGS.to_vec(),
        (a, f) => {
            let d = QuantConfig::default();
            vec![(a.unwrap_or(d.act_grouping), f.unwrap_or(d.filter_grouping))]
        }
    };
    bits.iter()
        .flat_map(|&(ab, fb)| {
            groups.iter().map(move |&(ag, fg)| QuantConfig {
                act_bits: ab,
                filter_bits: fb,
                act_grouping: ag,
                filter_grouping: fg,
                calibration,
            })
        })
        .collect()
}

pub fn run(args: &QuantsimArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed)?;
    let spec = catalog_algorithm(&args.alg)?;
    let configs = configs(args);
    for c in &configs {
        c.validate()?;
    }
    let layers = read_layers(&args.layers)?;
    if let Some(l) = layers.iter().find(|l| l.kernel != spec.r || l.stride != 1) {
        return Err(CliError::Usage(format!(
            "{} needs stride-1 {}x{} layers, got kernel {} stride {}",
            spec.name, spec.r, spec.r, l.kernel, l.stride
        )));
    }
    let data = layer_data(&args.data, &layers, seed)?;
    let rows = ablation(&spec, &data, &configs)?;
    let manifest = RunManifest::new("quantsim", Some(&args.layers), seed, args.out.as_deref())?;
    emit_json(args.out.as_deref(), &manifest, &Report { data: args.data.clone(), rows })
}
