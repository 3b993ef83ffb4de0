use std::path::PathBuf;

use clap::Args;
use sfc_core::analysis::{table1_report, to_csv};

use crate::error::CliError;
use crate::manifest::{emit_csv, resolve_seed, RunManifest};

#[derive(Args)]
pub struct Table1Args {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV path (stdout if absent); the manifest goes to `<out>.manifest.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: &Table1Args) -> Result<(), CliError> {
    if args.trials < 100 {
        return Err(CliError::Usage("--trials must be at least 100".into()));
    }
    let seed = resolve_seed(args.seed)?;
    let rows = table1_report(args.trials, seed)?;
    let manifest = RunManifest::new("table1", None, seed, args.out.as_deref())?;
    emit_csv(args.out.as_deref(), &to_csv(&rows), &manifest)
}
