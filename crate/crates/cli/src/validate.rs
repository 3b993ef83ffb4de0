use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use sfc_core::catalog::{catalog, catalog_algorithm, validate_algorithm, AlgorithmSpec, ValidationReport};

use crate::error::CliError;
use crate::manifest::{emit_json, resolve_seed, RunManifest};

#[derive(Args)]
pub struct ValidateArgs {
    /// Algorithm name, or `all` for the whole catalog.
    #[arg(long, default_value = "all")]
    alg: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Falls back to `SFC_SEED`.
    #[arg(long)]
    seed: Option<u64>,
    /// Flip the sign of one output-transform entry before checking.
    #[arg(long)]
    inject_typo: bool,
    /// JSON report path (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report {
    passed: bool,
    results: Vec<ValidationReport>,
}

pub fn run(args: &ValidateArgs) -> Result<(), CliError> {
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let seed = resolve_seed(args.seed)?;
    let mut specs: Vec<AlgorithmSpec> = if args.alg == "all" {
        catalog()?.specs().into_iter().cloned().collect()
    } else {
        vec![catalog_algorithm(&args.alg)?]
    };
    if args.inject_typo {
        specs = specs.iter().map(AlgorithmSpec::with_injected_typo).collect();
    }
    let results = specs
        .iter()
        .map(|s| validate_algorithm(s, args.trials, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let failed: Vec<&ValidationReport> = results.iter().filter(|r| !r.passed()).collect();
    for r in &failed {
        eprintln!("{}: {} of {} tiles mismatched", r.algorithm, r.mismatches, r.trials);
        if let Some(c) = &r.first_counterexample {
            eprintln!("  trial {}", c.trial);
            eprintln!("  input    {:?}", c.input);
            eprintln!("  filter   {:?}", c.filter);
            eprintln!("  expected {:?}", c.expected);
            eprintln!("  got      {:?}", c.got);
        }
    }
    let manifest = RunManifest::new("validate", None, seed, args.out.as_deref())?;
    let n = failed.len();
    emit_json(args.out.as_deref(), &manifest, &Report { passed: n == 0, results })?;
    if n > 0 {
        return Err(CliError::Failed(format!("{n} algorithm(s) failed validation")));
    }
    Ok(())
}
