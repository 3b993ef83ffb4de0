//! `sfc`: validation, error tables, quantization sweeps, cost reports and benchmarks.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod bench;
mod bops;
mod error;
mod manifest;
mod quantsim;
mod table1;
mod validate;

use error::CliError;

#[derive(Parser)]
#[command(name = "sfc", version, about = "Fast convolution with symbolic Fourier, Winograd and direct algorithms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check algorithms against exact integer convolution.
    Validate(validate::ValidateArgs),
    /// Error, condition number and complexity comparison as CSV.
    Table1(table1::Table1Args),
    /// Quantized-pipeline MSE per layer and grouping.
    Quantsim(quantsim::QuantsimArgs),
    /// Bit-operation cost per layer as CSV.
    Bops(bops::BopsArgs),
    /// Time fast against direct convolution.
    Bench(bench::BenchArgs),
    /// Inspect the algorithm catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Print every matrix with its denominator.
    Export(ExportArgs),
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn export(args: &ExportArgs) -> Result<(), CliError> {
    if args.format != "json" {
        return Err(CliError::Usage(format!("unsupported format `{}`", args.format)));
    }
    let cat = sfc_core::catalog::catalog()?;
    let text = serde_json::to_string_pretty(&cat.export_json()).expect("json value serializes");
    manifest::emit(args.out.as_deref(), &text)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate(a) => validate::run(&a),
        Command::Table1(a) => table1::run(&a),
        Command::Quantsim(a) => quantsim::run(&a),
        Command::Bops(a) => bops::run(&a),
        Command::Bench(a) => bench::run(&a),
        Command::Catalog { action: CatalogAction::Export(a) } => export(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
