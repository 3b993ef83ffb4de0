use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Seed used when neither `--seed` nor `SFC_SEED` is given.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<PathBuf>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub catalog_hash: String,
}

impl RunManifest {
    pub fn new(command: &str, config_path: Option<&Path>, seed: u64, out: Option<&Path>) -> Result<Self, CliError> {
        let output_dir = match out.and_then(Path::parent) {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        Ok(RunManifest {
            command: command.to_string(),
            config_path: config_path.map(Path::to_path_buf),
            seed,
            output_dir,
            catalog_hash: sfc_core::catalog::catalog()?.hash(),
        })
    }
}

/// `--seed`, else `SFC_SEED`, else the default.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("SFC_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("SFC_SEED=`{v}` is not an integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Writes `text` to `out`, or stdout when absent.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            let newline = if text.ends_with('\n') { "" } else { "\n" };
            match write!(out, "{text}{newline}").and_then(|_| out.flush()) {
                // a closed reader (`| head`) is not an error
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::io("<stdout>", e)),
                _ => Ok(()),
            }
        }
    }
}

/// CSV output with the manifest in a `.manifest.json` file alongside it.
pub fn emit_csv(out: Option<&Path>, csv: &str, manifest: &RunManifest) -> Result<(), CliError> {
    emit(out, csv)?;
    if let Some(p) = out {
        let mut side = p.as_os_str().to_owned();
        side.push(".manifest.json");
        let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
        std::fs::write(&side, text).map_err(|e| CliError::io(&side, e))?;
    }
    Ok(())
}

/// JSON output with the manifest embedded under `manifest`.
pub fn emit_json<T: Serialize>(out: Option<&Path>, manifest: &RunManifest, body: &T) -> Result<(), CliError> {
    let mut value = serde_json::to_value(body).expect("report serializes");
    if let serde_json::Value::Object(map) = &mut value {
        map.insert("manifest".into(), serde_json::to_value(manifest).expect("manifest serializes"));
    }
    emit(out, &serde_json::to_string_pretty(&value).expect("json value serializes"))
}
