//! Result files. Everything is written to a temporary sibling first and
//! renamed into place, so a failed run never leaves partial output.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::args::Format;
use crate::error::CliError;

/// What a subcommand produced: a CSV body and a JSON result document.
pub struct Outputs {
    pub csv: Vec<u8>,
    pub json: serde_json::Value,
}

impl Outputs {
    pub fn new<R: Serialize, J: Serialize>(rows: &[R], json: &J) -> Result<Self, CliError> {
        Ok(Outputs { csv: csv_body(rows)?, json: serde_json::to_value(json)? })
    }
}

pub fn csv_body<R: Serialize>(rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes).map_err(|e| CliError::Runtime(format!("writing {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::Runtime(format!("renaming to {}: {e}", path.display())))
}

/// Write the result files selected by `format` and return their paths.
pub fn write_results(dir: &Path, stem: &str, format: Format, out: &Outputs) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("creating {}: {e}", dir.display())))?;
    let mut paths = Vec::new();
    if matches!(format, Format::Csv | Format::Both) {
        let p = dir.join(format!("{stem}.csv"));
        write_atomic(&p, &out.csv)?;
        paths.push(p);
    }
    if matches!(format, Format::Json | Format::Both) {
        let p = dir.join(format!("{stem}.json"));
        let mut body = serde_json::to_vec_pretty(&out.json)?;
        body.push(b'\n');
        write_atomic(&p, &body)?;
        paths.push(p);
    }
    Ok(paths)
}

#[derive(Serialize)]
pub struct Versions {
    pub ranklab: &'static str,
    pub ranklab_core: &'static str,
}

#[derive(Serialize)]
pub struct Summary {
    pub subcommand: String,
    pub config: serde_json::Value,
    pub seed: u64,
    /// Wall-clock start as seconds since the Unix epoch.
    pub started: f64,
    pub elapsed_s: f64,
    pub outputs: Vec<PathBuf>,
    pub versions: Versions,
}

pub fn write_summary(dir: &Path, stem: &str, summary: &Summary) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("creating {}: {e}", dir.display())))?;
    let p = dir.join(format!("{stem}.summary.json"));
    let mut body = serde_json::to_vec_pretty(summary)?;
    body.push(b'\n');
    write_atomic(&p, &body)?;
    Ok(p)
}
