//! Atomic, reproducible output writing.
//!
//! Results land via a temp file plus rename in the target directory, with
//! the fully resolved configuration (defaults materialized) written
//! alongside. JSON objects serialize with sorted keys and CSV rows are
//! RFC-4180 quoted, so reruns of the same config are byte-identical.

use std::path::{Path, PathBuf};

use nilmix::error::{Error, Result};
use serde_json::Value;

pub enum Output {
    Json(Value),
    Csv { header: Vec<String>, rows: Vec<Vec<String>> },
}

impl Output {
    pub fn default_extension(&self) -> &'static str {
        match self {
            Output::Json(_) => "json",
            Output::Csv { .. } => "csv",
        }
    }

    fn render(&self) -> Result<Vec<u8>> {
        match self {
            Output::Json(v) => {
                let mut s = serde_json::to_string_pretty(v)
                    .map_err(|e| Error::validation(format!("serialization: {}", e)))?;
                s.push('\n');
                Ok(s.into_bytes())
            }
            Output::Csv { header, rows } => {
                let mut w = csv::WriterBuilder::new()
                    .quote_style(csv::QuoteStyle::Necessary)
                    .from_writer(Vec::new());
                w.write_record(header).map_err(csv_err)?;
                for row in rows {
                    w.write_record(row).map_err(csv_err)?;
                }
                w.into_inner().map_err(|e| Error::validation(format!("csv: {}", e)))
            }
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::validation(format!("csv: {}", e))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::validation(format!("creating {}: {}", dir.display(), e)))?;
    let tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| Error::validation(format!("temp file: {}", e)))?;
    std::io::Write::write_all(&mut tmp.as_file(), bytes)
        .map_err(|e| Error::validation(format!("write: {}", e)))?;
    tmp.persist(path).map_err(|e| Error::validation(format!("rename: {}", e)))?;
    Ok(())
}

/// Writes the result and the resolved config sidecar atomically.
pub fn emit(out_path: &PathBuf, resolved_config: &Value, output: &Output) -> Result<()> {
    write_atomic(out_path, &output.render()?)?;
    let sidecar = {
        let mut p = out_path.as_os_str().to_owned();
        p.push(".config.json");
        PathBuf::from(p)
    };
    let mut cfg = serde_json::to_string_pretty(resolved_config)
        .map_err(|e| Error::validation(format!("serialization: {}", e)))?;
    cfg.push('\n');
    write_atomic(&sidecar, cfg.as_bytes())?;
    eprintln!("nilmix: wrote {}", out_path.display());
    Ok(())
}
