use std::fs;
use std::path::{Path, PathBuf};

use modzeta::config::ExperimentConfig;
use modzeta::error::{Error, Result};
use serde::Serialize;
use serde_json::json;

pub fn path(cfg: &ExperimentConfig, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(&cfg.out)?;
    Ok(cfg.out.join(name))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Numeric(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Writes rows under `header`; every row must have the header's length.
pub fn write_csv<R: Serialize>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<()> {
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reports a failed run as JSON on stderr and in `error.json`.
pub fn diagnostic(cfg: &ExperimentConfig, e: &Error) {
    let value = json!({
        "error": e.kind(),
        "message": e.to_string(),
        "config": cfg,
    });
    let text = serde_json::to_string_pretty(&value).unwrap_or_default();
    eprintln!("{text}");
    if let Ok(p) = path(cfg, "error.json") {
        let _ = fs::write(p, text + "\n");
    }
}
