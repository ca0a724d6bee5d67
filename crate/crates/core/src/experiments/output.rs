//! Artifact writers. Every writer creates parent directories and returns the
//! path it wrote so verdicts can list their artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

fn prepare(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    Ok(())
}

/// Comma-separated table with a header line; values in full precision.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<PathBuf> {
    prepare(path)?;
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(path.to_path_buf())
}

/// Two-column `x y` plot data, one point per line, with a `#` comment header.
pub fn write_dat(path: &Path, label: &str, points: &[(f64, f64)]) -> Result<PathBuf> {
    prepare(path)?;
    let mut text = format!("# {label}\n");
    for (x, y) in points {
        text.push_str(&format!("{x:.17e} {y:.17e}\n"));
    }
    fs::write(path, text)?;
    Ok(path.to_path_buf())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf> {
    prepare(path)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| crate::Error::Parse(e.to_string()))?;
    fs::write(path, text)?;
    Ok(path.to_path_buf())
}

pub fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    prepare(path)?;
    fs::write(path, text)?;
    Ok(path.to_path_buf())
}

/// Path string as recorded in verdicts.
pub fn display(path: &Path) -> String {
    path.to_string_lossy().into_owned()
}
