//! Deterministic artifact writers.
//!
//! Every file these helpers produce is a pure function of the inputs: no
//! timestamps, no machine identifiers, no map iteration order. Reruns with
//! the same config and seed must be byte-identical, which is itself one of
//! the checks the test suite runs.

use crate::error::Result;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

/// Create the output directory (and parents) if needed.
pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Pretty JSON with a trailing newline. Field order follows the struct
/// definition, so output is stable across runs and worker counts.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

/// Minimal CSV: comma-separated, no quoting. Callers only pass numeric
/// cells and fixed labels, so quoting rules never come into play.
pub fn write_csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(&path, text)?;
    Ok(path)
}

/// Shortest round-trip decimal for a float cell.
pub fn cell(x: f64) -> String {
    format!("{x}")
}
