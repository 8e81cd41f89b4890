//! Serialization helpers shared by reports and artifacts.

use crate::RunError;
use qcauchy::VerificationReport;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

pub const REPORT_JSONL: &str = "report.jsonl";
pub const REPORT_CSV: &str = "report.csv";

fn io_err(path: &Path, e: impl ToString) -> RunError {
    RunError::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<PathBuf, RunError> {
    fs::write(path, text).map_err(|e| io_err(path, e))?;
    Ok(path.to_path_buf())
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf, RunError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    text.push('\n');
    write_text(path, &text)
}

pub(crate) fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<PathBuf, RunError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(path.to_path_buf())
}

/// `report.jsonl` (one object per check) and `report.csv`.
pub fn write_reports(dir: &Path, reports: &[VerificationReport]) -> Result<Vec<PathBuf>, RunError> {
    ensure_dir(dir)?;
    let jsonl = dir.join(REPORT_JSONL);
    let mut text = String::new();
    for r in reports {
        text.push_str(&serde_json::to_string(r).map_err(|e| io_err(&jsonl, e))?);
        text.push('\n');
    }
    Ok(vec![
        write_text(&jsonl, &text)?,
        write_csv(&dir.join(REPORT_CSV), reports)?,
    ])
}
