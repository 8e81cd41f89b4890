//! Flat CSV series for external plotting, derived from the JSON artifacts of
//! a previous run.

use crate::artifacts::{spectral_report_name, KernelProfilePoint, KERNEL_PROFILE_JSON, SCHATTEN_JSON};
use qcauchy::spectral::SchattenDiagnostics;
use qcauchy::SpectralReport;
use serde::de::DeserializeOwned;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    SingularValues,
    SchattenSums,
    KernelProfile,
}

#[derive(Debug, thiserror::Error)]
pub enum PlotError {
    #[error("{0} does not exist or is not a directory")]
    MissingDirectory(PathBuf),
    #[error("{0} is empty")]
    EmptyDirectory(PathBuf),
    #[error("{0} not found; run the suite that produces it first")]
    MissingSource(PathBuf),
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("writing {path}: {message}")]
    Write { path: PathBuf, message: String },
}

const SPECTRAL_KS: [u32; 3] = [0, 1, 2];

impl PlotKind {
    pub const ALL: [PlotKind; 3] = [
        PlotKind::SingularValues,
        PlotKind::SchattenSums,
        PlotKind::KernelProfile,
    ];

    pub fn source_files(self) -> Vec<String> {
        match self {
            PlotKind::SingularValues => SPECTRAL_KS.iter().map(|&k| spectral_report_name(k, "json")).collect(),
            PlotKind::SchattenSums => vec![SCHATTEN_JSON.into()],
            PlotKind::KernelProfile => vec![KERNEL_PROFILE_JSON.into()],
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            PlotKind::SingularValues => "singular_values.csv",
            PlotKind::SchattenSums => "schatten_sums.csv",
            PlotKind::KernelProfile => "kernel_profile.csv",
        }
    }
}

fn read<T: DeserializeOwned>(path: &Path) -> Result<T, PlotError> {
    if !path.is_file() {
        return Err(PlotError::MissingSource(path.to_path_buf()));
    }
    let parse = |message: String| PlotError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| parse(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| parse(e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// Writes `kind.file_name()` into `dir` from the artifacts already there.
pub fn emit_plot_data(dir: &Path, kind: PlotKind) -> Result<PathBuf, PlotError> {
    if !dir.is_dir() {
        return Err(PlotError::MissingDirectory(dir.to_path_buf()));
    }
    let empty = fs::read_dir(dir)
        .map_err(|_| PlotError::MissingDirectory(dir.to_path_buf()))?
        .next()
        .is_none();
    if empty {
        return Err(PlotError::EmptyDirectory(dir.to_path_buf()));
    }
    let mut rows: Vec<Vec<String>> = Vec::new();
    match kind {
        PlotKind::SingularValues => {
            let reports = kind
                .source_files()
                .iter()
                .map(|f| read::<SpectralReport>(&dir.join(f)))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(vec!["n".into(), "k0".into(), "k1".into(), "k2".into()]);
            let len = reports
                .iter()
                .map(|r| r.singular_values_numeric.len())
                .max()
                .unwrap_or(0);
            for n in 0..len {
                let mut row = vec![n.to_string()];
                row.extend(reports.iter().map(|r| opt(r.singular_values_numeric.get(n).copied())));
                rows.push(row);
            }
        }
        PlotKind::SchattenSums => {
            let d: SchattenDiagnostics = read(&dir.join(SCHATTEN_JSON))?;
            let mut header = vec!["truncation".to_string()];
            header.extend(d.series.iter().map(|s| format!("kappa_{}", s.exponent)));
            rows.push(header);
            for (i, t) in d.truncations.iter().enumerate() {
                let mut row = vec![t.to_string()];
                row.extend(d.series.iter().map(|s| opt(s.partial_sums.get(i).copied())));
                rows.push(row);
            }
        }
        PlotKind::KernelProfile => {
            let points: Vec<KernelProfilePoint> = read(&dir.join(KERNEL_PROFILE_JSON))?;
            rows.push(vec!["t".into(), "closed".into(), "series".into(), "rel_err".into()]);
            for p in points {
                rows.push(vec![
                    format!("{}", p.t),
                    format!("{:e}", p.closed_norm),
                    opt(p.series_norm),
                    opt(p.rel_err),
                ]);
            }
        }
    }
    let path = dir.join(kind.file_name());
    let write_err = |e: String| PlotError::Write {
        path: path.clone(),
        message: e,
    };
    let mut w = csv::Writer::from_path(&path).map_err(|e| write_err(e.to_string()))?;
    for r in &rows {
        w.write_record(r).map_err(|e| write_err(e.to_string()))?;
    }
    w.flush().map_err(|e| write_err(e.to_string()))?;
    Ok(path)
}
