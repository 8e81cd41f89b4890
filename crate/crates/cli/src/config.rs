//! Suite selection and run configuration.

use crate::checks;
use qcauchy::bergman::TruncationSpec;
use qcauchy::QuadratureSpec;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Algebra,
    Specfun,
    Basis,
    Quadrature,
    Kernel,
    Transform,
    Projection,
    Spectrum,
    All,
}

impl Suite {
    /// Every concrete suite in run order.
    pub const CONCRETE: [Suite; 8] = [
        Suite::Algebra,
        Suite::Specfun,
        Suite::Basis,
        Suite::Quadrature,
        Suite::Kernel,
        Suite::Transform,
        Suite::Projection,
        Suite::Spectrum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Specfun => "specfun",
            Suite::Basis => "basis",
            Suite::Quadrature => "quadrature",
            Suite::Kernel => "kernel",
            Suite::Transform => "transform",
            Suite::Projection => "projection",
            Suite::Spectrum => "spectrum",
            Suite::All => "all",
        }
    }

    /// Whether running `self` includes the checks of `other`.
    pub fn covers(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// A fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub quadrature: QuadratureSpec,
    pub truncation: TruncationSpec,
    /// Overrides keyed by check name; unlisted checks use their documented default.
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Fill `runtime_ms`; off by default so reports are byte-identical across runs.
    pub record_runtime: bool,
}

pub const DEFAULT_SEED: u64 = 20240229;
pub const DEFAULT_OUTPUT_DIR: &str = "verify-out";

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            quadrature: QuadratureSpec::default(),
            truncation: TruncationSpec::default(),
            tolerances: BTreeMap::new(),
            seed: DEFAULT_SEED,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            record_runtime: false,
        }
    }

    /// Tolerance for `check`: the override if present, else the registry default.
    pub fn tolerance(&self, check: &checks::Check) -> f64 {
        self.tolerances.get(check.name).copied().unwrap_or(check.tolerance)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.quadrature
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("quadrature: {e}")))?;
        self.truncation
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("truncation: {e}")))?;
        for (name, &tol) in &self.tolerances {
            if checks::find(name).is_none() {
                return Err(ConfigError::Invalid(format!("tolerance for unknown check `{name}`")));
            }
            if !(tol >= 0.0 && tol.is_finite()) {
                return Err(ConfigError::Invalid(format!(
                    "tolerance for `{name}` must be finite and >= 0"
                )));
            }
        }
        Ok(())
    }
}

/// The on-disk form: every key optional, unknown keys rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub suite: Option<Suite>,
    pub quadrature: Option<QuadratureSpec>,
    pub truncation: Option<TruncationSpec>,
    pub tolerances: Option<BTreeMap<String, f64>>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub record_runtime: Option<bool>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let err = |message: String| ConfigError::File {
            path: path.to_path_buf(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        Self::parse(&text).map_err(err)
    }
}

/// Command-line values; each mirrors one `SuiteConfig` field, with the
/// quadrature and truncation specs flattened to their scalar fields.
#[derive(Debug, Clone, Default, PartialEq, clap::Args)]
pub struct Overrides {
    /// Suite to run.
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    /// Base seed; each check derives its own stream from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for reports, artifacts and plot data.
    #[arg(long = "out")]
    pub output_dir: Option<PathBuf>,
    /// Gauss-Laguerre nodes in t = r^2.
    #[arg(long)]
    pub radial_order: Option<usize>,
    /// Trapezoid nodes in the slice angle.
    #[arg(long)]
    pub angular_order: Option<usize>,
    /// Hemisphere rule nodes in phi.
    #[arg(long)]
    pub hemi_phi_order: Option<usize>,
    /// Hemisphere rule nodes in psi.
    #[arg(long)]
    pub hemi_psi_order: Option<usize>,
    /// Total hemisphere weight `A`.
    #[arg(long)]
    pub area_normalization: Option<f64>,
    /// Radius of the polar disc around each kernel singularity.
    #[arg(long)]
    pub singular_exclusion_radius: Option<f64>,
    /// Last series index kept.
    #[arg(long)]
    pub max_m: Option<usize>,
    /// Admissible series tail relative to the majorant.
    #[arg(long)]
    pub tail_tolerance: Option<f64>,
    /// Tolerance override, `CHECK=VALUE`; repeatable.
    #[arg(long = "tolerance", value_parser = parse_tolerance)]
    pub tolerances: Vec<(String, f64)>,
    /// Fill `runtime_ms` in the reports.
    #[arg(long)]
    pub record_runtime: bool,
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected CHECK=VALUE")?;
    let value = value.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((name.trim().to_string(), value))
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Defaults, then the file, then flags. A suite must come from one of the last two.
pub fn resolve(file: Option<ConfigFile>, flags: Overrides) -> Result<SuiteConfig, ConfigError> {
    let file = file.unwrap_or_default();
    let suite = flags
        .suite
        .or(file.suite)
        .ok_or_else(|| ConfigError::Invalid("no suite given (use --suite or `suite` in the config file)".into()))?;
    let mut config = SuiteConfig::new(suite);
    set(&mut config.quadrature, file.quadrature);
    set(&mut config.truncation, file.truncation);
    set(&mut config.tolerances, file.tolerances);
    set(&mut config.seed, file.seed);
    set(&mut config.output_dir, file.output_dir);
    set(&mut config.record_runtime, file.record_runtime);

    let q = &mut config.quadrature;
    set(&mut q.radial_order, flags.radial_order);
    set(&mut q.angular_order, flags.angular_order);
    set(&mut q.hemi_phi_order, flags.hemi_phi_order);
    set(&mut q.hemi_psi_order, flags.hemi_psi_order);
    set(&mut q.area_normalization, flags.area_normalization);
    set(&mut q.singular_exclusion_radius, flags.singular_exclusion_radius);
    set(&mut config.truncation.max_m, flags.max_m);
    set(&mut config.truncation.tail_tolerance, flags.tail_tolerance);
    config.tolerances.extend(flags.tolerances);
    set(&mut config.seed, flags.seed);
    set(&mut config.output_dir, flags.output_dir);
    config.record_runtime |= flags.record_runtime;
    config.validate()?;
    Ok(config)
}
