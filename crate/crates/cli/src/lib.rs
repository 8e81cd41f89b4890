//! Batch verification harness: named suites of numerical checks, reports as
//! JSON lines and CSV, and CSV series for plotting.

pub mod artifacts;
pub mod checks;
pub mod config;
pub mod output;
pub mod plot;

pub use config::{resolve, ConfigError, ConfigFile, Overrides, Suite, SuiteConfig};
pub use plot::{emit_plot_data, PlotError, PlotKind};
pub use qcauchy::VerificationReport;

use checks::{Check, Context};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("writing {path}: {message}")]
    Output { path: PathBuf, message: String },
}

/// Runs every check of `config.suite` in registry order. Configuration errors
/// surface before any computation; a check that errors or panics is recorded
/// as a failure.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<VerificationReport>, ConfigError> {
    config.validate()?;
    let ctx = Context::new(config);
    Ok(run_checks(&ctx))
}

/// Runs the named checks, in the given order, sharing one context. Unknown
/// names are configuration errors.
pub fn run_named(config: &SuiteConfig, names: &[&str]) -> Result<Vec<VerificationReport>, ConfigError> {
    config.validate()?;
    let checks = names
        .iter()
        .map(|n| checks::find(n).ok_or_else(|| ConfigError::Invalid(format!("unknown check `{n}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let ctx = Context::new(config);
    Ok(checks.into_iter().map(|c| run_check(&ctx, c)).collect())
}

fn run_checks(ctx: &Context) -> Vec<VerificationReport> {
    checks::registry()
        .filter(|c| ctx.config.suite.covers(c.suite))
        .map(|c| run_check(ctx, c))
        .collect()
}

fn run_check(ctx: &Context, check: &Check) -> VerificationReport {
    let tolerance = ctx.config.tolerance(check);
    let suite = check.suite.name();
    let mut rng = ctx.rng(check.name);
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| (check.run)(ctx, &mut rng)));
    let mut report = match outcome {
        Ok(Ok(tally)) => tally.report(suite, check.name, check.anchor, tolerance, check.metric),
        Ok(Err(e)) => {
            eprintln!("{}: {e}", check.name);
            VerificationReport::failed(suite, check.name, check.anchor, tolerance)
        }
        Err(_) => {
            eprintln!("{}: panicked", check.name);
            VerificationReport::failed(suite, check.name, check.anchor, tolerance)
        }
    };
    if ctx.config.record_runtime {
        report.runtime_ms = Some(start.elapsed().as_millis() as u64);
    }
    report
}

/// Everything one invocation produced.
#[derive(Debug)]
pub struct Outcome {
    pub reports: Vec<VerificationReport>,
    /// Files written, in write order.
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

/// Runs the suite and writes reports, suite artifacts and plot data to
/// `config.output_dir`.
pub fn execute(config: &SuiteConfig) -> Result<Outcome, RunError> {
    config.validate()?;
    let ctx = Context::new(config);
    let reports = run_checks(&ctx);
    let dir = &config.output_dir;
    let mut files = output::write_reports(dir, &reports)?;
    if config.suite.covers(Suite::Kernel) {
        files.extend(artifacts::write_kernel_profile(&ctx, dir)?);
    }
    if config.suite.covers(Suite::Spectrum) {
        files.extend(artifacts::write_spectral(&ctx, dir)?);
    }
    for kind in PlotKind::ALL {
        if kind.source_files().iter().all(|f| dir.join(f).is_file()) {
            let path = emit_plot_data(dir, kind).map_err(|e| RunError::Output {
                path: dir.join(kind.file_name()),
                message: e.to_string(),
            })?;
            files.push(path);
        }
    }
    Ok(Outcome { reports, files })
}
