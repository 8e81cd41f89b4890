use clap::Parser;
use qcauchy_cli::{emit_plot_data, execute, resolve, ConfigFile, Overrides, PlotKind, RunError};
use std::path::PathBuf;
use std::process::ExitCode;

/// Runs a verification suite and writes `report.jsonl`, `report.csv`, suite
/// artifacts and plot CSVs to the output directory.
#[derive(Debug, Parser)]
#[command(name = "verify", version)]
struct Cli {
    /// TOML file with any subset of the configuration keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Only write plot data of this kind from the artifacts already in `--out`.
    #[arg(long, value_enum)]
    emit_plot: Option<PlotKind>,
    #[command(flatten)]
    overrides: Overrides,
}

const USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(kind) = cli.emit_plot {
        let dir = cli
            .overrides
            .output_dir
            .unwrap_or_else(|| PathBuf::from(qcauchy_cli::config::DEFAULT_OUTPUT_DIR));
        return match emit_plot_data(&dir, kind) {
            Ok(path) => {
                println!("{}", path.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(USAGE)
            }
        };
    }
    let file = match cli.config.as_deref().map(ConfigFile::load).transpose() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
    };
    let config = match resolve(file, cli.overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
    };
    match execute(&config) {
        Ok(outcome) => {
            for r in &outcome.reports {
                println!(
                    "{} {:<8} {:<48} abs={:.3e} rel={:.3e} tol={:.1e}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.suite,
                    r.check_name,
                    r.max_abs_err,
                    r.max_rel_err,
                    r.tolerance
                );
            }
            let failed = outcome.reports.iter().filter(|r| !r.pass).count();
            println!(
                "{} checks, {} failed; output in {}",
                outcome.reports.len(),
                failed,
                config.output_dir.display()
            );
            if outcome.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(RunError::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
