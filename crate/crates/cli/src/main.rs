//! `lowlight`: enhance low-light images, inspect the gamma curve, score
//! results and run manifests.
//!
//! Exit codes: 0 ok, 1 internal error, 2 I/O, 3 configuration,
//! 4 dimension mismatch.

mod batch;
mod commands;
mod error;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{CliError, CliResult};
use crate::settings::ConfigArgs;

#[derive(Debug, Parser)]
#[command(name = "lowlight", version, about = "Low-light image enhancement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enhance one image and print diagnostics as JSON
    Enhance {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Fit the gain curve and compare it with a dense gamma sweep (CSV + JSON footer)
    Curve {
        input: PathBuf,
        #[arg(long, default_value = "0.3:2.2:0.05", value_name = "LO:HI:STEP")]
        sweep: String,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Score an enhanced image against a reference
    Metrics {
        enhanced: PathBuf,
        reference: PathBuf,
        /// Low-light input for order error and statistical states
        #[arg(long)]
        low: Option<PathBuf>,
    },
    /// Enhance and score every row of an `id,low,ref` manifest
    Batch {
        manifest: PathBuf,
        /// Report CSV; standard output when omitted
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Directory for the enhanced images
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Full run report (config, diagnostics, scores) as JSON
        #[arg(long)]
        json: Option<PathBuf>,
        /// Worker threads; 0 uses every core
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Enhance { input, output, cfg } => {
            commands::enhance(&input, &output, &cfg.resolve()?)
        }
        Command::Curve { input, sweep, cfg } => {
            let cfg = cfg.resolve()?;
            let sweep = settings::parse_sweep(&sweep)?;
            commands::curve(&input, sweep, &cfg)
        }
        Command::Metrics {
            enhanced,
            reference,
            low,
        } => commands::metrics(&enhanced, &reference, low.as_ref()),
        Command::Batch {
            manifest,
            output,
            out_dir,
            json,
            jobs,
            cfg,
        } => {
            let cfg = cfg.resolve()?;
            let rows = batch::read_manifest(&manifest)?;
            if let Some(dir) = &out_dir {
                std::fs::create_dir_all(dir)
                    .map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
            }
            let reports = batch::run_rows(&rows, &cfg, jobs, out_dir.as_deref())?;
            for r in &reports {
                if let Some(e) = &r.error {
                    eprintln!("{}: {e}", r.id);
                }
            }
            match &output {
                Some(path) => {
                    let file = std::fs::File::create(path)
                        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
                    batch::write_report(file, &reports)?;
                }
                None => batch::write_report(std::io::stdout().lock(), &reports)?,
            }
            if let Some(path) = &json {
                let report = batch::RunReport {
                    config: &cfg,
                    rows: &reports,
                };
                std::fs::write(path, serde_json::to_string_pretty(&report)?)
                    .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(error::Kind::Config as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
