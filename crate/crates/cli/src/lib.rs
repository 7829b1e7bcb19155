//! `nsrg` command-line driver: JSON run configs, the ε-sweep lab and the
//! invariant verification suites.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod snapshot;
pub mod sweep;
pub mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "nsrg", version, about = "Hyperviscous Navier-Stokes on the periodic torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one configuration and write snapshots, energy.csv and a manifest.
    Run {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Also write recovered pressure snapshots.
        #[arg(long)]
        pressure: bool,
    },
    /// Repeat a run over decreasing epsilons and fit the convergence rate.
    Sweep {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        epsilons: Option<Vec<f64>>,
        /// Print the planned runs and exit without writing anything.
        #[arg(long)]
        dry_run: bool,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run the invariant suites and print a JSON report.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: verify::Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            output_dir,
            pressure,
        } => {
            let out = run::cmd_run(&config, output_dir.as_deref(), pressure)?;
            println!("{}", out.dir.display());
            if !out.report.energy_estimate_pass {
                return Err(CliError::Failed(format!(
                    "energy residual {:e} exceeds tol_q {:e}",
                    out.report.energy_max_residual, out.report.energy_tol_q
                )));
            }
            Ok(())
        }
        Command::Sweep {
            config,
            epsilons,
            dry_run,
            jobs,
            output_dir,
        } => {
            let eps = epsilons.unwrap_or_else(|| sweep::DEFAULT_EPSILONS.to_vec());
            if dry_run {
                let (_, plan) = sweep::plan_sweep(&config, &eps, output_dir.as_deref())?;
                println!("sweep into {}", plan.dir.display());
                for (e, dir) in &plan.runs {
                    println!("  epsilon {e:e} -> {}", dir.display());
                }
                return Ok(());
            }
            let out = sweep::cmd_sweep(&config, &eps, output_dir.as_deref(), jobs)?;
            let status = if out.pass { "PASS" } else { "FAIL" };
            println!(
                "{}: fitted rate {:.4} (gate {}) {status}",
                out.dir.display(),
                out.result.fitted_rate,
                sweep::RATE_GATE
            );
            if out.pass {
                Ok(())
            } else {
                Err(CliError::Failed(format!(
                    "fitted rate {} below {}",
                    out.result.fitted_rate,
                    sweep::RATE_GATE
                )))
            }
        }
        Command::Verify {
            suite,
            seed,
            report,
        } => {
            let r = verify::verify(suite, seed, &verify::Operators::default())?;
            let json = r.to_json();
            println!("{json}");
            if let Some(path) = report {
                output::write_atomic(&path, json.as_bytes())?;
            }
            match r.first_failure {
                None => Ok(()),
                Some(name) => Err(CliError::Failed(name)),
            }
        }
    }
}

/// Parse the process arguments, run, and map errors to exit codes.
pub fn run_cli() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nsrg: {e}");
            e.exit_code()
        }
    }
}
