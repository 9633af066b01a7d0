//! `qmeas`: simulate quantum measurements with mixed apparatus states.
//!
//! Exit codes: 0 success, 1 usage/IO/config error, 2 a certified inequality
//! check failed. Diagnostics go to stderr only (`QMEAS_LOG=info|debug`).

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use qmeas_cli::config::ModelConfigFile;
use qmeas_cli::pipeline::{execute_fuzz, execute_run, execute_sweep, SweepParam};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qmeas",
    version,
    about = "Quantum measurement with a mixed apparatus: information gain, \
             classical correlations, and entanglement bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one model and print a JSON report to stdout.
    Run {
        /// Path to a JSON model config file.
        #[arg(long)]
        config: PathBuf,
        /// Include dense matrices and optimizer certificates in the report.
        #[arg(long)]
        full: bool,
    },
    /// Sweep a one-parameter model family and write a CSV table.
    Sweep {
        /// Path to a JSON model config file.
        #[arg(long)]
        config: PathBuf,
        /// Parameter to sweep: "spectrum_p" or "amp_theta".
        #[arg(long)]
        param: String,
        /// Number of evenly spaced sweep points (at least 2).
        #[arg(long)]
        steps: usize,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the inequality suite on random models and print a tally.
    Fuzz {
        /// Number of random models to draw.
        #[arg(long)]
        n: usize,
        /// Base RNG seed; each model gets its own derived stream.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest apparatus dimension to draw (2 to 4).
        #[arg(long, default_value_t = 4)]
        max_dim: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap exits with 2 on usage errors by default; 2 is reserved
            // here for inequality violations, so usage problems map to 1.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("qmeas: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Run { config, full } => {
            let (model, cfg) = ModelConfigFile::load(&config)?.into_parts()?;
            let (report, violated) = execute_run(&model, &cfg, full)?;
            let json = serde_json::to_string_pretty(&report)
                .context("failed to serialize the run report")?;
            println!("{json}");
            Ok(if violated { 2 } else { 0 })
        }
        Command::Sweep {
            config,
            param,
            steps,
            out,
        } => {
            let (model, _) = ModelConfigFile::load(&config)?.into_parts()?;
            let param = SweepParam::parse(&param)?;
            let file = std::fs::File::create(&out)
                .with_context(|| format!("cannot create output file {}", out.display()))?;
            let mut writer = std::io::BufWriter::new(file);
            execute_sweep(&model, param, steps, &mut writer)?;
            writer.flush().context("failed to flush the CSV output")?;
            Ok(0)
        }
        Command::Fuzz { n, seed, max_dim } => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            let all_passed = execute_fuzz(n, seed, max_dim, &mut lock)?;
            lock.flush().context("failed to flush the summary")?;
            Ok(if all_passed { 0 } else { 2 })
        }
    }
}
