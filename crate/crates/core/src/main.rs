use std::path::PathBuf;
use std::process::ExitCode;

use ccrm::cli::{self, OutputFormat, RunConfig, SweepAxis, SweepParam};
use ccrm::{Error, Result};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ccrm", version, about = "Spectral distances on discretized geometries")]
struct Args {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Distance between two states.
    Compute {
        #[arg(long)]
        op: String,
        #[arg(long)]
        grid: String,
        #[arg(long = "a", allow_hyphen_values = true)]
        a: String,
        #[arg(long = "b", allow_hyphen_values = true)]
        b: String,
        /// Include the optimal 1-Lipschitz witness on the grid.
        #[arg(long)]
        witness: bool,
        /// Include the transport plan as [source, target, mass] triples.
        #[arg(long)]
        plan: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance as a function of one parameter (x, eps, h or q).
    Sweep {
        #[arg(long)]
        op: String,
        #[arg(long)]
        grid: String,
        #[arg(long = "a", allow_hyphen_values = true)]
        a: String,
        #[arg(long = "b", allow_hyphen_values = true)]
        b: String,
        #[arg(long)]
        param: String,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, allow_hyphen_values = true)]
        stop: String,
        #[arg(long)]
        step: String,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the solver against closed forms for a built-in scenario (or `all`).
    Validate {
        scenario: String,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(e.to_string())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(args: Args) -> Result<bool> {
    match args.command {
        Cmd::Compute { op, grid, a, b, witness, plan, out } => {
            let mut cfg = RunConfig::compute(&op, &grid, &a, &b);
            cfg.with_witness = witness;
            cfg.with_plan = plan;
            emit(&cli::run_compute(&cfg)?, out.as_ref())?;
            Ok(true)
        }
        Cmd::Sweep { op, grid, a, b, param, start, stop, step, format, out } => {
            let axis = SweepAxis {
                param: param.parse::<SweepParam>()?,
                start: cli::parse_number(&start)?,
                stop: cli::parse_number(&stop)?,
                step: cli::parse_number(&step)?,
            };
            let mut cfg = RunConfig::sweep(&op, &grid, &a, &b, axis);
            cfg.format = format.parse::<OutputFormat>()?;
            emit(&cli::run_sweep(&cfg)?, out.as_ref())?;
            Ok(true)
        }
        Cmd::Validate { scenario, format, out } => {
            let mut cfg = RunConfig::validate(&scenario);
            cfg.format = format.parse::<OutputFormat>()?;
            let (ok, report) = cli::run_validate(&cfg)?;
            emit(&report, out.as_ref())?;
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
