use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use qkz::scalars::{parse_rational, set_precision_digits, Rational};
use qkz::sl2rep::ModuleKind;
use qkz_cli::commands::{self, WeightKind, WeightSpec};
use qkz_cli::config::{load_config, require_valid};
use qkz_cli::suite::{run, RunOptions, Suite};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "qkz", version, about = "Verification engine for the sl(2) rational qKZ equation")]
struct Cli {
    /// Working precision in decimal digits for numeric computations.
    #[arg(long, global = true, default_value_t = 30)]
    precision: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the exact and/or numeric suites and write a JSON report.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report even when the parameters fail validation.
        #[arg(long)]
        force: bool,
        /// Include wall-clock timings (makes reports non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Exact R-matrix blocks as CSV.
    Rmatrix {
        #[arg(long, value_parser = rational)]
        l1: Rational,
        #[arg(long, value_parser = rational)]
        l2: Rational,
        #[arg(long, value_parser = rational)]
        x: Rational,
        #[arg(long)]
        level: usize,
        /// Quotient to the irreducible modules (dominant weights only).
        #[arg(long)]
        irreducible: bool,
    },
    /// Dimensions and exact checks for the blocks spaces.
    Blocks {
        #[arg(long)]
        config: PathBuf,
    },
    /// Quantum-group computations.
    Uq {
        #[command(subcommand)]
        command: UqCommand,
    },
    /// One coordinate integral for a weight function.
    Integrate {
        #[arg(long)]
        config: PathBuf,
        /// Rational weight function index, e.g. 1,0,0.
        #[arg(long, value_delimiter = ',', required = true)]
        w_index: Vec<usize>,
        /// sing:N, sing-index:I, basis:I, plus or minus.
        #[arg(long = "W")]
        weight: WeightSpec,
    },
    /// End-to-end verifications.
    Verify {
        #[command(subcommand)]
        command: VerifyCommand,
    },
    /// Weight function evaluations.
    Weightfn {
        #[command(subcommand)]
        command: WeightfnCommand,
    },
}

#[derive(Subcommand)]
enum UqCommand {
    /// Dimension of the q-singular quotient with residual diagnostics.
    Quotient {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// The level-one three-point Example: both scalar equations and qKZ.
    Example {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum WeightfnCommand {
    /// Evaluate a weight function at one point.
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        kind: WeightKind,
        #[arg(long, value_delimiter = ',', required = true)]
        index: Vec<usize>,
        /// One `re,im` point per integration variable.
        #[arg(long = "t", value_parser = commands::parse_point)]
        t: Vec<qkz::scalars::Cx>,
    },
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON value serializes"));
}

fn load_valid(path: &PathBuf) -> Result<qkz::params::ParamSet> {
    let ps = load_config(path)?;
    require_valid(&ps)?;
    Ok(ps)
}

fn execute(cli: Cli) -> Result<bool> {
    set_precision_digits(cli.precision);
    match cli.command {
        Command::Run { config, suite, out, force, timing } => {
            let ps = load_config(&config)?;
            let report = run(&ps, &RunOptions { suite, precision: cli.precision, force, timing })?;
            let text = report.to_json();
            match out {
                Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            for c in &report.checks {
                eprintln!("{:<18} {:?}", c.name, c.status);
            }
            Ok(report.passed)
        }
        Command::Rmatrix { l1, l2, x, level, irreducible } => {
            let kind = if irreducible { ModuleKind::Irreducible } else { ModuleKind::Verma };
            print!("{}", commands::rmatrix_csv(&l1, &l2, &x, level, kind)?);
            Ok(true)
        }
        Command::Blocks { config } => {
            let v = commands::blocks_json(&load_valid(&config)?)?;
            print_json(&v);
            Ok(v["invariance"] == "pass" && v["x_independence"] != "fail")
        }
        Command::Uq { command: UqCommand::Quotient { config } } => {
            print_json(&commands::uq_quotient_json(&load_valid(&config)?)?);
            Ok(true)
        }
        Command::Integrate { config, w_index, weight } => {
            print_json(&commands::integrate_json(&load_valid(&config)?, &w_index, &weight)?);
            Ok(true)
        }
        Command::Verify { command: VerifyCommand::Example { config } } => {
            print_json(&commands::verify_example_json(&load_valid(&config)?)?);
            Ok(true)
        }
        Command::Weightfn { command: WeightfnCommand::Eval { config, kind, index, t } } => {
            print_json(&commands::weightfn_eval_json(&load_config(&config)?, kind, &index, &t)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
