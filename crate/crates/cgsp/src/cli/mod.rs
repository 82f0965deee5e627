//! Command-line surface: configure targets, generate data, estimate
//! statistics, validate feasibility, and rerun the verification experiments
//! at desk scale.

mod estimate;
mod generate;
mod reproduce;
mod target;
mod validate;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::error::Error;

/// Stable exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CGSP_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "cgsp",
    version,
    about = "Generate and verify pairs of coupled Gaussian sequences and random fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize coupled realizations and write them with a run manifest.
    Generate(generate::GenerateArgs),
    /// Measure ensemble correlations of generated data and fit exponents.
    Estimate(estimate::EstimateArgs),
    /// Check a target triple for spectral feasibility.
    Validate(validate::ValidateArgs),
    /// Rerun the verification experiments (fig1, fig2, fig3) and report
    /// pass/fail against the pinned tolerances.
    Reproduce(reproduce::ReproduceArgs),
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// Flat key-value config file; explicit flags override its entries.
    #[arg(long)]
    config: Option<std::path::PathBuf>,
    /// Output directory (default: $CGSP_OUT_DIR or ./cgsp-out).
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

/// Run the CLI on explicit arguments and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Generate(args) => generate::run(args),
        Command::Estimate(args) => estimate::run(args),
        Command::Validate(args) => validate::run(args),
        Command::Reproduce(args) => reproduce::run(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

fn exit_code_for(err: &Error) -> i32 {
    if err.is_infeasible_target() {
        return EXIT_INFEASIBLE;
    }
    match err {
        Error::Io(_) | Error::Format { .. } => EXIT_IO,
        Error::InvalidParameter(_) | Error::TableLength { .. } | Error::FitRange { .. } => {
            EXIT_USAGE
        }
        _ => EXIT_INTERNAL,
    }
}

fn default_out_dir() -> std::path::PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::path::PathBuf::from("cgsp-out"))
}

fn resolve_out_dir(common: &CommonArgs, config: &crate::io::KeyValues) -> std::path::PathBuf {
    common
        .out
        .clone()
        .or_else(|| config.get("out").map(std::path::PathBuf::from))
        .unwrap_or_else(default_out_dir)
}

fn tool_header() -> Vec<String> {
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    vec![
        format!("cgsp {}", env!("CARGO_PKG_VERSION")),
        format!("written at unix time {stamp}"),
        "this manifest doubles as a config file: cgsp <command> --config <this file>".into(),
    ]
}
