//! Command-line front end for the prediction-interval library: `fit`,
//! `predict`, and `coverage` verbs driven by a JSON run configuration.
//!
//! Exit codes: 0 on success, 2 for configuration and validation problems,
//! 3 when a method fails numerically on valid input.

pub mod config;
pub mod data;
pub mod error;
pub mod render;
pub mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{OutputFormat, RunConfig, Task};
use crate::error::{CliError, CliResult};
use crate::render::render;
use crate::run::execute;

#[derive(Parser)]
#[command(
    name = "predint",
    version,
    about = "Prediction bounds, predictive distributions, and coverage studies"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Fit a parametric family by maximum likelihood.
    Fit(TaskArgs),
    /// Compute prediction bounds or a predictive distribution.
    Predict(TaskArgs),
    /// Estimate the coverage of a method by simulation.
    Coverage(TaskArgs),
}

#[derive(Args)]
struct TaskArgs {
    /// Path of the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Master seed, overriding the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
    /// Output format, overriding the config file.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for OutputFormat {
    fn from(format: FormatArg) -> Self {
        match format {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }
}

/// Parses arguments, runs the requested task, and returns the process exit
/// code. Diagnostics go to stderr; results go to stdout or `--out`.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return err.exit_code();
        }
    };
    let (task, args) = match cli.verb {
        Verb::Fit(args) => (Task::Fit, args),
        Verb::Predict(args) => (Task::Predict, args),
        Verb::Coverage(args) => (Task::Coverage, args),
    };
    match run_task(task, &args) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn run_task(task: Task, args: &TaskArgs) -> CliResult<()> {
    let path = &args.config;
    let text = std::fs::read_to_string(path).map_err(|err| {
        CliError::Config(format!("could not read config {}: {err}", path.display()))
    })?;
    let config: RunConfig = serde_json::from_str(&text).map_err(|err| {
        CliError::Config(format!("invalid config {}: {err}", path.display()))
    })?;
    if config.task != task {
        return Err(CliError::Config(format!(
            "config task `{}` does not match the `{}` command",
            config.task.name(),
            task.name()
        )));
    }
    let resolved =
        config.resolved(args.seed, args.out.clone(), args.format.map(OutputFormat::from));
    let output = execute(&resolved)?;
    let rendered = render(&resolved, &output)?;
    match &resolved.out {
        Some(out) => std::fs::write(out, &rendered)
            .map_err(|err| CliError::Config(format!("could not write {out}: {err}")))?,
        None => print!("{rendered}"),
    }
    Ok(())
}
