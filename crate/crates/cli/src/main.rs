mod cli;
mod commands;
mod config;
mod error;
mod output;
mod units;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use toml::Value;

use cli::{Cli, Cmd, Options};
use config::{overlay, ExperimentConfig, RawConfig};
use error::CliError;

fn resolve(
    preset: Option<&str>,
    command: Option<&str>,
    opts: &Options,
) -> Result<ExperimentConfig, CliError> {
    let mut raw = RawConfig::new();
    if let Some(name) = preset {
        raw = config::preset(name)?;
    }
    if let Some(path) = &opts.config {
        overlay(&mut raw, config::load_file(path)?);
    }
    overlay(&mut raw, opts.raw());
    if let Some(name) = command {
        raw.insert("command".into(), Value::String(name.into()));
    }
    ExperimentConfig::resolve(&raw)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (preset, command, opts) = match &cli.command {
        Cmd::Pdf(o) => (None, Some("pdf"), o),
        Cmd::Cdf(o) => (None, Some("cdf"), o),
        Cmd::Simulate(o) => (None, Some("simulate"), o),
        Cmd::Success(o) => (None, Some("success"), o),
        Cmd::Threshold(o) => (None, Some("threshold"), o),
        Cmd::Sweep(o) => (None, Some("sweep"), o),
        Cmd::Reproduce { figure, opts } => (Some(figure.name()), None, opts),
        Cmd::Run(o) => {
            if o.config.is_none() {
                return Err(CliError::config("`run` needs --config"));
            }
            (None, None, o)
        }
    };
    let cfg = resolve(preset, command, opts)?;
    let outcome = commands::execute(&cfg, opts.workers)?;
    let text = output::render(&cfg, &outcome.table);
    match &opts.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::config(format!("cannot write output: {e}")))?;
        }
    }
    match outcome.deferred {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::config(e.to_string().trim().to_string());
            eprintln!("{}", err.record());
            return ExitCode::from(err.kind.exit_code());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.record());
            ExitCode::from(err.kind.exit_code())
        }
    }
}
