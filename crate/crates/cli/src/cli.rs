use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use toml::Value;

use crate::config::RawConfig;

/// Received signal strength between random nanonodes in a disk.
#[derive(Debug, Parser)]
#[command(name = "molrss", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Analytic density against a Monte Carlo histogram.
    Pdf(Options),
    /// Quadrature, series and empirical CDFs on a concentration grid.
    Cdf(Options),
    /// Raw Monte Carlo histogram (or ECDF with --ecdf).
    Simulate(Options),
    /// Success probability against molecule count.
    Success(Options),
    /// Minimum molecule count reaching the target success probability.
    Threshold(Options),
    /// Minimum molecule count against disk radius.
    Sweep(Options),
    /// Re-run a figure with its preset parameters.
    Reproduce {
        figure: Figure,
        #[command(flatten)]
        opts: Options,
    },
    /// Run the command named in a config file, or replay a previous output.
    Run(Options),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
        }
    }
}

/// Physical values take unit suffixes (`3mm`, `1e-5cm2/s`, `0.01/mm2`);
/// bare numbers are SI.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Config file: TOML key/values, or an earlier CSV or JSON output.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Monte Carlo worker threads (does not change results).
    #[arg(long)]
    pub workers: Option<usize>,
    /// free or drift.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub radius: Option<String>,
    #[arg(long)]
    pub diffusion: Option<String>,
    #[arg(long)]
    pub time: Option<String>,
    #[arg(long)]
    pub molecules: Option<String>,
    #[arg(long)]
    pub velocity: Option<String>,
    /// Reception threshold concentration.
    #[arg(long)]
    pub threshold: Option<String>,
    /// Target success probability.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub bins: Option<String>,
    /// `name=a,b,c`, `name=start:stop:count` or `name=start:stop:count:log`.
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long)]
    pub y_min: Option<String>,
    #[arg(long)]
    pub y_max: Option<String>,
    /// Grid points for the CDF table.
    #[arg(long)]
    pub points: Option<String>,
    /// Emit ECDF steps from `simulate` instead of the histogram.
    #[arg(long)]
    pub ecdf: bool,
    #[arg(long)]
    pub series_terms: Option<String>,
    #[arg(long)]
    pub series_tol: Option<String>,
    #[arg(long)]
    pub quad_max_intervals: Option<String>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

impl Options {
    /// Flags that were given, as raw config entries.
    pub fn raw(&self) -> RawConfig {
        let text = [
            ("model", &self.model),
            ("radius", &self.radius),
            ("diffusion", &self.diffusion),
            ("time", &self.time),
            ("molecules", &self.molecules),
            ("velocity", &self.velocity),
            ("threshold", &self.threshold),
            ("target", &self.target),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("bins", &self.bins),
            ("sweep", &self.sweep),
            ("y_min", &self.y_min),
            ("y_max", &self.y_max),
            ("points", &self.points),
            ("series_terms", &self.series_terms),
            ("series_tol", &self.series_tol),
            ("quad_max_intervals", &self.quad_max_intervals),
            ("format", &self.format),
        ];
        let mut raw: RawConfig = text
            .into_iter()
            .filter_map(|(k, v)| {
                v.as_ref()
                    .map(|v| (k.to_string(), Value::String(v.clone())))
            })
            .collect();
        if self.ecdf {
            raw.insert("ecdf".into(), Value::Boolean(true));
        }
        raw
    }
}
