#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod ingest;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use bglfrps::bglfrps::GridSpec;
use bglfrps::fitting::EmControls;

use commands::{CliError, CliResult, FitArgs};
use ingest::{DataSource, DatasetSpec};

/// Fit, simulate and evaluate bivariate GLFR power-series models.
#[derive(Parser, Debug)]
#[command(name = "bglfrps", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a model by EM and report estimates, criteria and K-S tests.
    Fit(FitCmd),
    /// Draw pairs from a model and write them as CSV.
    Simulate(SimulateCmd),
    /// Evaluate cdf, density and E(N | y) at one point.
    Eval(EvalCmd),
    /// Write the density on a lattice plus its diagonal part.
    Grid(GridCmd),
    /// Fit the six reference models to the embedded data and compare.
    Reproduce(ReproduceCmd),
}

#[derive(Args, Debug)]
struct EmFlags {
    /// Maximum EM iterations.
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    /// Relative log-likelihood change that stops EM.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

impl EmFlags {
    fn controls(&self) -> CliResult<EmControls> {
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(CliError::Usage(
                "--tol must be > 0 and --max-iter >= 1".into(),
            ));
        }
        Ok(EmControls {
            max_iter: self.max_iter,
            tol: self.tol,
            ..EmControls::default()
        })
    }
}

#[derive(Args, Debug)]
struct FitCmd {
    /// `embedded` or a CSV path with two columns.
    #[arg(long, default_value = "embedded")]
    data: DataSource,
    /// Multiplier applied to every value.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// geometric | poisson | logarithmic | binomial:k | negbinomial:k | poly:a1,a2,...
    #[arg(long, default_value = "geometric")]
    family: String,
    /// Pairs closer than this count as ties.
    #[arg(long)]
    tie_tol: Option<f64>,
    /// Starting values a1,a2,a3,beta,gamma,theta.
    #[arg(long)]
    init: Option<String>,
    #[command(flatten)]
    em: EmFlags,
    /// Emit JSON instead of key: value text.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ModelFlags {
    /// a1,a2,a3,beta,gamma,theta
    #[arg(long, allow_hyphen_values = true)]
    params: String,
    #[arg(long, default_value = "geometric")]
    family: String,
}

#[derive(Args, Debug)]
struct SimulateCmd {
    #[command(flatten)]
    model: ModelFlags,
    #[arg(long, short)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalCmd {
    #[command(flatten)]
    model: ModelFlags,
    #[arg(allow_hyphen_values = true)]
    y1: f64,
    #[arg(allow_hyphen_values = true)]
    y2: f64,
}

#[derive(Args, Debug)]
struct GridCmd {
    /// fig1a | fig1b | fig1c | fig1d
    #[arg(long, conflicts_with_all = ["params", "family"])]
    preset: Option<String>,
    #[arg(long, required_unless_present = "preset")]
    params: Option<String>,
    #[arg(long)]
    family: Option<String>,
    /// `lo:hi:n` for both axes, or `lo:hi:n,lo:hi:n`.
    #[arg(long, default_value = "0:2:100")]
    grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReproduceCmd {
    #[command(flatten)]
    em: EmFlags,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Fit(c) => commands::fit(FitArgs {
            dataset: DatasetSpec {
                source: c.data,
                scale: c.scale,
            },
            family: commands::parse_family(&c.family)?,
            controls: c.em.controls()?,
            tie_tol: c.tie_tol,
            init: c.init.as_deref(),
            json: c.json,
            out: c.out.as_deref(),
        }),
        Command::Simulate(c) => {
            let params =
                commands::parse_params(&c.model.params, commands::parse_family(&c.model.family)?)?;
            commands::simulate(&params, c.n, c.seed, c.out.as_deref())
        }
        Command::Eval(c) => {
            let params =
                commands::parse_params(&c.model.params, commands::parse_family(&c.model.family)?)?;
            commands::eval(&params, c.y1, c.y2)
        }
        Command::Grid(c) => {
            let params = match (&c.preset, &c.params) {
                (Some(name), _) => commands::figure_preset(name)?,
                (None, Some(p)) => {
                    let family =
                        commands::parse_family(c.family.as_deref().unwrap_or("geometric"))?;
                    commands::parse_params(p, family)?
                }
                (None, None) => {
                    return Err(CliError::Usage("grid needs --preset or --params".into()))
                }
            };
            let spec: GridSpec = c
                .grid
                .parse()
                .map_err(|e: bglfrps::Error| CliError::Usage(e.to_string()))?;
            commands::grid(&params, &spec, c.out.as_deref())
        }
        Command::Reproduce(c) => commands::reproduce(c.em.controls()?, c.json, c.out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
