use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bglfrps::bglfrps::{BglfrpsParams, GridSpec};
use bglfrps::data::{football, REFERENCE_FITS};
use bglfrps::fitting::{em_fit, EmControls, FitReport};
use bglfrps::gof::GofReport;
use bglfrps::powerseries::PowerSeriesFamily;

use crate::ingest::DatasetSpec;
use crate::report::{reproduce_text, FitOutput, ReproRow};

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    NotConverged(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Data(_) => 2,
            Self::NotConverged(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Usage(m) | Self::Data(m) | Self::NotConverged(m) => m,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn parse_family(spec: &str) -> CliResult<PowerSeriesFamily> {
    spec.parse()
        .map_err(|e: bglfrps::Error| CliError::Usage(e.to_string()))
}

/// `a1,a2,a3,beta,gamma,theta`.
pub fn parse_params(spec: &str, family: PowerSeriesFamily) -> CliResult<BglfrpsParams> {
    let values: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("--params `{spec}`: {e}")))?;
    let v: [f64; 6] = values.try_into().map_err(|v: Vec<f64>| {
        CliError::Usage(format!(
            "--params needs 6 values a1,a2,a3,beta,gamma,theta; got {}",
            v.len()
        ))
    })?;
    BglfrpsParams::from_vec(v, family).map_err(|e| CliError::Usage(e.to_string()))
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub struct FitArgs<'a> {
    pub dataset: DatasetSpec,
    pub family: PowerSeriesFamily,
    pub controls: EmControls,
    pub tie_tol: Option<f64>,
    pub init: Option<&'a str>,
    pub json: bool,
    pub out: Option<&'a Path>,
}

pub fn fit(args: FitArgs<'_>) -> CliResult<()> {
    let sample = args.dataset.load(args.tie_tol).map_err(CliError::Data)?;
    let init = args
        .init
        .map(|s| parse_params(s, args.family.clone()))
        .transpose()?;
    let report = em_fit(&sample, &args.family, init.as_ref(), args.controls)
        .map_err(|e| CliError::Data(e.to_string()))?;
    let gof = GofReport::from_fit(&report, &sample).map_err(|e| CliError::Data(e.to_string()))?;
    let output = FitOutput {
        data: args.dataset.source.to_string(),
        scale: args.dataset.scale,
        fit: &report,
        gof: &gof,
    };
    let text = if args.json {
        serde_json::to_string_pretty(&output).expect("report serializes") + "\n"
    } else {
        output.to_text()
    };
    emit(&text, args.out)?;
    if report.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged(format!(
            "EM stopped after {} iterations without meeting the tolerance",
            report.iterations
        )))
    }
}

/// CSV of `n` pairs with a `y1,y2` header. Values use the shortest
/// round-tripping decimal form, so ties survive re-ingestion.
pub fn simulate(params: &BglfrpsParams, n: usize, seed: u64, out: Option<&Path>) -> CliResult<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::from("y1,y2\n");
    for _ in 0..n {
        let (a, b) = params.sample(&mut rng);
        let _ = writeln!(text, "{a},{b}");
    }
    emit(&text, out)
}

pub fn eval(params: &BglfrpsParams, y1: f64, y2: f64) -> CliResult<()> {
    let cdf = params
        .joint_cdf(y1, y2)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut text = String::new();
    let _ = writeln!(text, "y1: {y1}\ny2: {y2}\ncdf: {cdf}");
    match params.joint_ln_pdf(y1, y2) {
        Ok((region, ln_f)) => {
            let _ = writeln!(
                text,
                "region: {region}\npdf: {}\nlog_pdf: {ln_f}",
                ln_f.exp()
            );
        }
        Err(_) => {
            let region = bglfrps::bglfrps::Region::of(y1, y2);
            let _ = writeln!(text, "region: {region}\npdf: 0\nlog_pdf: -inf");
        }
    }
    match params.conditional_n_mean(y1, y2) {
        Ok(m) => {
            let _ = writeln!(text, "conditional_mean_n: {m}");
        }
        Err(_) => text.push_str("conditional_mean_n: undefined\n"),
    }
    emit(&text, None)
}

/// The four parameter sets with `C(θ) = θ + θ^20` and `β = γ = 1`.
pub fn figure_preset(name: &str) -> CliResult<BglfrpsParams> {
    let (a12, a3, theta) = match name {
        "fig1a" => (1.0, 1.0, 1.0),
        "fig1b" => (1.0, 1.0, 2.0),
        "fig1c" => (1.0, 1.0, 0.5),
        "fig1d" => (0.5, 1.0, 1.0),
        other => {
            return Err(CliError::Usage(format!(
                "unknown preset `{other}` (expected fig1a, fig1b, fig1c or fig1d)"
            )))
        }
    };
    let mut coefficients = vec![0.0; 20];
    coefficients[0] = 1.0;
    coefficients[19] = 1.0;
    let family = PowerSeriesFamily::polynomial(coefficients).expect("valid polynomial");
    BglfrpsParams::from_vec([a12, a12, a3, 1.0, 1.0, theta], family)
        .map_err(|e| CliError::Usage(e.to_string()))
}

pub fn grid(params: &BglfrpsParams, spec: &GridSpec, out: Option<&Path>) -> CliResult<()> {
    let g = params
        .density_grid(spec)
        .map_err(|e| CliError::Data(e.to_string()))?;
    emit(&g.to_tsv(), out)
}

/// Fits the six reference models concurrently and prints them against the
/// reference values.
pub fn reproduce(controls: EmControls, json: bool, out: Option<&Path>) -> CliResult<()> {
    let sample = football(0.01);
    let results: Vec<Result<(FitReport, GofReport), String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = REFERENCE_FITS
            .iter()
            .map(|r| {
                let sample = &sample;
                scope.spawn(move || {
                    let fit =
                        em_fit(sample, &r.family(), None, controls).map_err(|e| e.to_string())?;
                    let gof = GofReport::from_fit(&fit, sample).map_err(|e| e.to_string())?;
                    Ok((fit, gof))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err("fit thread panicked".into()))
            })
            .collect()
    });
    let mut fitted = Vec::with_capacity(results.len());
    for (r, res) in REFERENCE_FITS.iter().zip(results) {
        fitted.push(res.map_err(|e| CliError::Data(format!("{}: {e}", r.label)))?);
    }
    let rows: Vec<ReproRow<'_>> = REFERENCE_FITS
        .iter()
        .zip(&fitted)
        .map(|(r, (fit, gof))| ReproRow {
            label: r.label,
            fit,
            gof,
            reference: r,
            reference_loglik: r.loglik,
            reference_lrt: r.lrt,
        })
        .collect();
    let text = if json {
        serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n"
    } else {
        reproduce_text(&rows, sample.counts())
    };
    emit(&text, out)?;
    match fitted
        .iter()
        .zip(REFERENCE_FITS.iter())
        .find(|((f, _), _)| !f.converged)
    {
        Some((_, r)) => Err(CliError::NotConverged(format!(
            "{} did not converge",
            r.label
        ))),
        None => Ok(()),
    }
}
