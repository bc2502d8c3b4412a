//! Acceptance checks. Runs as a plain binary (`harness = false`) so every
//! criterion prints exactly one PASS/FAIL line, and exits non-zero if any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bglfrps::bglfr::{BglfrParams, Margin};
use bglfrps::bglfrps::BglfrpsParams;
use bglfrps::data::{football, REFERENCE_FITS};
use bglfrps::fitting::{
    e_step, em_fit, m_step_alphas, pseudo_loglik, BivariateSample, EmControls, FitReport,
    PseudoContext, TieWeights,
};
use bglfrps::glfr::LinearHazard;
use bglfrps::gof::{information_criteria, ks_test, GofReport};
use bglfrps::powerseries::{PowerSeriesFamily, Theta};
use bglfrps::quadrature::QuadControls;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn five_families() -> Vec<(PowerSeriesFamily, f64)> {
    vec![
        (PowerSeriesFamily::Geometric, 0.6128),
        (PowerSeriesFamily::Poisson, 1.9930),
        (PowerSeriesFamily::Logarithmic, 0.8053),
        (PowerSeriesFamily::binomial(10).unwrap(), 0.2326),
        (PowerSeriesFamily::negative_binomial(2).unwrap(), 0.7186),
    ]
}

fn loglik_reproduction(fits: &[(FitReport, Duration)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (r, (fit, elapsed)) in REFERENCE_FITS.iter().zip(fits) {
        let ok = (fit.loglik - r.loglik).abs() <= 0.10 && elapsed.as_secs_f64() < 60.0;
        pass &= ok;
        parts.push(format!(
            "{} {:.4} (ref {:.4}, {:.2}s)",
            r.label,
            fit.loglik,
            r.loglik,
            elapsed.as_secs_f64()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criteria_arithmetic() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for r in REFERENCE_FITS {
        let (aic, aicc, bic) = information_criteria(r.loglik, r.parameter_count(), 42).unwrap();
        worst = worst
            .max((aic - r.aic).abs())
            .max((aicc - r.aicc).abs())
            .max((bic - r.bic).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-3 && secs < 1.0,
        format!("18 values, max |delta| = {worst:.2e}"),
    )
}

fn ks_reproduction(fits: &[(FitReport, Duration)], sample: &BivariateSample) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for idx in [0, 1] {
        let r = &REFERENCE_FITS[idx];
        let gof = GofReport::from_fit(&fits[idx].0, sample).unwrap();
        for (k, name) in ["Y1", "Y2", "max"].iter().enumerate() {
            let (d_ref, p_ref) = r.ks[k];
            let got = gof.ks[k];
            let ok = (got.statistic - d_ref).abs() <= 0.02 && (got.p_value - p_ref).abs() <= 0.05;
            pass &= ok;
            parts.push(format!(
                "{} {name} D={:.4} p={:.4} (ref {d_ref:.4}, {p_ref:.4})",
                r.label, got.statistic, got.p_value
            ));
        }
    }
    outcome(pass, parts.join("; "))
}

fn partition_counts(sample: &BivariateSample) -> Outcome {
    let counts = sample.counts();
    outcome(counts == (24, 16, 2), format!("(m0, m1, m2) = {counts:?}"))
}

fn normalization(fits: &[(FitReport, Duration)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (r, (fit, _)) in REFERENCE_FITS.iter().zip(fits) {
        let start = Instant::now();
        let mass = fit.mle.total_mass(QuadControls::default()).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let ok = (mass.total - 1.0).abs() <= 1e-4 && secs < 30.0;
        pass &= ok;
        parts.push(format!("{} {:.8} ({secs:.2}s)", r.label, mass.total));
    }
    outcome(pass, parts.join("; "))
}

fn e_step_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let base = BglfrParams::new(0.0605, 0.4197, 0.7471, 12.0961, 2e-4).unwrap();
    let mut worst: f64 = 0.0;
    for (family, theta) in five_families() {
        let p = BglfrpsParams::new(base, family.clone(), theta).unwrap();
        let cap = family.max_degree().unwrap_or(100_000);
        for i in 0..50 {
            let y1 = rng.random_range(0.005..0.5);
            let y2 = if i % 5 == 0 {
                y1
            } else {
                rng.random_range(0.005..0.5)
            };
            let mut series = 0.0;
            let mut prev = f64::INFINITY;
            for n in 1..=cap {
                let q = p.conditional_n_pmf(y1, y2, n).unwrap();
                series += n as f64 * q;
                if n > family.min_degree() && q < 1e-17 && q <= prev {
                    break;
                }
                prev = q;
            }
            let closed = p.conditional_n_mean(y1, y2).unwrap();
            worst = worst.max((closed - series).abs());
        }
    }
    outcome(
        worst <= 1e-8,
        format!("250 points, max |delta| = {worst:.2e}"),
    )
}

fn m_step_stationarity() -> Outcome {
    let mut worst: f64 = 0.0;
    let family = PowerSeriesFamily::Poisson;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let base = BglfrParams::new(
            rng.random_range(0.1..2.0),
            rng.random_range(0.1..2.0),
            rng.random_range(0.1..2.0),
            rng.random_range(0.5..5.0),
            rng.random_range(0.0..2.0),
        )
        .unwrap();
        let theta = rng.random_range(0.2..3.0);
        let p = BglfrpsParams::new(base, family.clone(), theta).unwrap();
        let pairs: Vec<_> = (0..80).map(|_| p.sample(&mut rng)).collect();
        let sample = BivariateSample::new(pairs).unwrap();
        let b = e_step(&p, &sample).unwrap();
        let weights = TieWeights::from_base(&base);
        let hazard =
            LinearHazard::new(rng.random_range(0.5..5.0), rng.random_range(0.0..2.0)).unwrap();
        let ctx = PseudoContext {
            sample: &sample,
            b: &b,
            weights,
            family: &family,
            theta: Theta::new(theta, &family).unwrap(),
        };
        let est = m_step_alphas(&sample, &b, weights, &hazard).unwrap();
        for i in 0..3 {
            let h = 1e-5 * est.alphas[i];
            let (mut up, mut down) = (est.alphas, est.alphas);
            up[i] += h;
            down[i] -= h;
            let fd =
                (pseudo_loglik(&ctx, up, &hazard) - pseudo_loglik(&ctx, down, &hazard)) / (2.0 * h);
            worst = worst.max(fd.abs() / est.denominators[i].abs());
        }
    }
    outcome(
        worst <= 1e-5,
        format!("20 configurations, max relative partial = {worst:.2e}"),
    )
}

fn sampler_agreement() -> Outcome {
    let base = BglfrParams::new(0.06, 0.42, 0.75, 12.0, 2e-4).unwrap();
    let p = BglfrpsParams::new(base, PowerSeriesFamily::Geometric, 0.61).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 100_000;
    let draws: Vec<(f64, f64)> = (0..n).map(|_| p.sample(&mut rng)).collect();
    let ties = draws.iter().filter(|(a, b)| a == b).count() as f64;
    let w = base.alpha3 / base.alpha_sum();
    let sigma = (w * (1.0 - w) / n as f64).sqrt();
    let z = (ties / n as f64 - w) / sigma;
    let mut pass = z.abs() <= 3.0;
    let mut parts = vec![format!("tie z = {z:.2}")];
    let columns: [(Margin, Vec<f64>); 3] = [
        (Margin::Y1, draws.iter().map(|d| d.0).collect()),
        (Margin::Y2, draws.iter().map(|d| d.1).collect()),
        (Margin::Max, draws.iter().map(|d| d.0.max(d.1)).collect()),
    ];
    for (margin, data) in columns {
        let law = p.marginal(margin);
        let (d, _) = ks_test(&data, |x| law.cdf(x).unwrap()).unwrap();
        pass &= d < 0.02;
        parts.push(format!("{margin:?} D = {d:.4}"));
    }
    outcome(pass, parts.join("; "))
}

fn limit_law() -> Outcome {
    let base = BglfrParams::new(0.0605, 0.4197, 0.7471, 12.0961, 2e-4).unwrap();
    let mut worst: f64 = 0.0;
    for family in [
        PowerSeriesFamily::Geometric,
        PowerSeriesFamily::negative_binomial(2).unwrap(),
    ] {
        let p = BglfrpsParams::new(base, family, 1e-7).unwrap();
        let limit = p.limit_theta_zero_reference();
        for i in 1..=5 {
            for j in 1..=5 {
                let (y1, y2) = (i as f64 * 0.06, j as f64 * 0.06);
                let d = (p.joint_cdf(y1, y2).unwrap() - limit.cdf(y1, y2).unwrap()).abs();
                worst = worst.max(d);
            }
        }
    }
    outcome(worst <= 1e-5, format!("max |delta| = {worst:.2e}"))
}

fn simulation_recovery() -> Outcome {
    let start = Instant::now();
    let base = BglfrParams::new(0.06, 0.4, 0.7, 11.5, 2e-4).unwrap();
    let truth = BglfrpsParams::new(base, PowerSeriesFamily::Poisson, 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2000);
    let pairs: Vec<_> = (0..2000).map(|_| truth.sample(&mut rng)).collect();
    let sample = BivariateSample::new(pairs).unwrap();
    let fit = em_fit(
        &sample,
        &PowerSeriesFamily::Poisson,
        None,
        EmControls::default(),
    )
    .unwrap();
    let secs = start.elapsed().as_secs_f64();
    let est = fit.mle.base;
    let weight = est.alpha3 / est.alpha_sum();
    let true_weight = 0.7 / 1.16;
    let beta_rel = (est.hazard.beta - 11.5).abs() / 11.5;
    let pass = (weight - true_weight).abs() <= 0.05 && beta_rel <= 0.15 && secs < 300.0;
    outcome(
        pass,
        format!(
            "weight {weight:.4} (true {true_weight:.4}), beta {:.3} ({:.1}% off), {} iterations, {secs:.1}s",
            est.hazard.beta,
            100.0 * beta_rel,
            fit.iterations
        ),
    )
}

fn main() {
    let sample = football(0.01);
    let fits: Vec<(FitReport, Duration)> = REFERENCE_FITS
        .iter()
        .map(|r| {
            let start = Instant::now();
            let fit = em_fit(&sample, &r.family(), None, EmControls::default())
                .expect("football fit runs");
            (fit, start.elapsed())
        })
        .collect();

    let results = [
        ("1 log-likelihood reproduction", loglik_reproduction(&fits)),
        ("2 information criteria", criteria_arithmetic()),
        ("3 K-S reproduction", ks_reproduction(&fits, &sample)),
        ("4 partition counts", partition_counts(&sample)),
        ("5 normalization", normalization(&fits)),
        ("6 E-step oracle", e_step_oracle()),
        ("7 M-step stationarity", m_step_stationarity()),
        ("8 sampler agreement", sampler_agreement()),
        ("9 limit law", limit_law()),
        ("10 simulation recovery", simulation_recovery()),
    ];

    let mut failed = 0;
    for (name, o) in &results {
        println!(
            "{} criterion {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
