//! Information criteria, Kolmogorov–Smirnov tests and the likelihood-ratio
//! statistic.

use serde::Serialize;
use statrs::function::gamma::gamma_ur;

use crate::bglfr::Margin;
use crate::error::{Error, Result};
use crate::fitting::{BivariateSample, FitReport};

/// `(AIC, AICC, BIC)` for a log-likelihood with `k` free parameters and `n` observations.
pub fn information_criteria(loglik: f64, k: usize, n: usize) -> Result<(f64, f64, f64)> {
    if k == 0 && n == 0 {
        return Ok((-2.0 * loglik, -2.0 * loglik, -2.0 * loglik));
    }
    if n <= k + 1 {
        return Err(Error::Domain(format!(
            "AICC undefined for n = {n}, k = {k}"
        )));
    }
    let (kf, nf) = (k as f64, n as f64);
    let aic = -2.0 * loglik + 2.0 * kf;
    let aicc = aic + 2.0 * kf * (kf + 1.0) / (nf - kf - 1.0);
    let bic = -2.0 * loglik + kf * nf.ln();
    Ok((aic, aicc, bic))
}

/// Asymptotic Kolmogorov tail `P(K > λ)`.
fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut s = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        s += if j % 2 == 1 { term } else { -term };
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample K-S distance and asymptotic p-value.
pub fn ks_test<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> Result<(f64, f64)> {
    if data.is_empty() {
        return Err(Error::DegenerateData("K-S test on empty sample".into()));
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let i = i as f64;
        d = d.max((i + 1.0) / n - f).max(f - i / n);
    }
    Ok((d, kolmogorov_tail(n.sqrt() * d)))
}

/// Likelihood-ratio statistic and chi-square upper tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LrtResult {
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
    /// Set when the alternative fits worse than the null.
    pub nesting_violation: bool,
}

pub fn lrt(loglik_null: f64, loglik_alt: f64, df: u32) -> Result<LrtResult> {
    if df == 0 {
        return Err(Error::InvalidParameter("LRT needs df >= 1".into()));
    }
    let statistic = 2.0 * (loglik_alt - loglik_null);
    if !statistic.is_finite() {
        return Err(Error::Domain(format!("LRT statistic {statistic}")));
    }
    let p_value = if statistic <= 0.0 {
        1.0
    } else {
        gamma_ur(df as f64 / 2.0, statistic / 2.0).clamp(0.0, 1.0)
    };
    Ok(LrtResult {
        statistic,
        df,
        p_value,
        nesting_violation: statistic < 0.0,
    })
}

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn eval(&self, x: f64) -> f64 {
        if self.sorted.is_empty() {
            return 0.0;
        }
        let count = self.sorted.partition_point(|&v| v <= x);
        count as f64 / self.sorted.len() as f64
    }
}

pub fn empirical_cdf(data: &[f64]) -> EmpiricalCdf {
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    EmpiricalCdf { sorted }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofReport {
    pub k: usize,
    pub n: usize,
    pub aic: f64,
    pub aicc: f64,
    pub bic: f64,
    /// Y1, Y2 and max(Y1, Y2), in that order.
    pub ks: [KsResult; 3],
    pub lrt: Option<LrtResult>,
}

impl GofReport {
    /// Criteria and marginal K-S tests for a fitted model on the sample it was fitted to.
    pub fn from_fit(fit: &FitReport, sample: &BivariateSample) -> Result<Self> {
        let k = fit.parameter_count();
        let n = sample.len();
        let (aic, aicc, bic) = information_criteria(fit.loglik, k, n)?;
        let columns = [
            (Margin::Y1, sample.first()),
            (Margin::Y2, sample.second()),
            (Margin::Max, sample.maxima()),
        ];
        let mut ks = [KsResult {
            statistic: f64::NAN,
            p_value: f64::NAN,
        }; 3];
        for (slot, (margin, data)) in ks.iter_mut().zip(columns) {
            let law = fit.mle.marginal(margin);
            let (statistic, p_value) = ks_test(&data, |x| law.cdf(x).unwrap_or(f64::NAN))?;
            *slot = KsResult { statistic, p_value };
        }
        Ok(Self {
            k,
            n,
            aic,
            aicc,
            bic,
            ks,
            lrt: None,
        })
    }
}
