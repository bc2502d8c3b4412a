use serde::Serialize;

use super::{observed_loglik, BivariateSample};
use crate::bglfr::{BglfrParams, Margin};
use crate::bglfrps::BglfrpsParams;
use crate::error::{Error, Result};
use crate::glfr::LinearHazard;
use crate::glfrps::GlfrpsParams;
use crate::optim::{nelder_mead_2d, NelderMeadControls};
use crate::powerseries::{PowerSeriesFamily, Theta, ThetaClamp, ThetaSolution};

const ALPHA_MIN: f64 = 1e-8;
const ALPHA_MAX: f64 = 1e4;
const BETA_MIN: f64 = 1e-8;
const BETA_MAX: f64 = 1e6;
const GAMMA_MAX: f64 = 1e8;
/// Smallest γ the inner search represents; anything that settles below it is
/// reported as the boundary value 0.
const GAMMA_FLOOR: f64 = 1e-10;

/// Conditional probabilities of which latent component produced the smaller
/// coordinate: `u1 = α1/(α1+α3)` for `y1 < y2` and `v1 = α2/(α2+α3)` for `y1 > y2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TieWeights {
    pub u1: f64,
    pub u2: f64,
    pub v1: f64,
    pub v2: f64,
}

impl TieWeights {
    pub fn from_base(base: &BglfrParams) -> Self {
        let u1 = base.alpha1 / (base.alpha1 + base.alpha3);
        let v1 = base.alpha2 / (base.alpha2 + base.alpha3);
        Self {
            u1,
            u2: 1.0 - u1,
            v1,
            v2: 1.0 - v1,
        }
    }
}

/// `b_i = E(N | y_1i, y_2i)` for every observation.
pub fn e_step(params: &BglfrpsParams, sample: &BivariateSample) -> Result<Vec<f64>> {
    sample
        .pairs()
        .iter()
        .map(|&(a, b)| params.conditional_n_mean(a, b))
        .collect()
}

/// Closed-form shape updates for fixed `(β, γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaEstimate {
    pub alphas: [f64; 3],
    /// Shapes pinned to the lower or upper bound.
    pub clamped: [bool; 3],
    /// Expected counts attributed to each latent component.
    pub numerators: [f64; 3],
    /// Weighted sums `Σ b_i Q(y)`; strictly negative.
    pub denominators: [f64; 3],
}

/// Everything the pseudo log-likelihood holds fixed during the M-step.
#[derive(Debug, Clone, Copy)]
pub struct PseudoContext<'a> {
    pub sample: &'a BivariateSample,
    pub b: &'a [f64],
    pub weights: TieWeights,
    pub family: &'a PowerSeriesFamily,
    pub theta: Theta,
}

/// Maximizers of the pseudo log-likelihood over `(α1, α2, α3)` at fixed `(β, γ)`,
/// with `Q(y) = log(1 - exp(-βy - γy²/2))`.
pub fn m_step_alphas(
    sample: &BivariateSample,
    b: &[f64],
    weights: TieWeights,
    hazard: &LinearHazard,
) -> Result<AlphaEstimate> {
    if b.len() != sample.len() {
        return Err(Error::InvalidParameter(format!(
            "{} weights for {} observations",
            b.len(),
            sample.len()
        )));
    }
    let (m0, m1, m2) = sample.counts();
    let (m0, m1, m2) = (m0 as f64, m1 as f64, m2 as f64);
    let q = |y: f64| hazard.ln_base_cdf(y);
    let pairs = sample.pairs();

    let tie_sum: f64 = sample.ties().iter().map(|&i| b[i] * q(pairs[i].0)).sum();
    let (mut lower_first, mut lower_second) = (0.0, 0.0);
    for &i in sample.lower() {
        lower_first += b[i] * q(pairs[i].0);
        lower_second += b[i] * q(pairs[i].1);
    }
    let (mut upper_first, mut upper_second) = (0.0, 0.0);
    for &i in sample.upper() {
        upper_first += b[i] * q(pairs[i].0);
        upper_second += b[i] * q(pairs[i].1);
    }

    let numerators = [
        m1 * weights.u1 + m2,
        m1 + m2 * weights.v1,
        m0 + m1 * weights.u2 + m2 * weights.v2,
    ];
    let denominators = [
        tie_sum + lower_first + upper_first,
        tie_sum + lower_second + upper_second,
        tie_sum + lower_first + upper_second,
    ];
    let mut alphas = [0.0; 3];
    let mut clamped = [false; 3];
    for i in 0..3 {
        let d = denominators[i];
        if !(d < 0.0) || !d.is_finite() {
            return Err(Error::DegenerateData(format!(
                "shape update {} has denominator {d}",
                i + 1
            )));
        }
        let a = -numerators[i] / d;
        alphas[i] = a.clamp(ALPHA_MIN, ALPHA_MAX);
        clamped[i] = alphas[i] != a;
    }
    Ok(AlphaEstimate {
        alphas,
        clamped,
        numerators,
        denominators,
    })
}

/// The complete-data log-likelihood with `N` replaced by `b_i` and the latent
/// component indicators by their conditional probabilities, up to an additive
/// constant.
pub fn pseudo_loglik(ctx: &PseudoContext<'_>, alphas: [f64; 3], hazard: &LinearHazard) -> f64 {
    let sample = ctx.sample;
    let pairs = sample.pairs();
    let b = ctx.b;
    let (m0, m1, m2) = sample.counts();
    let (m0f, m1f, m2f) = (m0 as f64, m1 as f64, m2 as f64);
    let w = ctx.weights;

    let c_theta = match ctx.family.c_derivatives(ctx.theta) {
        Ok(d) => d.c,
        Err(_) => return f64::NEG_INFINITY,
    };
    let b_sum: f64 = b.iter().sum();
    let mut total = ctx.theta.value().ln() * b_sum - sample.len() as f64 * c_theta.ln();

    let numerators = [
        m1f * w.u1 + m2f,
        m1f + m2f * w.v1,
        m0f + m1f * w.u2 + m2f * w.v2,
    ];
    for i in 0..3 {
        if numerators[i] > 0.0 {
            total += numerators[i] * alphas[i].ln();
        }
    }

    // Per-coordinate pieces: log hazard rate, cumulative hazard, and Q.
    let mut piece = |y: f64| -> (f64, f64) {
        let rate = hazard.rate(y);
        let q = hazard.ln_base_cdf(y);
        total += rate.ln() - hazard.cumulative(y) - q;
        (q, rate)
    };
    let mut lin = [0.0; 3];
    let mut bad_rate = false;
    for &i in sample.ties() {
        let (q, r) = piece(pairs[i].0);
        bad_rate |= r <= 0.0;
        let bq = b[i] * q;
        lin[0] += bq;
        lin[1] += bq;
        lin[2] += bq;
    }
    for &i in sample.lower() {
        let (q1, r1) = piece(pairs[i].0);
        let (q2, r2) = piece(pairs[i].1);
        bad_rate |= r1 <= 0.0 || r2 <= 0.0;
        lin[0] += b[i] * q1;
        lin[1] += b[i] * q2;
        lin[2] += b[i] * q1;
    }
    for &i in sample.upper() {
        let (q1, r1) = piece(pairs[i].0);
        let (q2, r2) = piece(pairs[i].1);
        bad_rate |= r1 <= 0.0 || r2 <= 0.0;
        lin[0] += b[i] * q1;
        lin[1] += b[i] * q2;
        lin[2] += b[i] * q2;
    }
    if bad_rate {
        return f64::NEG_INFINITY;
    }
    total + alphas[0] * lin[0] + alphas[1] * lin[1] + alphas[2] * lin[2]
}

/// Pseudo log-likelihood with the shapes profiled out through [`m_step_alphas`].
pub fn pseudo_profile_objective(beta: f64, gamma: f64, ctx: &PseudoContext<'_>) -> f64 {
    let Ok(hazard) = LinearHazard::new(beta, gamma) else {
        return f64::NEG_INFINITY;
    };
    match m_step_alphas(ctx.sample, ctx.b, ctx.weights, &hazard) {
        Ok(est) => pseudo_loglik(ctx, est.alphas, &hazard),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Solves `θ C'(θ) / C(θ) = b̄`.
pub fn m_step_theta(family: &PowerSeriesFamily, b_bar: f64) -> Result<ThetaSolution> {
    family.solve_theta_for_mean(b_bar)
}

/// Stopping rule and inner-search settings for [`em_fit`].
#[derive(Debug, Clone, Copy)]
pub struct EmControls {
    pub max_iter: usize,
    /// Stop when `|Δℓ| / (|ℓ| + 1)` falls below this.
    pub tol: f64,
    /// Inner simplex search on `(ln β, ln γ)`.
    pub inner: NelderMeadControls,
}

impl Default for EmControls {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            tol: 1e-6,
            inner: NelderMeadControls {
                step: [0.1, 1.0],
                ftol: 1e-12,
                xtol: 1e-8,
                max_iter: 500,
            },
        }
    }
}

/// Outcome of [`em_fit`]. `mle` is the iterate with the highest observed
/// log-likelihood, which need not be the last one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub family: String,
    pub mle: BglfrpsParams,
    pub loglik: f64,
    pub iterations: usize,
    pub best_iteration: usize,
    pub converged: bool,
    /// Observed log-likelihood at the starting point followed by one entry per iteration.
    pub loglik_trace: Vec<f64>,
    pub m0: usize,
    pub m1: usize,
    pub m2: usize,
    /// Bounds active at the reported estimate.
    pub active_clamps: Vec<String>,
}

impl FitReport {
    /// Free parameters: five for the identity family, six otherwise.
    pub fn parameter_count(&self) -> usize {
        if self.mle.family.is_degenerate() {
            5
        } else {
            6
        }
    }
}

/// Scale-aware starting point.
///
/// `β = 1/ȳ` over all coordinates and `γ = 1e-4`; the total shape of the
/// maximum is chosen by a coarse likelihood grid and split across the three
/// components in proportion to the tie and non-tie counts; θ starts at the
/// midpoint of `(0, min(s, 2))`.
pub fn initial_guess(
    sample: &BivariateSample,
    family: &PowerSeriesFamily,
) -> Result<BglfrpsParams> {
    let m = sample.len();
    if m == 0 {
        return Err(Error::DegenerateData("empty sample".into()));
    }
    let grand_mean = sample.pairs().iter().map(|p| p.0 + p.1).sum::<f64>() / (2 * m) as f64;
    let beta = (1.0 / grand_mean).clamp(BETA_MIN, BETA_MAX);
    let gamma = 1e-4;
    let theta = 0.5 * family.support_bound().min(2.0);
    let hazard = LinearHazard::new(beta, gamma)?;

    let maxima = sample.maxima();
    let probe = GlfrpsParams::new(
        crate::glfr::GlfrParams::with_hazard(1.0, hazard)?,
        family.clone(),
        theta,
    )?;
    let mut best = (f64::NEG_INFINITY, 1.0);
    for j in -30..=30 {
        let alpha = 1.2f64.powi(j);
        let ll = probe.with_alpha(alpha)?.loglik(&maxima);
        if ll > best.0 {
            best = (ll, alpha);
        }
    }
    let total = best.1;
    let (m0, m1, m2) = sample.counts();
    let off = (m1 + m2) as f64 / (2 * m) as f64;
    let a12 = (total * off).max(1e-3);
    let a3 = (total * m0 as f64 / m as f64).max(1e-3);
    let base = BglfrParams::with_hazard(a12, a12, a3, hazard)?;
    BglfrpsParams::new(base, family.clone(), theta)
}

struct Iterate {
    params: BglfrpsParams,
    loglik: f64,
    clamps: Vec<String>,
}

/// Fits the model by EM.
///
/// Each iteration computes `b_i = E(N | y_i)` and the tie weights at the
/// current parameters, maximizes the profiled pseudo log-likelihood over
/// `(β, γ)` with a simplex search on log scale, recovers the shapes in closed
/// form, and solves the mean equation for θ. Iteration stops when the relative
/// change of the observed log-likelihood drops below `controls.tol`.
pub fn em_fit(
    sample: &BivariateSample,
    family: &PowerSeriesFamily,
    init: Option<&BglfrpsParams>,
    controls: EmControls,
) -> Result<FitReport> {
    let (m0, m1, m2) = sample.counts();
    if sample.len() < 6 {
        return Err(Error::DegenerateData(format!(
            "need at least 6 observations, got {}",
            sample.len()
        )));
    }
    let start = match init {
        Some(p) => {
            if p.family != *family {
                return Err(Error::InvalidParameter(format!(
                    "initial value uses family {} but fitting {}",
                    p.family, family
                )));
            }
            p.clone()
        }
        None => initial_guess(sample, family)?,
    };

    let start_ll = observed_loglik(&start, sample);
    let mut trace = vec![start_ll];
    let mut best = Iterate {
        params: start.clone(),
        loglik: start_ll,
        clamps: Vec::new(),
    };
    let mut current = start;
    let mut prev_ll = start_ll;
    let mut converged = false;
    let mut iterations = 0;
    let mut best_iteration = 0;

    while iterations < controls.max_iter {
        iterations += 1;
        let Some(next) = em_iteration(&current, sample, family, controls) else {
            break;
        };
        let ll = observed_loglik(&next.params, sample);
        trace.push(ll);
        if ll > best.loglik || !best.loglik.is_finite() {
            best = Iterate {
                params: next.params.clone(),
                loglik: ll,
                clamps: next.clamps.clone(),
            };
            best_iteration = iterations;
        }
        if !ll.is_finite() {
            break;
        }
        if prev_ll.is_finite() && (ll - prev_ll).abs() / (ll.abs() + 1.0) < controls.tol {
            converged = true;
            break;
        }
        prev_ll = ll;
        current = next.params;
    }

    Ok(FitReport {
        family: family.to_string(),
        mle: best.params,
        loglik: best.loglik,
        iterations,
        best_iteration,
        converged,
        loglik_trace: trace,
        m0,
        m1,
        m2,
        active_clamps: best.clamps,
    })
}

fn em_iteration(
    current: &BglfrpsParams,
    sample: &BivariateSample,
    family: &PowerSeriesFamily,
    controls: EmControls,
) -> Option<Iterate> {
    let b = e_step(current, sample).ok()?;
    let weights = TieWeights::from_base(&current.base);
    let ctx = PseudoContext {
        sample,
        b: &b,
        weights,
        family,
        theta: current.theta,
    };

    let h = current.base.hazard;
    let start = [h.beta.ln(), h.gamma.max(GAMMA_FLOOR).ln()];
    let (ln_beta_lo, ln_beta_hi) = (BETA_MIN.ln(), BETA_MAX.ln());
    let (ln_gamma_lo, ln_gamma_hi) = (GAMMA_FLOOR.ln(), GAMMA_MAX.ln());
    let search = nelder_mead_2d(
        |[lb, lg]| {
            if !(ln_beta_lo..=ln_beta_hi).contains(&lb)
                || !(ln_gamma_lo..=ln_gamma_hi).contains(&lg)
            {
                return f64::NEG_INFINITY;
            }
            pseudo_profile_objective(lb.exp(), lg.exp(), &ctx)
        },
        start,
        controls.inner,
    );
    if !search.value.is_finite() {
        return None;
    }

    let mut clamps = Vec::new();
    let mut beta = search.argmax[0].exp();
    if beta <= BETA_MIN * (1.0 + 1e-6) {
        beta = BETA_MIN;
        clamps.push("beta_lower".to_string());
    } else if beta >= BETA_MAX * (1.0 - 1e-6) {
        beta = BETA_MAX;
        clamps.push("beta_upper".to_string());
    }
    let mut gamma = search.argmax[1].exp();
    if gamma <= GAMMA_FLOOR * 10.0 {
        gamma = 0.0;
        clamps.push("gamma_lower".to_string());
    } else if gamma >= GAMMA_MAX * (1.0 - 1e-6) {
        gamma = GAMMA_MAX;
        clamps.push("gamma_upper".to_string());
    }
    let hazard = LinearHazard::new(beta, gamma).ok()?;
    let est = m_step_alphas(sample, &b, weights, &hazard).ok()?;
    for (i, &c) in est.clamped.iter().enumerate() {
        if c {
            clamps.push(format!("alpha{}", i + 1));
        }
    }

    let theta = if family.is_degenerate() {
        current.theta
    } else {
        let b_bar = b.iter().sum::<f64>() / b.len() as f64;
        let sol = m_step_theta(family, b_bar).ok()?;
        match sol.clamp {
            Some(ThetaClamp::Lower) => clamps.push("theta_lower".to_string()),
            Some(ThetaClamp::Upper) => clamps.push("theta_upper".to_string()),
            None => {}
        }
        sol.theta
    };

    let [a1, a2, a3] = est.alphas;
    let base = BglfrParams::with_hazard(a1, a2, a3, hazard).ok()?;
    let params = BglfrpsParams::new(base, family.clone(), theta.value()).ok()?;
    Some(Iterate {
        params,
        loglik: f64::NAN,
        clamps,
    })
}

impl FitReport {
    /// Fitted law of one of the univariate functionals.
    pub fn marginal(&self, which: Margin) -> GlfrpsParams {
        self.mle.marginal(which)
    }
}
