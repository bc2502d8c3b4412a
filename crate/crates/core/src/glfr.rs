//! Generalized linear failure rate (GLFR) distribution:
//! `F(x) = (1 - exp(-βx - γx²/2))^α`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// The linear hazard `β + γx` shared by every component of the bivariate law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearHazard {
    pub beta: f64,
    pub gamma: f64,
}

impl LinearHazard {
    /// Requires `β, γ >= 0` with `β + γ > 0`.
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        if !(beta >= 0.0 && gamma >= 0.0 && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "hazard coefficients must be finite and nonnegative (beta = {beta}, gamma = {gamma})"
            )));
        }
        if beta + gamma <= 0.0 {
            return Err(Error::InvalidParameter(
                "beta and gamma cannot both be zero".into(),
            ));
        }
        Ok(Self { beta, gamma })
    }

    /// `β + γx`.
    pub fn rate(&self, x: f64) -> f64 {
        self.beta + self.gamma * x
    }

    /// `βx + γx²/2`.
    pub fn cumulative(&self, x: f64) -> f64 {
        x * (self.beta + 0.5 * self.gamma * x)
    }

    /// `ln(1 - exp(-βx - γx²/2))`, the log of the unit-shape cdf. Negative for
    /// every finite `x > 0`, `-inf` at zero.
    pub fn ln_base_cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let h = self.cumulative(x);
        if h > std::f64::consts::LN_2 {
            (-(-h).exp()).ln_1p()
        } else {
            (-(-h).exp_m1()).ln()
        }
    }

    /// Log density of the shape-`alpha` law at `x > 0`.
    pub fn ln_pdf(&self, alpha: f64, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let base = self.ln_base_cdf(x);
        let tail = if alpha == 1.0 {
            0.0
        } else {
            (alpha - 1.0) * base
        };
        alpha.ln() + self.rate(x).ln() - self.cumulative(x) + tail
    }

    /// cdf of the shape-`alpha` law; `x <= 0` gives 0.
    pub fn cdf(&self, alpha: f64, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        (alpha * self.ln_base_cdf(x)).exp()
    }

    /// Inverse cdf of the shape-`alpha` law for `u ∈ (0, 1)`.
    pub fn quantile(&self, alpha: f64, u: f64) -> f64 {
        // t solves βx + γx²/2 = t; the rationalized root stays accurate as γ → 0.
        let lw = u.ln() / alpha;
        let t = if lw < -std::f64::consts::LN_2 {
            -(-lw.exp()).ln_1p()
        } else {
            -(-lw.exp_m1()).ln()
        };
        let disc = (self.beta * self.beta + 2.0 * self.gamma * t).sqrt();
        2.0 * t / (self.beta + disc)
    }
}

/// Parameters of a univariate GLFR law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlfrParams {
    pub alpha: f64,
    pub hazard: LinearHazard,
}

impl GlfrParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        Self::with_hazard(alpha, LinearHazard::new(beta, gamma)?)
    }

    pub fn with_hazard(alpha: f64, hazard: LinearHazard) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "shape alpha must be positive, got {alpha}"
            )));
        }
        Ok(Self { alpha, hazard })
    }

    pub fn beta(&self) -> f64 {
        self.hazard.beta
    }

    pub fn gamma(&self) -> f64 {
        self.hazard.gamma
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x < 0.0 || x.is_nan() {
            return Err(Error::Domain(format!("cdf argument {x} must be >= 0")));
        }
        Ok(self.hazard.cdf(self.alpha, x))
    }

    /// Density; zero for `x <= 0`.
    pub fn pdf(&self, x: f64) -> f64 {
        self.logpdf(x).exp()
    }

    pub fn logpdf(&self, x: f64) -> f64 {
        self.hazard.ln_pdf(self.alpha, x)
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile level {u} outside (0, 1)")));
        }
        Ok(self.hazard.quantile(self.alpha, u))
    }

    /// Inverse-transform draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                return self.hazard.quantile(self.alpha, u);
            }
        }
    }
}
