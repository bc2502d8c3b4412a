//! Univariate GLFR–power-series law: the maximum of `N` i.i.d. GLFR draws.
//! Every margin of the bivariate class, and its componentwise maximum, has
//! this form.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::glfr::GlfrParams;
use crate::powerseries::{PowerSeriesFamily, Theta};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlfrpsParams {
    pub glfr: GlfrParams,
    pub family: PowerSeriesFamily,
    pub theta: Theta,
}

impl GlfrpsParams {
    pub fn new(glfr: GlfrParams, family: PowerSeriesFamily, theta: f64) -> Result<Self> {
        let theta = Theta::new(theta, &family)?;
        Ok(Self {
            glfr,
            family,
            theta,
        })
    }

    /// `C(θ F_G(x)) / C(θ)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        let g = self.glfr.cdf(x)?;
        let t = self.theta.value();
        let num = self.family.derivatives(t * g)?.c;
        let den = self.family.c_derivatives(self.theta)?.c;
        Ok((num / den).min(1.0))
    }

    /// `θ f_G(x) C'(θ F_G(x)) / C(θ)`; zero for `x <= 0`.
    pub fn pdf(&self, x: f64) -> f64 {
        self.logpdf(x).exp()
    }

    pub fn logpdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let t = self.theta.value();
        let z = t * self.glfr.hazard.cdf(self.glfr.alpha, x);
        match (
            self.family.derivatives(z),
            self.family.c_derivatives(self.theta),
        ) {
            (Ok(dz), Ok(dt)) => t.ln() + self.glfr.logpdf(x) + dz.c1.ln() - dt.c.ln(),
            _ => f64::NAN,
        }
    }

    /// Log-likelihood of an i.i.d. sample.
    pub fn loglik(&self, data: &[f64]) -> f64 {
        data.iter().map(|&x| self.logpdf(x)).sum()
    }

    /// Shape `α` and the same hazard, with another family or θ.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha}")));
        }
        Ok(Self {
            glfr: GlfrParams::with_hazard(alpha, self.glfr.hazard)?,
            ..self.clone()
        })
    }
}
