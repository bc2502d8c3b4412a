//! The bivariate GLFR–power-series class: componentwise maxima of `N` i.i.d.
//! bivariate GLFR pairs, with `N` drawn from a zero-truncated power series.
//!
//! The joint cdf is `C(θ F(y1, y2)) / C(θ)` where `F` is the base bivariate
//! GLFR cdf. The law has an absolutely continuous part on `{y1 ≠ y2}` and a
//! singular part on the diagonal with weight `α3 / (α1 + α2 + α3)`.
//!
//! Densities are assembled in log space: with `β` around 10 the factors
//! `exp(-βy)` and `(1 - exp(-βy))^(α-1)` span many orders of magnitude over a
//! realistic sample.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::bglfr::{BglfrParams, Margin};
use crate::error::{Error, Result};
use crate::glfrps::GlfrpsParams;
use crate::powerseries::{PowerSeriesFamily, Theta};
use crate::quadrature::{integrate, integrate_lower_triangle, QuadControls};

/// Parameter vector `(α1, α2, α3, β, γ, θ)` together with the mixing family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BglfrpsParams {
    pub base: BglfrParams,
    pub family: PowerSeriesFamily,
    pub theta: Theta,
}

/// Which piece of the joint density applies at a point. Regions are decided
/// by exact comparison of the coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `y1 < y2`
    Lower,
    /// `y1 > y2`
    Upper,
    /// `y1 = y2`
    Diagonal,
}

impl Region {
    pub fn of(y1: f64, y2: f64) -> Self {
        if y1 < y2 {
            Self::Lower
        } else if y1 > y2 {
            Self::Upper
        } else {
            Self::Diagonal
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Lower => "Lower",
            Self::Upper => "Upper",
            Self::Diagonal => "Diagonal",
        })
    }
}

/// A joint density value. Off the diagonal it is a density with respect to
/// area; on the diagonal it is with respect to length along the line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointDensityValue {
    pub region: Region,
    pub value: f64,
}

/// The mixture `w_a g_a + w_s g_s` evaluated at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AcSingularSplit {
    pub ac_weight: f64,
    pub singular_weight: f64,
    /// Normalized absolutely continuous density; zero on the diagonal.
    pub g_a: f64,
    /// Normalized singular density along the diagonal; zero off it.
    pub g_s: f64,
}

/// Result of numerically integrating the density over its support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassDecomposition {
    pub lower: f64,
    pub upper: f64,
    pub singular: f64,
    pub total: f64,
    pub error_estimate: f64,
    pub upper_limit: f64,
}

impl BglfrpsParams {
    pub fn new(base: BglfrParams, family: PowerSeriesFamily, theta: f64) -> Result<Self> {
        let theta = Theta::new(theta, &family)?;
        // Rejects θ where C overflows.
        family.c_derivatives(theta)?;
        Ok(Self {
            base,
            family,
            theta,
        })
    }

    /// The base law `C(θ) = θ`, written as a member of the class.
    pub fn from_base(base: BglfrParams) -> Self {
        let family = PowerSeriesFamily::degenerate();
        let theta = Theta::new(1.0, &family).expect("1 is inside (0, inf)");
        Self {
            base,
            family,
            theta,
        }
    }

    /// `(α1, α2, α3, β, γ, θ)`.
    pub fn to_vec(&self) -> [f64; 6] {
        [
            self.base.alpha1,
            self.base.alpha2,
            self.base.alpha3,
            self.base.hazard.beta,
            self.base.hazard.gamma,
            self.theta.value(),
        ]
    }

    /// Rebuilds parameters from `(α1, α2, α3, β, γ, θ)`.
    pub fn from_vec(v: [f64; 6], family: PowerSeriesFamily) -> Result<Self> {
        let base = BglfrParams::new(v[0], v[1], v[2], v[3], v[4])?;
        Self::new(base, family, v[5])
    }

    fn ln_c_theta(&self) -> Result<f64> {
        Ok(self.family.c_derivatives(self.theta)?.c.ln())
    }

    /// `C(θ F(y1, y2)) / C(θ)`.
    pub fn joint_cdf(&self, y1: f64, y2: f64) -> Result<f64> {
        let f = self.base.cdf(y1, y2)?;
        let t = self.theta.value();
        let num = self.family.derivatives(t * f)?.c;
        let den = self.family.c_derivatives(self.theta)?.c;
        Ok((num / den).min(1.0))
    }

    /// Log of the off-diagonal density formula with shapes `(a, b)`:
    /// `θ/C(θ) f_G(y1; a) f_G(y2; b) [z C''(z) + C'(z)]`, `z = θ F_G(y1; a) F_G(y2; b)`.
    fn ln_off_diagonal(&self, a: f64, b: f64, y1: f64, y2: f64) -> Result<f64> {
        let h = &self.base.hazard;
        let t = self.theta.value();
        let z = t * (a * h.ln_base_cdf(y1) + b * h.ln_base_cdf(y2)).exp();
        let d = self.family.derivatives(z)?;
        let bracket = z * d.c2 + d.c1;
        Ok(t.ln() - self.ln_c_theta()? + h.ln_pdf(a, y1) + h.ln_pdf(b, y2) + bracket.ln())
    }

    /// Log of `θ/C(θ) f_G(y; Σα) C'(θ F_G(y; Σα))`, the normalized diagonal density.
    fn ln_singular_density(&self, y: f64) -> Result<f64> {
        let h = &self.base.hazard;
        let s = self.base.alpha_sum();
        let t = self.theta.value();
        let z = t * h.cdf(s, y);
        let d = self.family.derivatives(z)?;
        Ok(t.ln() - self.ln_c_theta()? + h.ln_pdf(s, y) + d.c1.ln())
    }

    /// Region and log density at `(y1, y2)`, both strictly positive.
    pub fn joint_ln_pdf(&self, y1: f64, y2: f64) -> Result<(Region, f64)> {
        if !(y1 > 0.0 && y2 > 0.0) || !(y1.is_finite() && y2.is_finite()) {
            return Err(Error::Domain(format!(
                "density needs positive finite coordinates, got ({y1}, {y2})"
            )));
        }
        let b = &self.base;
        let region = Region::of(y1, y2);
        let v = match region {
            Region::Lower => self.ln_off_diagonal(b.alpha1 + b.alpha3, b.alpha2, y1, y2)?,
            Region::Upper => self.ln_off_diagonal(b.alpha1, b.alpha2 + b.alpha3, y1, y2)?,
            Region::Diagonal => {
                if b.alpha3 == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    (b.alpha3 / b.alpha_sum()).ln() + self.ln_singular_density(y1)?
                }
            }
        };
        Ok((region, v))
    }

    pub fn joint_pdf(&self, y1: f64, y2: f64) -> Result<JointDensityValue> {
        let (region, v) = self.joint_ln_pdf(y1, y2)?;
        Ok(JointDensityValue {
            region,
            value: v.exp(),
        })
    }

    /// Splits the density into its absolutely continuous and singular parts.
    pub fn ac_singular_split(&self, y1: f64, y2: f64) -> Result<AcSingularSplit> {
        let b = &self.base;
        let ac = b.alpha1 + b.alpha2;
        if ac <= 0.0 {
            return Err(Error::InvalidParameter(
                "alpha1 + alpha2 = 0 leaves no absolutely continuous part".into(),
            ));
        }
        let total = b.alpha_sum();
        let (ac_weight, singular_weight) = (ac / total, b.alpha3 / total);
        let (region, ln_f) = self.joint_ln_pdf(y1, y2)?;
        let (g_a, g_s) = match region {
            Region::Diagonal => (0.0, self.ln_singular_density(y1)?.exp()),
            _ => (ln_f.exp() / ac_weight, 0.0),
        };
        Ok(AcSingularSplit {
            ac_weight,
            singular_weight,
            g_a,
            g_s,
        })
    }

    /// Marginal law of `Y1`, `Y2` or `max(Y1, Y2)`.
    pub fn marginal(&self, which: Margin) -> GlfrpsParams {
        GlfrpsParams {
            glfr: self.base.marginal(which),
            family: self.family.clone(),
            theta: self.theta,
        }
    }

    /// `P(Y1 <= y1 | Y2 <= y2)`.
    pub fn conditional_cdf_given_le(&self, y1: f64, y2: f64) -> Result<f64> {
        if !(y2 > 0.0) {
            return Err(Error::UndefinedConditional(format!(
                "conditioning event Y2 <= {y2} has probability zero"
            )));
        }
        if y1 < 0.0 || y1.is_nan() {
            return Err(Error::Domain(format!("y1 = {y1} must be >= 0")));
        }
        let b = &self.base;
        let h = &b.hazard;
        let t = self.theta.value();
        let den = self
            .family
            .derivatives(t * h.cdf(b.alpha2 + b.alpha3, y2))?
            .c;
        if den <= 0.0 {
            return Err(Error::UndefinedConditional(format!(
                "P(Y2 <= {y2}) underflows to zero"
            )));
        }
        let (a1, a2) = if y1 < y2 {
            (b.alpha1 + b.alpha3, b.alpha2)
        } else {
            (b.alpha1, b.alpha2 + b.alpha3)
        };
        let num = self
            .family
            .derivatives(t * h.cdf(a1, y1) * h.cdf(a2, y2))?
            .c;
        Ok((num / den).min(1.0))
    }

    /// Region and `z = θ A_i`, the argument at which the conditional law of `N`
    /// is a (size-biased) power series.
    fn latent_argument(&self, y1: f64, y2: f64) -> Result<(Region, f64)> {
        let (region, ln_f) = self.joint_ln_pdf(y1, y2)?;
        if ln_f == f64::NEG_INFINITY || ln_f.is_nan() {
            return Err(Error::UndefinedConditional(format!(
                "joint density is zero at ({y1}, {y2})"
            )));
        }
        let b = &self.base;
        let h = &b.hazard;
        let ln_a = match region {
            Region::Diagonal => b.alpha_sum() * h.ln_base_cdf(y1),
            _ => b.ln_cdf(y1, y2),
        };
        Ok((region, self.theta.value() * ln_a.exp()))
    }

    /// `P(N = n | Y1 = y1, Y2 = y2)`.
    pub fn conditional_n_pmf(&self, y1: f64, y2: f64, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("count must be at least 1".into()));
        }
        let (region, z) = self.latent_argument(y1, y2)?;
        let d = self.family.derivatives(z)?;
        let la = self.family.ln_coefficient(n);
        if la == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let ln_z_pow = if n == 1 { 0.0 } else { (n - 1) as f64 * z.ln() };
        let nf = n as f64;
        let (ln_weight, norm) = match region {
            Region::Diagonal => (nf.ln(), d.c1),
            _ => (2.0 * nf.ln(), z * d.c2 + d.c1),
        };
        if !(norm > 0.0) {
            return Err(Error::UndefinedConditional(format!(
                "normalizer vanishes at ({y1}, {y2})"
            )));
        }
        Ok((ln_weight + la + ln_z_pow - norm.ln()).exp())
    }

    /// `E(N | Y1 = y1, Y2 = y2)`, the E-step weight.
    pub fn conditional_n_mean(&self, y1: f64, y2: f64) -> Result<f64> {
        let (region, z) = self.latent_argument(y1, y2)?;
        let d = self.family.derivatives(z)?;
        let (num, den) = match region {
            Region::Diagonal => (z * d.c2 + d.c1, d.c1),
            _ => (z * z * d.c3 + 3.0 * z * d.c2 + d.c1, z * d.c2 + d.c1),
        };
        if !(den > 0.0) {
            return Err(Error::UndefinedConditional(format!(
                "normalizer vanishes at ({y1}, {y2})"
            )));
        }
        Ok((num / den).max(1.0))
    }

    /// Draws `N`, then one pair from the base law with shapes scaled by `N`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let n = self.family.sample_n(self.theta, rng);
        self.base.scaled(n as f64).sample(rng)
    }

    /// The base law with shapes scaled by `c = min{n : a_n > 0}`, the limit as θ → 0.
    pub fn limit_theta_zero_reference(&self) -> BglfrParams {
        self.base.scaled(self.family.min_degree() as f64)
    }

    /// Integrates both density pieces over `(0, x_hi)²` where `x_hi` is the
    /// `1 - 1e-10` quantile of the base law of the maximum.
    pub fn total_mass(&self, controls: QuadControls) -> Result<MassDecomposition> {
        let b = &self.base;
        let upper_limit = b.marginal(Margin::Max).quantile(1.0 - 1e-10)?;
        let smallest = (b.alpha1 + b.alpha3).min(b.alpha2 + b.alpha3);
        let power = (2.0 / smallest).ceil().clamp(1.0, 40.0);

        let density = |y1: f64, y2: f64| match self.joint_ln_pdf(y1, y2) {
            Ok((_, v)) if v.is_finite() => v.exp(),
            _ => 0.0,
        };
        let lower = integrate_lower_triangle(density, upper_limit, power, controls);
        let upper = integrate_lower_triangle(|u, v| density(v, u), upper_limit, power, controls);
        let singular = if b.alpha3 == 0.0 {
            crate::quadrature::QuadResult {
                value: 0.0,
                error: 0.0,
                intervals: 0,
            }
        } else {
            let sp = power.max(1.0);
            integrate(
                |t| {
                    let y = upper_limit * t.powf(sp);
                    if y <= 0.0 {
                        return 0.0;
                    }
                    density(y, y) * upper_limit * sp * t.powf(sp - 1.0)
                },
                0.0,
                1.0,
                controls,
            )
        };
        Ok(MassDecomposition {
            lower: lower.value,
            upper: upper.value,
            singular: singular.value,
            total: lower.value + upper.value + singular.value,
            error_estimate: lower.error + upper.error + singular.error,
            upper_limit,
        })
    }

    /// Evaluates the density on a lattice: the absolutely continuous part on
    /// every lattice point and the singular part along the diagonal.
    ///
    /// Lattice points with `y1 == y2` report the limit of the `y1 < y2` formula.
    pub fn density_grid(&self, spec: &GridSpec) -> Result<DensityGrid> {
        let b = &self.base;
        let xs = spec.first.points();
        let ys = spec.second.points();
        let mut ac = Vec::with_capacity(xs.len() * ys.len());
        for &y1 in &xs {
            for &y2 in &ys {
                let (a1, a2) = b.region_shapes(y1, y2);
                let v = self.ln_off_diagonal(a1, a2, y1, y2)?.exp();
                ac.push((y1, y2, v));
            }
        }
        let mut diagonal = Vec::with_capacity(xs.len());
        for &y in &xs {
            diagonal.push((y, self.joint_pdf(y, y)?.value));
        }
        Ok(DensityGrid { ac, diagonal })
    }
}

/// Equally spaced points `lo + (hi - lo) k / n` for `k = 1..=n`; the lower end
/// is excluded so densities are never evaluated at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        (1..=self.n)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / self.n as f64)
            .collect()
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || Error::Parse(format!("axis `{s}` must look like lo:hi:n"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].parse().map_err(|_| bad())?;
        let n: usize = parts[2].parse().map_err(|_| bad())?;
        if !(lo >= 0.0 && hi > lo && n > 0) {
            return Err(Error::Parse(format!(
                "axis `{s}` needs 0 <= lo < hi and n > 0"
            )));
        }
        Ok(Self { lo, hi, n })
    }
}

/// A rectangular lattice, written `lo:hi:n` (square) or `lo:hi:n,lo:hi:n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub first: Axis,
    pub second: Axis,
}

impl Default for GridSpec {
    fn default() -> Self {
        let axis = Axis {
            lo: 0.0,
            hi: 2.0,
            n: 100,
        };
        Self {
            first: axis,
            second: axis,
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(',') {
            Some((a, b)) => Ok(Self {
                first: a.parse()?,
                second: b.parse()?,
            }),
            None => {
                let axis: Axis = s.parse()?;
                Ok(Self {
                    first: axis,
                    second: axis,
                })
            }
        }
    }
}

/// Density values for plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityGrid {
    /// `(y1, y2, f)` rows of the absolutely continuous part.
    pub ac: Vec<(f64, f64, f64)>,
    /// `(y, f0)` rows along the diagonal.
    pub diagonal: Vec<(f64, f64)>,
}

impl DensityGrid {
    /// Tab-separated text: a `y1 y2 f` block, a blank line, then a `y f0` block.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("y1\ty2\tf\n");
        for (a, b, v) in &self.ac {
            out.push_str(&format!("{a}\t{b}\t{v:e}\n"));
        }
        out.push_str("\ny\tf0\n");
        for (y, v) in &self.diagonal {
            out.push_str(&format!("{y}\t{v:e}\n"));
        }
        out
    }
}
