//! Zero-truncated power-series laws for the latent count `N`:
//! `P(N = n) = a_n θ^n / C(θ)` for `n >= 1`.

use std::fmt;
use std::num::NonZeroU32;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::optim::{brent_root, RootControls};

/// Lower end of the admissible θ range used by solvers and clamps.
pub const THETA_FLOOR: f64 = 1e-8;

/// Series oracles stop at the first index whose term drops below this.
pub const SERIES_TAIL: f64 = 1e-12;

/// Hard cap on series length.
pub const SERIES_MAX_TERMS: u64 = 100_000;

const SAMPLE_TAIL: f64 = 1e-15;
const THETA_CEILING: f64 = 1e12;

/// A mixing law for the latent count. Named families follow their standard
/// parametrizations; `Polynomial` holds `a_1, a_2, ..., a_d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum PowerSeriesFamily {
    Geometric,
    Poisson,
    Logarithmic,
    Binomial { k: NonZeroU32 },
    NegativeBinomial { k: NonZeroU32 },
    Polynomial { coefficients: Vec<f64> },
}

/// `C(z)` and its first three derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CDerivatives {
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

/// The power parameter, strictly inside `(0, s)` of its family.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Theta(f64);

impl Theta {
    pub fn new(value: f64, family: &PowerSeriesFamily) -> Result<Self> {
        if value > 0.0 && value < family.support_bound() && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::Domain(format!(
                "theta = {value} outside (0, {}) for {family}",
                family.support_bound()
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which end of the θ search interval a solution was pinned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaClamp {
    Lower,
    Upper,
}

/// Outcome of inverting the mean equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSolution {
    pub theta: Theta,
    pub clamp: Option<ThetaClamp>,
}

impl PowerSeriesFamily {
    pub fn binomial(k: u32) -> Result<Self> {
        NonZeroU32::new(k)
            .map(|k| Self::Binomial { k })
            .ok_or_else(|| Error::InvalidParameter("binomial k must be positive".into()))
    }

    pub fn negative_binomial(k: u32) -> Result<Self> {
        NonZeroU32::new(k)
            .map(|k| Self::NegativeBinomial { k })
            .ok_or_else(|| Error::InvalidParameter("negative binomial k must be positive".into()))
    }

    /// Finite power series `Σ a_n θ^n` with `coefficients[i] = a_{i+1}`.
    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidParameter(
                "polynomial coefficients must be finite and nonnegative".into(),
            ));
        }
        if !coefficients.iter().any(|a| *a > 0.0) {
            return Err(Error::InvalidParameter(
                "polynomial needs at least one positive coefficient".into(),
            ));
        }
        let mut coefficients = coefficients;
        while coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        Ok(Self::Polynomial { coefficients })
    }

    /// `C(θ) = θ`: the count is always one and the compound law collapses to
    /// its base distribution.
    pub fn degenerate() -> Self {
        Self::Polynomial {
            coefficients: vec![1.0],
        }
    }

    /// Short identifier used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Geometric => "geometric",
            Self::Poisson => "poisson",
            Self::Logarithmic => "logarithmic",
            Self::Binomial { .. } => "binomial",
            Self::NegativeBinomial { .. } => "negbinomial",
            Self::Polynomial { .. } => "poly",
        }
    }

    /// The bound `s` such that `C` is finite on `(0, s)`.
    pub fn support_bound(&self) -> f64 {
        match self {
            Self::Geometric | Self::Logarithmic | Self::NegativeBinomial { .. } => 1.0,
            Self::Poisson | Self::Binomial { .. } | Self::Polynomial { .. } => f64::INFINITY,
        }
    }

    /// `c = min{n : a_n > 0}`.
    pub fn min_degree(&self) -> u64 {
        match self {
            Self::NegativeBinomial { k } => u64::from(k.get()),
            Self::Polynomial { coefficients } => {
                coefficients.iter().position(|a| *a > 0.0).unwrap_or(0) as u64 + 1
            }
            _ => 1,
        }
    }

    /// Largest `n` with `a_n > 0`, if the support is finite.
    pub fn max_degree(&self) -> Option<u64> {
        match self {
            Self::Binomial { k } => Some(u64::from(k.get())),
            Self::Polynomial { coefficients } => Some(coefficients.len() as u64),
            _ => None,
        }
    }

    /// True when a single coefficient is nonzero, so `N` is constant and θ is
    /// not identifiable.
    pub fn is_degenerate(&self) -> bool {
        self.max_degree() == Some(self.min_degree())
    }

    /// `ln a_n`, or `-inf` where `a_n = 0`.
    pub fn ln_coefficient(&self, n: u64) -> f64 {
        if n == 0 {
            return f64::NEG_INFINITY;
        }
        let nf = n as f64;
        match self {
            Self::Geometric => 0.0,
            Self::Poisson => -ln_gamma(nf + 1.0),
            Self::Logarithmic => -nf.ln(),
            Self::Binomial { k } => {
                let k = u64::from(k.get());
                if n > k {
                    f64::NEG_INFINITY
                } else {
                    ln_choose(k, n)
                }
            }
            Self::NegativeBinomial { k } => {
                let k = u64::from(k.get());
                if n < k {
                    f64::NEG_INFINITY
                } else {
                    ln_choose(n - 1, k - 1)
                }
            }
            Self::Polynomial { coefficients } => coefficients
                .get((n - 1) as usize)
                .map_or(f64::NEG_INFINITY, |a| a.ln()),
        }
    }

    /// Evaluates `C, C', C'', C'''` at an arbitrary `z ∈ [0, s)`.
    pub fn derivatives(&self, z: f64) -> Result<CDerivatives> {
        if !(z >= 0.0 && z < self.support_bound()) {
            return Err(Error::Domain(format!(
                "C evaluated at {z} outside [0, {})",
                self.support_bound()
            )));
        }
        let d = match self {
            Self::Geometric => {
                let r = 1.0 / (1.0 - z);
                CDerivatives {
                    c: z * r,
                    c1: r * r,
                    c2: 2.0 * r * r * r,
                    c3: 6.0 * r * r * r * r,
                }
            }
            Self::Poisson => {
                let e = z.exp();
                CDerivatives {
                    c: z.exp_m1(),
                    c1: e,
                    c2: e,
                    c3: e,
                }
            }
            Self::Logarithmic => {
                let r = 1.0 / (1.0 - z);
                CDerivatives {
                    c: -(-z).ln_1p(),
                    c1: r,
                    c2: r * r,
                    c3: 2.0 * r * r * r,
                }
            }
            Self::Binomial { k } => {
                let k = f64::from(k.get());
                let l = z.ln_1p();
                CDerivatives {
                    c: (k * l).exp_m1(),
                    c1: k * ((k - 1.0) * l).exp(),
                    c2: k * (k - 1.0) * ((k - 2.0) * l).exp(),
                    c3: k * (k - 1.0) * (k - 2.0) * ((k - 3.0) * l).exp(),
                }
            }
            Self::NegativeBinomial { k } => {
                let k = f64::from(k.get());
                let q = 1.0 - z;
                CDerivatives {
                    c: (z / q).powf(k),
                    c1: k * z.powf(k - 1.0) / q.powf(k + 1.0),
                    c2: k * (k + 2.0 * z - 1.0) * z.powf(k - 2.0) / q.powf(k + 2.0),
                    c3: k
                        * (k * k + 6.0 * k * z + 6.0 * z * z - 3.0 * k - 6.0 * z + 2.0)
                        * z.powf(k - 3.0)
                        / q.powf(k + 3.0),
                }
            }
            Self::Polynomial { coefficients } => polynomial_derivatives(coefficients, z),
        };
        // Closed forms with negative powers of z are 0/0 at the origin.
        let d = if z == 0.0 {
            let a = |n: u64| self.ln_coefficient(n).exp();
            CDerivatives {
                c: 0.0,
                c1: a(1),
                c2: 2.0 * a(2),
                c3: 6.0 * a(3),
            }
        } else {
            d
        };
        for v in [d.c, d.c1, d.c2, d.c3] {
            if !v.is_finite() {
                return Err(Error::Overflow {
                    what: "power series C",
                    at: z,
                });
            }
        }
        Ok(d)
    }

    /// `(C, C', C'', C''')` at θ.
    pub fn c_derivatives(&self, theta: Theta) -> Result<CDerivatives> {
        self.derivatives(theta.0)
    }

    /// `P(N = n) = a_n θ^n / C(θ)`.
    pub fn pmf(&self, theta: Theta, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("count must be at least 1".into()));
        }
        let ln_c = self.c_derivatives(theta)?.c.ln();
        Ok(self.pmf_with_ln_c(theta.0, ln_c, n))
    }

    fn pmf_with_ln_c(&self, theta: f64, ln_c: f64, n: u64) -> f64 {
        let la = self.ln_coefficient(n);
        if la == f64::NEG_INFINITY {
            return 0.0;
        }
        (la + n as f64 * theta.ln() - ln_c).exp()
    }

    /// `E[N] = θ C'(θ) / C(θ)`.
    pub fn mean(&self, theta: Theta) -> Result<f64> {
        self.mean_at(theta.0)
    }

    fn mean_at(&self, t: f64) -> Result<f64> {
        let m = match self {
            Self::Geometric => 1.0 / (1.0 - t),
            Self::Poisson => t / -(-t).exp_m1(),
            Self::Logarithmic => t / ((1.0 - t) * -(-t).ln_1p()),
            Self::Binomial { k } => {
                let k = f64::from(k.get());
                k * t / ((1.0 + t) * -(-k * t.ln_1p()).exp_m1())
            }
            Self::NegativeBinomial { k } => f64::from(k.get()) / (1.0 - t),
            Self::Polynomial { coefficients } => {
                let d = polynomial_derivatives(coefficients, t);
                t * d.c1 / d.c
            }
        };
        if m.is_finite() {
            Ok(m)
        } else {
            Err(Error::Overflow {
                what: "power series mean",
                at: t,
            })
        }
    }

    /// Supremum of the mean over `(0, s)`.
    pub fn mean_supremum(&self) -> f64 {
        self.max_degree().map_or(f64::INFINITY, |d| d as f64)
    }

    /// Inverts `θ C'(θ) / C(θ) = target` on `(1e-8, s - 1e-8)`.
    ///
    /// Targets at or below the mean attained at the lower end return the lower
    /// clamp; targets at or beyond the reachable supremum return the upper clamp.
    pub fn solve_theta_for_mean(&self, target: f64) -> Result<ThetaSolution> {
        if !(target >= 1.0) || !target.is_finite() {
            return Err(Error::Domain(format!("target mean {target} must be >= 1")));
        }
        let lo = THETA_FLOOR;
        let clamp_to = |t: f64, side| -> Result<ThetaSolution> {
            Ok(ThetaSolution {
                theta: Theta::new(t, self)?,
                clamp: Some(side),
            })
        };
        if self.is_degenerate() || target <= self.mean_at(lo)? {
            return clamp_to(lo, ThetaClamp::Lower);
        }
        let s = self.support_bound();
        let hi = if s.is_finite() {
            let hi = s - THETA_FLOOR;
            if target >= self.mean_at(hi)? {
                return clamp_to(hi, ThetaClamp::Upper);
            }
            hi
        } else {
            if target >= self.mean_supremum() {
                return clamp_to(THETA_CEILING, ThetaClamp::Upper);
            }
            let mut hi = 1.0;
            while self.mean_at(hi)? <= target {
                hi *= 2.0;
                if hi > THETA_CEILING {
                    return clamp_to(THETA_CEILING, ThetaClamp::Upper);
                }
            }
            hi
        };
        let root = brent_root(
            |t| self.mean_at(t).unwrap_or(f64::NAN) - target,
            lo,
            hi,
            RootControls {
                xtol: 1e-15,
                max_iter: 200,
            },
        )?;
        Ok(ThetaSolution {
            theta: Theta::new(root, self)?,
            clamp: None,
        })
    }

    /// Index at which series over `n` may be truncated: the support end for
    /// finite families, otherwise the first index past the mode whose term is
    /// below [`SERIES_TAIL`].
    pub fn truncation_index(&self, theta: Theta) -> Result<u64> {
        if let Some(d) = self.max_degree() {
            return Ok(d);
        }
        let ln_c = self.c_derivatives(theta)?.c.ln();
        let mut prev = 0.0;
        for n in 1..=SERIES_MAX_TERMS {
            let p = self.pmf_with_ln_c(theta.0, ln_c, n);
            if n > self.min_degree() && p < SERIES_TAIL && p <= prev {
                return Ok(n);
            }
            prev = p;
        }
        Ok(SERIES_MAX_TERMS)
    }

    /// Draws `N` by walking the cumulative distribution.
    pub fn sample_n<R: Rng + ?Sized>(&self, theta: Theta, rng: &mut R) -> u64 {
        let ln_c = match self.c_derivatives(theta) {
            Ok(d) => d.c.ln(),
            Err(_) => return self.min_degree(),
        };
        let u: f64 = rng.random();
        let last = self.max_degree().unwrap_or(SERIES_MAX_TERMS);
        let mut cumulative = 0.0;
        let mut n = self.min_degree();
        loop {
            cumulative += self.pmf_with_ln_c(theta.0, ln_c, n);
            if u <= cumulative || 1.0 - cumulative < SAMPLE_TAIL || n >= last {
                return n;
            }
            n += 1;
        }
    }
}

fn ln_choose(n: u64, k: u64) -> f64 {
    if k == 0 || k == n {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn polynomial_derivatives(coefficients: &[f64], z: f64) -> CDerivatives {
    CDerivatives {
        c: polynomial_derivative(coefficients, 0, z),
        c1: polynomial_derivative(coefficients, 1, z),
        c2: polynomial_derivative(coefficients, 2, z),
        c3: polynomial_derivative(coefficients, 3, z),
    }
}

/// Horner evaluation of the `order`-th derivative of `Σ a_n z^n`.
fn polynomial_derivative(coefficients: &[f64], order: usize, z: f64) -> f64 {
    let degree = coefficients.len();
    if degree < order {
        return 0.0;
    }
    let mut acc = 0.0;
    for n in (order..=degree).rev() {
        let a = if n == 0 { 0.0 } else { coefficients[n - 1] };
        let falling: f64 = (0..order).map(|i| (n - i) as f64).product();
        acc = acc * z + a * falling;
    }
    acc
}

impl fmt::Display for PowerSeriesFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Binomial { k } => write!(f, "binomial:{k}"),
            Self::NegativeBinomial { k } => write!(f, "negbinomial:{k}"),
            Self::Polynomial { coefficients } => {
                let parts: Vec<String> = coefficients.iter().map(|c| format!("{c}")).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for PowerSeriesFamily {
    type Err = Error;

    /// Parses `geometric | poisson | logarithmic | binomial:k | negbinomial:k | poly:c1,c2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (s, None),
        };
        let int_arg = |a: Option<&str>| -> Result<u32> {
            a.ok_or_else(|| Error::Parse(format!("family `{head}` needs `:k`")))?
                .parse::<u32>()
                .map_err(|e| Error::Parse(format!("bad k in `{s}`: {e}")))
        };
        let no_arg = |fam: Self| -> Result<Self> {
            match arg {
                None => Ok(fam),
                Some(_) => Err(Error::Parse(format!("family `{head}` takes no argument"))),
            }
        };
        match head.to_ascii_lowercase().as_str() {
            "geometric" => no_arg(Self::Geometric),
            "poisson" => no_arg(Self::Poisson),
            "logarithmic" => no_arg(Self::Logarithmic),
            "binomial" => Self::binomial(int_arg(arg)?),
            "negbinomial" => Self::negative_binomial(int_arg(arg)?),
            "poly" => {
                let list = arg.ok_or_else(|| Error::Parse("poly needs coefficients".into()))?;
                let coefficients = list
                    .split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<f64>()
                            .map_err(|e| Error::Parse(format!("bad coefficient `{c}`: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::polynomial(coefficients)
            }
            _ => Err(Error::Parse(format!("unknown family `{s}`"))),
        }
    }
}
