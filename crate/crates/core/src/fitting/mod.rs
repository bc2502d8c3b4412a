//! Maximum-likelihood fitting of the bivariate class by an EM algorithm that
//! treats the count `N` and the identity of the dominating component as
//! missing data.

mod em;

pub use crate::optim::{
    brent_root, nelder_mead_2d, NelderMeadControls, NelderMeadResult, RootControls,
};
pub use em::{
    e_step, em_fit, initial_guess, m_step_alphas, m_step_theta, pseudo_loglik,
    pseudo_profile_objective, AlphaEstimate, EmControls, FitReport, PseudoContext, TieWeights,
};

use serde::Serialize;

use crate::bglfrps::{BglfrpsParams, Region};
use crate::error::{Error, Result};

/// Observed pairs with their tie partition: `I0` (y1 = y2), `I1` (y1 < y2)
/// and `I2` (y1 > y2).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BivariateSample {
    pairs: Vec<(f64, f64)>,
    ties: Vec<usize>,
    lower: Vec<usize>,
    upper: Vec<usize>,
}

impl BivariateSample {
    /// Partitions by exact comparison. Every coordinate must be positive and finite.
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if let Some((i, p)) = pairs
            .iter()
            .enumerate()
            .find(|(_, (a, b))| !(*a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite()))
        {
            return Err(Error::Domain(format!(
                "observation {} = {:?} is not a pair of positive finite values",
                i + 1,
                p
            )));
        }
        let mut sample = Self {
            pairs,
            ties: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
        };
        sample.partition();
        Ok(sample)
    }

    /// Treats pairs whose coordinates differ by at most `tol` as ties, replacing
    /// both coordinates by their average.
    pub fn with_tie_tolerance(pairs: Vec<(f64, f64)>, tol: f64) -> Result<Self> {
        if !(tol >= 0.0) {
            return Err(Error::Domain(format!("tie tolerance {tol} must be >= 0")));
        }
        let pairs = pairs
            .into_iter()
            .map(|(a, b)| {
                if a != b && (a - b).abs() <= tol {
                    let m = 0.5 * (a + b);
                    (m, m)
                } else {
                    (a, b)
                }
            })
            .collect();
        Self::new(pairs)
    }

    fn partition(&mut self) {
        self.ties.clear();
        self.lower.clear();
        self.upper.clear();
        for (i, &(a, b)) in self.pairs.iter().enumerate() {
            match Region::of(a, b) {
                Region::Diagonal => self.ties.push(i),
                Region::Lower => self.lower.push(i),
                Region::Upper => self.upper.push(i),
            }
        }
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Indices with `y1 = y2`.
    pub fn ties(&self) -> &[usize] {
        &self.ties
    }

    /// Indices with `y1 < y2`.
    pub fn lower(&self) -> &[usize] {
        &self.lower
    }

    /// Indices with `y1 > y2`.
    pub fn upper(&self) -> &[usize] {
        &self.upper
    }

    /// `(m0, m1, m2)`.
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.ties.len(), self.lower.len(), self.upper.len())
    }

    pub fn first(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn second(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    pub fn maxima(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.0.max(p.1)).collect()
    }
}

/// Observed-data log-likelihood `Σ log f0 + Σ log f1 + Σ log f2`.
///
/// Returns `-inf` if any observation has zero (or unevaluable) density.
pub fn observed_loglik(params: &BglfrpsParams, sample: &BivariateSample) -> f64 {
    let mut total = 0.0;
    for &(a, b) in sample.pairs() {
        match params.joint_ln_pdf(a, b) {
            Ok((_, v)) if !v.is_nan() => total += v,
            _ => return f64::NEG_INFINITY,
        }
        if total == f64::NEG_INFINITY {
            return total;
        }
    }
    total
}
