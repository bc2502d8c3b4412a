//! Bivariate GLFR law built by trivariate reduction:
//! `Y1 = max(Z1, Z3)`, `Y2 = max(Z2, Z3)` with independent `Z_i ~ GLFR(α_i, β, γ)`.
//!
//! Densities live in [`crate::bglfrps`]; this law is the member with
//! `C(θ) = θ`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::glfr::{GlfrParams, LinearHazard};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BglfrParams {
    pub alpha1: f64,
    pub alpha2: f64,
    /// Shared-shock shape; zero removes the singular component.
    pub alpha3: f64,
    pub hazard: LinearHazard,
}

impl BglfrParams {
    pub fn new(alpha1: f64, alpha2: f64, alpha3: f64, beta: f64, gamma: f64) -> Result<Self> {
        Self::with_hazard(alpha1, alpha2, alpha3, LinearHazard::new(beta, gamma)?)
    }

    pub fn with_hazard(
        alpha1: f64,
        alpha2: f64,
        alpha3: f64,
        hazard: LinearHazard,
    ) -> Result<Self> {
        let ok = |a: f64| a > 0.0 && a.is_finite();
        if !(ok(alpha1) && ok(alpha2) && alpha3 >= 0.0 && alpha3.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "shapes need alpha1, alpha2 > 0 and alpha3 >= 0 (got {alpha1}, {alpha2}, {alpha3})"
            )));
        }
        Ok(Self {
            alpha1,
            alpha2,
            alpha3,
            hazard,
        })
    }

    pub fn alpha_sum(&self) -> f64 {
        self.alpha1 + self.alpha2 + self.alpha3
    }

    /// All three shapes multiplied by `n`: the law of componentwise maxima of
    /// `n` independent pairs.
    pub fn scaled(&self, n: f64) -> Self {
        Self {
            alpha1: self.alpha1 * n,
            alpha2: self.alpha2 * n,
            alpha3: self.alpha3 * n,
            hazard: self.hazard,
        }
    }

    /// Shapes `(a, b)` such that the joint cdf is `F_G(y1; a) F_G(y2; b)` on the
    /// closed region containing `(y1, y2)`.
    pub(crate) fn region_shapes(&self, y1: f64, y2: f64) -> (f64, f64) {
        if y1 <= y2 {
            (self.alpha1 + self.alpha3, self.alpha2)
        } else {
            (self.alpha1, self.alpha2 + self.alpha3)
        }
    }

    /// Log of the joint cdf; `-inf` when either coordinate is zero.
    pub(crate) fn ln_cdf(&self, y1: f64, y2: f64) -> f64 {
        let (a, b) = self.region_shapes(y1, y2);
        let q1 = self.hazard.ln_base_cdf(y1);
        let q2 = self.hazard.ln_base_cdf(y2);
        // 0 * -inf guards: a zero-shape factor contributes nothing.
        let term = |s: f64, q: f64| if s == 0.0 { 0.0 } else { s * q };
        term(a, q1) + term(b, q2)
    }

    pub fn cdf(&self, y1: f64, y2: f64) -> Result<f64> {
        if y1 < 0.0 || y2 < 0.0 || y1.is_nan() || y2.is_nan() {
            return Err(Error::Domain(format!(
                "joint cdf needs nonnegative arguments, got ({y1}, {y2})"
            )));
        }
        Ok(self.ln_cdf(y1, y2).exp())
    }

    /// The univariate law of `Y1`, `Y2`, or `max(Y1, Y2)`.
    pub fn marginal_shape(&self, which: Margin) -> f64 {
        match which {
            Margin::Y1 => self.alpha1 + self.alpha3,
            Margin::Y2 => self.alpha2 + self.alpha3,
            Margin::Max => self.alpha_sum(),
        }
    }

    pub fn marginal(&self, which: Margin) -> GlfrParams {
        GlfrParams {
            alpha: self.marginal_shape(which),
            hazard: self.hazard,
        }
    }

    /// One pair by trivariate reduction. Ties are exact: `Y1 == Y2` exactly when
    /// the shared component dominates.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let draw = |alpha: f64, rng: &mut R| {
            GlfrParams {
                alpha,
                hazard: self.hazard,
            }
            .sample(rng)
        };
        let z1 = draw(self.alpha1, rng);
        let z2 = draw(self.alpha2, rng);
        if self.alpha3 == 0.0 {
            return (z1, z2);
        }
        let z3 = draw(self.alpha3, rng);
        (z1.max(z3), z2.max(z3))
    }
}

/// Selects one of the three univariate functionals of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Margin {
    Y1,
    Y2,
    Max,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fitted() -> BglfrParams {
        BglfrParams::new(0.0921, 0.5722, 1.1519, 9.6187, 2e-4).unwrap()
    }

    #[test]
    fn diagonal_branches_agree() {
        let p = fitted();
        for i in 1..100 {
            let y = i as f64 * 0.01;
            let lower = p.hazard.cdf(p.alpha1 + p.alpha3, y) * p.hazard.cdf(p.alpha2, y);
            let upper = p.hazard.cdf(p.alpha1, y) * p.hazard.cdf(p.alpha2 + p.alpha3, y);
            assert!((lower - upper).abs() < 1e-14);
            let whole = p.hazard.cdf(p.alpha_sum(), y);
            assert!((p.cdf(y, y).unwrap() - whole).abs() < 1e-14);
        }
    }

    #[test]
    fn cdf_matches_product_form() {
        let p = fitted();
        let (y1, y2) = (0.05, 0.10);
        let base = |y: f64| 1.0 - (-9.6187 * y - 1e-4 * y * y).exp();
        let expect = base(y1).powf(0.0921 + 1.1519) * base(y2).powf(0.5722);
        let got = p.cdf(y1, y2).unwrap();
        assert!(got > 0.0 && got < 1.0);
        assert!((got - expect).abs() < 1e-14);
    }

    #[test]
    fn cdf_margin_at_infinity() {
        let p = fitted();
        for i in 1..30 {
            let y = i as f64 * 0.02;
            let m = p.marginal(Margin::Y1).cdf(y).unwrap();
            assert!((p.cdf(y, 1e6).unwrap() - m).abs() < 1e-14);
        }
    }

    #[test]
    fn cdf_rejects_negative() {
        assert!(fitted().cdf(-1.0, 0.1).is_err());
    }

    #[test]
    fn zero_shared_shape_gives_independent_components() {
        let p = BglfrParams::new(0.5, 0.7, 0.0, 1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let (a, b) = p.sample(&mut rng);
            assert_ne!(a, b);
        }
        let f = p.cdf(0.3, 0.9).unwrap();
        let g = p.hazard.cdf(0.5, 0.3) * p.hazard.cdf(0.7, 0.9);
        assert!((f - g).abs() < 1e-15);
    }

    #[test]
    fn sampler_region_frequencies() {
        let p = BglfrParams::new(0.3, 0.5, 0.7, 2.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let (mut ties, mut lower) = (0usize, 0usize);
        for _ in 0..n {
            let (a, b) = p.sample(&mut rng);
            if a == b {
                ties += 1;
            } else if a < b {
                lower += 1;
            }
        }
        let check = |count: usize, prob: f64| {
            let se = (prob * (1.0 - prob) / n as f64).sqrt();
            let freq = count as f64 / n as f64;
            assert!((freq - prob).abs() < 3.0 * se, "{freq} vs {prob}");
        };
        check(ties, p.alpha3 / p.alpha_sum());
        // {Y1 < Y2} = {Z2 > max(Z1, Z3)}.
        check(lower, p.alpha2 / p.alpha_sum());
    }

    #[test]
    fn sampler_matches_joint_cdf() {
        let p = BglfrParams::new(0.3, 0.5, 0.7, 2.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws: Vec<(f64, f64)> = (0..10_000).map(|_| p.sample(&mut rng)).collect();
        let grid = [0.2, 0.5, 1.0];
        for &a in &grid {
            for &b in &grid {
                let emp = draws.iter().filter(|(x, y)| *x <= a && *y <= b).count() as f64
                    / draws.len() as f64;
                assert!((emp - p.cdf(a, b).unwrap()).abs() < 0.02);
            }
        }
    }
}
