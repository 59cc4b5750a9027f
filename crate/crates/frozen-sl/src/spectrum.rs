//! Ordered eigenvalue lists and their asymptotic residuals.

use crate::config::{asymptotic_rho, ProblemConfig};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Eigenvalues lambda_1..lambda_N ordered by the index of the nearest
/// asymptotic seed. Complex eigenvalues are allowed throughout; the
/// operator is non-self-adjoint even for real potentials.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
    pub config: ProblemConfig,
}

impl Spectrum {
    pub fn new(values: Vec<Complex64>, config: ProblemConfig) -> Self {
        Self { values, config }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Square root of lambda_n on the branch nearest the asymptotic seed
    /// n - (alpha+beta)/2.
    pub fn rho(&self, n: usize) -> Complex64 {
        let seed = asymptotic_rho(n, &self.config);
        let principal = self.values[n - 1].sqrt();
        if (principal - seed).norm() <= (-principal - seed).norm() {
            principal
        } else {
            -principal
        }
    }

    /// kappa_n = n (sqrt(lambda_n) - (n - (alpha+beta)/2)).
    pub fn residuals(&self) -> Vec<Complex64> {
        (1..=self.len())
            .map(|n| (self.rho(n) - asymptotic_rho(n, &self.config)) * n as f64)
            .collect()
    }

    /// Residuals plus the square-summability heuristic: the partial sum of
    /// |kappa_n|^2 over the last half of the stored range must stay below
    /// `tail_bound`. Membership in l2 is undecidable from finitely many
    /// values, so this is a plausibility flag, never a hard error.
    pub fn residuals_checked(&self, tail_bound: f64) -> Result<(Vec<Complex64>, bool)> {
        if self.is_empty() {
            return Err(Error::InvalidConfig("empty spectrum".into()));
        }
        for (i, v) in self.values.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFiniteEigenvalue { index: i + 1 });
            }
        }
        let residuals = self.residuals();
        let half = self.len() / 2;
        let tail: f64 = residuals[half..].iter().map(|k| k.norm_sqr()).sum();
        Ok((residuals, tail <= tail_bound))
    }
}

/// Default bound for the square-summability heuristic.
pub const DEFAULT_L2_TAIL_BOUND: f64 = 10.0;
