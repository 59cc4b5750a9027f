//! Problem configuration and case classification.
//!
//! A problem instance is the triple (alpha, beta, k): boundary-condition
//! orders at 0 and pi, and the integer k with interior point a = pi/k at
//! which the potential term freezes the unknown. Whether the spectrum alone
//! determines the potential splits into six groups by (alpha, beta, k parity).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

/// Boundary orders and frozen point of one boundary value problem.
///
/// `k` is stored; the frozen point `a = pi/k` is always derived so that
/// `a * k == pi` holds exactly in the chosen representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub alpha: u8,
    pub beta: u8,
    pub k: usize,
}

impl ProblemConfig {
    pub fn new(alpha: u8, beta: u8, k: usize) -> Result<Self> {
        if alpha > 1 || beta > 1 {
            return Err(Error::InvalidConfig(format!(
                "alpha and beta must be 0 or 1, got ({alpha},{beta})"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidConfig("k must be a positive integer".into()));
        }
        Ok(Self { alpha, beta, k })
    }

    /// The frozen point a = pi/k.
    pub fn a(&self) -> f64 {
        PI / self.k as f64
    }

    /// Sign b = (-1)^(alpha+beta) appearing on the superdiagonal of the
    /// main-equation matrix.
    pub fn b_sign(&self) -> i64 {
        if (self.alpha + self.beta) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Sign c = (-1)^(1+beta) appearing on the subdiagonal and in the corner.
    pub fn c_sign(&self) -> i64 {
        if (1 + self.beta) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// (-1)^(alpha*beta), the overall sign of the kernel-potential relation.
    pub fn ab_sign(&self) -> f64 {
        if self.alpha * self.beta == 1 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn alpha_eq_beta(&self) -> bool {
        self.alpha == self.beta
    }

    /// Offset (alpha+beta)/2 of the eigenvalue asymptotics.
    pub fn rho_offset(&self) -> f64 {
        (self.alpha + self.beta) as f64 / 2.0
    }

    pub fn classify(&self) -> CaseGroup {
        classify_case(self)
    }

    pub fn is_degenerate(&self) -> bool {
        self.classify().is_degenerate()
    }
}

impl fmt::Display for ProblemConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(alpha={}, beta={}, k={})", self.alpha, self.beta, self.k)
    }
}

/// The six parameter groups. I-III are degenerate (the main equation has a
/// rank-deficient matrix and part of the spectrum is forced), IV-VI are
/// non-degenerate (the spectrum alone determines the potential).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseGroup {
    /// alpha = beta = 0 (any k)
    I,
    /// alpha = 1, beta = 0, k odd
    II,
    /// alpha = beta = 1, k even
    III,
    /// alpha = 0, beta = 1 (any k)
    IV,
    /// alpha = 1, beta = 0, k even
    V,
    /// alpha = beta = 1, k odd
    VI,
}

impl CaseGroup {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, CaseGroup::I | CaseGroup::II | CaseGroup::III)
    }
}

impl fmt::Display for CaseGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, kind) = match self {
            CaseGroup::I => ("i", "degenerate"),
            CaseGroup::II => ("ii", "degenerate"),
            CaseGroup::III => ("iii", "degenerate"),
            CaseGroup::IV => ("iv", "non-degenerate"),
            CaseGroup::V => ("v", "non-degenerate"),
            CaseGroup::VI => ("vi", "non-degenerate"),
        };
        write!(f, "group ({name}), {kind}")
    }
}

/// Classify a configuration into its parameter group.
pub fn classify_case(cfg: &ProblemConfig) -> CaseGroup {
    let k_even = cfg.k % 2 == 0;
    match (cfg.alpha, cfg.beta) {
        (0, 0) => CaseGroup::I,
        (0, 1) => CaseGroup::IV,
        (1, 0) => {
            if k_even {
                CaseGroup::V
            } else {
                CaseGroup::II
            }
        }
        (1, 1) => {
            if k_even {
                CaseGroup::III
            } else {
                CaseGroup::VI
            }
        }
        _ => unreachable!("alpha, beta validated at construction"),
    }
}

/// Leading term n - (alpha+beta)/2 of the n-th eigenvalue's square root.
pub fn asymptotic_rho(n: usize, cfg: &ProblemConfig) -> f64 {
    assert!(n >= 1, "eigenvalue indices start at 1");
    n as f64 - cfg.rho_offset()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(alpha: u8, beta: u8, k: usize) -> ProblemConfig {
        ProblemConfig::new(alpha, beta, k).unwrap()
    }

    #[test]
    fn classification_of_the_six_groups() {
        assert_eq!(classify_case(&cfg(0, 0, 5)), CaseGroup::I);
        assert!(cfg(0, 0, 5).is_degenerate());
        assert_eq!(classify_case(&cfg(0, 1, 3)), CaseGroup::IV);
        assert!(!cfg(0, 1, 3).is_degenerate());
        assert_eq!(classify_case(&cfg(1, 0, 4)), CaseGroup::V);
        assert!(!cfg(1, 0, 4).is_degenerate());
        assert_eq!(classify_case(&cfg(1, 0, 3)), CaseGroup::II);
        assert_eq!(classify_case(&cfg(1, 1, 2)), CaseGroup::III);
        assert_eq!(classify_case(&cfg(1, 1, 3)), CaseGroup::VI);
    }

    #[test]
    fn asymptotic_seeds() {
        assert_eq!(asymptotic_rho(1, &cfg(0, 0, 2)), 1.0);
        assert_eq!(asymptotic_rho(1, &cfg(0, 1, 2)), 0.5);
        assert_eq!(asymptotic_rho(3, &cfg(1, 1, 2)), 2.0);
    }

    #[test]
    fn signs_from_boundary_orders() {
        let c01 = cfg(0, 1, 2);
        assert_eq!((c01.b_sign(), c01.c_sign()), (-1, 1));
        let c00 = cfg(0, 0, 2);
        assert_eq!((c00.b_sign(), c00.c_sign()), (1, -1));
        let c11 = cfg(1, 1, 2);
        assert_eq!((c11.b_sign(), c11.c_sign()), (1, 1));
        let c10 = cfg(1, 0, 2);
        assert_eq!((c10.b_sign(), c10.c_sign()), (-1, -1));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ProblemConfig::new(2, 0, 1).is_err());
        assert!(ProblemConfig::new(0, 0, 0).is_err());
    }
}
