//! The kernel W of the characteristic function's integral representation.
//!
//! W lives on (0, pi) like the potential, but its natural basis depends on
//! the boundary orders: {cos(n t)} when alpha = beta (the kernel pairs with
//! cos(rho t)), {sin((n - 1/2) t)} when alpha != beta (it pairs with
//! sin(rho t)). Both systems are complete over (0, pi) and the modes are
//! exactly what sampling the characteristic function at its unperturbed
//! zeros recovers.

use crate::config::ProblemConfig;
use crate::error::{Error, Result};
use crate::grid::Grid;
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WBasis {
    /// cos(n t), n = 0, 1, 2, ...
    Cos,
    /// sin((n - 1/2) t), n = 1, 2, ...
    HalfIntegerSine,
}

impl WBasis {
    pub fn for_config(cfg: &ProblemConfig) -> Self {
        if cfg.alpha_eq_beta() {
            WBasis::Cos
        } else {
            WBasis::HalfIntegerSine
        }
    }

    /// Evaluate the i-th stored mode (see `WFunction` on indexing) at t.
    fn eval(&self, i: usize, t: f64) -> f64 {
        match self {
            WBasis::Cos => (i as f64 * t).cos(),
            WBasis::HalfIntegerSine => ((i as f64 + 0.5) * t).sin(),
        }
    }

    /// Squared L2(0, pi) norm of the i-th mode.
    fn mode_norm_sqr(&self, i: usize) -> f64 {
        match self {
            WBasis::Cos if i == 0 => PI,
            _ => PI / 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WRep {
    Grid(Vec<Complex64>),
    /// Coefficients in the case's basis. For `Cos`, index i holds the
    /// cos(i t) coefficient (a_0 first); for `HalfIntegerSine`, index i
    /// holds the sin((i + 1/2) t) coefficient.
    Modes(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WFunction {
    pub alpha: u8,
    pub beta: u8,
    pub rep: WRep,
}

impl WFunction {
    pub fn from_grid(cfg: &ProblemConfig, values: Vec<Complex64>) -> Self {
        Self {
            alpha: cfg.alpha,
            beta: cfg.beta,
            rep: WRep::Grid(values),
        }
    }

    pub fn from_modes(cfg: &ProblemConfig, coeffs: Vec<Complex64>) -> Self {
        Self {
            alpha: cfg.alpha,
            beta: cfg.beta,
            rep: WRep::Modes(coeffs),
        }
    }

    pub fn zero(cfg: &ProblemConfig) -> Self {
        Self::from_modes(cfg, vec![])
    }

    pub fn basis(&self) -> WBasis {
        if self.alpha == self.beta {
            WBasis::Cos
        } else {
            WBasis::HalfIntegerSine
        }
    }

    /// Reject use with a config whose boundary orders differ from the tag.
    pub fn check_tag(&self, cfg: &ProblemConfig) -> Result<()> {
        if self.alpha != cfg.alpha || self.beta != cfg.beta {
            return Err(Error::BasisMismatch {
                w_alpha: self.alpha,
                w_beta: self.beta,
                alpha: cfg.alpha,
                beta: cfg.beta,
            });
        }
        Ok(())
    }

    pub fn to_grid(&self, grid: &Grid) -> Result<Vec<Complex64>> {
        match &self.rep {
            WRep::Grid(values) => {
                if values.len() != grid.len() {
                    return Err(Error::GridMismatch {
                        expected: grid.len(),
                        got: values.len(),
                    });
                }
                Ok(values.clone())
            }
            WRep::Modes(coeffs) => {
                let basis = self.basis();
                Ok((0..grid.len())
                    .map(|i| {
                        let t = grid.point(i);
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (m, c) in coeffs.iter().enumerate() {
                            acc += c * basis.eval(m, t);
                        }
                        acc
                    })
                    .collect())
            }
        }
    }

    /// Basis coefficients (n_modes entries past the indexing origin).
    /// Mode input is truncated or padded; grid input is projected by the
    /// midpoint rule, exact for band-limited W.
    pub fn modes(&self, n_modes: usize) -> Result<Vec<Complex64>> {
        let want = match self.basis() {
            WBasis::Cos => n_modes + 1,
            WBasis::HalfIntegerSine => n_modes,
        };
        match &self.rep {
            WRep::Modes(coeffs) => {
                let mut out = coeffs.clone();
                out.resize(want, Complex64::new(0.0, 0.0));
                out.truncate(want);
                Ok(out)
            }
            WRep::Grid(values) => {
                let grid = Grid::from_len(1, values.len())?;
                let basis = self.basis();
                let h = grid.h();
                Ok((0..want)
                    .map(|m| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (i, v) in values.iter().enumerate() {
                            acc += v * basis.eval(m, grid.point(i));
                        }
                        acc * (h / basis.mode_norm_sqr(m))
                    })
                    .collect())
            }
        }
    }

    /// Integral of W over (0, pi). Zero (to tolerance) is required of any
    /// consistent kernel when alpha = beta = 0.
    pub fn mean_integral(&self) -> f64 {
        match &self.rep {
            WRep::Grid(values) => {
                let h = PI / values.len() as f64;
                (values.iter().sum::<Complex64>() * h).norm()
            }
            WRep::Modes(coeffs) => match self.basis() {
                WBasis::Cos => coeffs.first().map_or(0.0, |a0| (a0 * PI).norm()),
                WBasis::HalfIntegerSine => {
                    // integral of sin((m+1/2)t) over (0,pi) is 1/(m+1/2)
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (m, c) in coeffs.iter().enumerate() {
                        acc += c / (m as f64 + 0.5);
                    }
                    acc.norm()
                }
            },
        }
    }

    pub fn l2_norm(&self) -> f64 {
        match &self.rep {
            WRep::Grid(values) => {
                let h = PI / values.len() as f64;
                (h * values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
            }
            WRep::Modes(coeffs) => {
                let basis = self.basis();
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(m, c)| c.norm_sqr() * basis.mode_norm_sqr(m))
                    .sum::<f64>()
                    .sqrt()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cos_modes_roundtrip_through_grid() {
        let cfg = ProblemConfig::new(1, 1, 2).unwrap();
        let coeffs = vec![c(0.2, 0.0), c(1.0, -0.5), c(0.0, 0.3)];
        let w = WFunction::from_modes(&cfg, coeffs.clone());
        let grid = Grid::new(2, 64);
        let wg = WFunction::from_grid(&cfg, w.to_grid(&grid).unwrap());
        let back = wg.modes(2).unwrap();
        for (orig, got) in coeffs.iter().zip(&back) {
            assert!((orig - got).norm() < 1e-12);
        }
    }

    #[test]
    fn half_sine_modes_roundtrip_through_grid() {
        let cfg = ProblemConfig::new(0, 1, 3).unwrap();
        let coeffs = vec![c(1.0, 0.0), c(0.0, -1.0), c(0.25, 0.25)];
        let w = WFunction::from_modes(&cfg, coeffs.clone());
        let grid = Grid::new(3, 64);
        let wg = WFunction::from_grid(&cfg, w.to_grid(&grid).unwrap());
        let back = wg.modes(3).unwrap();
        for (orig, got) in coeffs.iter().zip(back.iter()) {
            assert!((orig - got).norm() < 1e-12);
        }
        assert!(back[2].norm() > 0.1); // stored modes preserved
    }

    #[test]
    fn tag_mismatch_rejected() {
        let cfg01 = ProblemConfig::new(0, 1, 2).unwrap();
        let cfg10 = ProblemConfig::new(1, 0, 2).unwrap();
        let w = WFunction::zero(&cfg01);
        assert!(w.check_tag(&cfg10).is_err());
        assert!(w.check_tag(&cfg01).is_ok());
    }

    #[test]
    fn mean_integral_of_cos_series_is_a0_term() {
        let cfg = ProblemConfig::new(0, 0, 2).unwrap();
        let w = WFunction::from_modes(&cfg, vec![c(0.5, 0.0), c(3.0, 0.0)]);
        assert!((w.mean_integral() - 0.5 * PI).abs() < 1e-14);
    }
}
