//! The potential q on (0, pi) in its two representations.
//!
//! Exactness-sensitive paths work with the finite cosine series; uniform
//! midpoint samples are for user-supplied raw data and for the block
//! operators, which act on grids by exact index permutation. Conversions:
//! sampling a series is exact, projecting samples onto modes uses the
//! midpoint rule, which integrates trigonometric polynomials exactly as
//! long as the combined frequency stays below twice the sample count.

use crate::error::{Error, Result};
use crate::grid::Grid;
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialRep {
    /// Midpoint samples on (0, pi); length must be a multiple of k.
    Grid(Vec<Complex64>),
    /// Coefficients c_0..c_N of sum c_n cos(n x).
    FourierCos(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub rep: PotentialRep,
    pub norm_hint: Option<f64>,
}

impl Potential {
    pub fn from_grid(values: Vec<Complex64>) -> Self {
        Self {
            rep: PotentialRep::Grid(values),
            norm_hint: None,
        }
    }

    pub fn from_fourier_cos(coeffs: Vec<Complex64>) -> Self {
        Self {
            rep: PotentialRep::FourierCos(coeffs),
            norm_hint: None,
        }
    }

    /// The constant potential q = c.
    pub fn constant(c: Complex64) -> Self {
        Self::from_fourier_cos(vec![c])
    }

    pub fn zero() -> Self {
        Self::from_fourier_cos(vec![Complex64::new(0.0, 0.0)])
    }

    pub fn is_fourier(&self) -> bool {
        matches!(self.rep, PotentialRep::FourierCos(_))
    }

    /// Samples on the given grid. Grid-represented input must match the
    /// resolution exactly; series input is evaluated.
    pub fn to_grid(&self, grid: &Grid) -> Result<Vec<Complex64>> {
        match &self.rep {
            PotentialRep::Grid(values) => {
                if values.len() != grid.len() {
                    return Err(Error::GridMismatch {
                        expected: grid.len(),
                        got: values.len(),
                    });
                }
                Ok(values.clone())
            }
            PotentialRep::FourierCos(coeffs) => Ok((0..grid.len())
                .map(|i| eval_cos_series(coeffs, grid.point(i)))
                .collect()),
        }
    }

    /// Cosine coefficients c_0..c_{n_modes}. Series input is truncated or
    /// zero-padded; grid input is projected by the midpoint rule.
    pub fn fourier_cos(&self, n_modes: usize) -> Result<Vec<Complex64>> {
        match &self.rep {
            PotentialRep::FourierCos(coeffs) => {
                let mut out = coeffs.clone();
                out.resize(n_modes + 1, Complex64::new(0.0, 0.0));
                out.truncate(n_modes + 1);
                Ok(out)
            }
            PotentialRep::Grid(values) => {
                let grid = Grid::from_len(1, values.len())?;
                Ok(project_cos(values, &grid, n_modes))
            }
        }
    }

    /// L2(0, pi) norm; uses the representation directly.
    pub fn l2_norm(&self) -> f64 {
        if let Some(h) = self.norm_hint {
            return h;
        }
        match &self.rep {
            PotentialRep::Grid(values) => {
                let h = PI / values.len() as f64;
                (h * values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
            }
            PotentialRep::FourierCos(coeffs) => {
                let mut s = 0.0;
                for (n, c) in coeffs.iter().enumerate() {
                    s += c.norm_sqr() * if n == 0 { PI } else { PI / 2.0 };
                }
                s.sqrt()
            }
        }
    }
}

pub(crate) fn eval_cos_series(coeffs: &[Complex64], x: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, c) in coeffs.iter().enumerate() {
        acc += c * (n as f64 * x).cos();
    }
    acc
}

/// Midpoint-rule projection of samples onto cos(n x), n = 0..n_modes.
pub(crate) fn project_cos(values: &[Complex64], grid: &Grid, n_modes: usize) -> Vec<Complex64> {
    let h = grid.h();
    (0..=n_modes)
        .map(|n| {
            let weight = if n == 0 { 1.0 / PI } else { 2.0 / PI };
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, v) in values.iter().enumerate() {
                acc += v * (n as f64 * grid.point(i)).cos();
            }
            acc * (h * weight)
        })
        .collect()
}
