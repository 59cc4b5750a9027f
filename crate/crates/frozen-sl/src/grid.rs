//! Uniform midpoint grid on (0, pi).
//!
//! Samples sit at x_i = (i + 1/2) h with h = pi/(M k), M samples per
//! subinterval ((j-1)a, ja). Midpoints never land on subinterval boundaries,
//! where the piecewise kernel formulas switch branches, and the set of
//! midpoints is closed under every shift t -> t + ja and reflection
//! t -> c - t the block operators use, so those operators act by exact
//! index permutation with no interpolation.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    k: usize,
    per_block: usize,
}

impl Grid {
    pub fn new(k: usize, per_block: usize) -> Self {
        assert!(k >= 1 && per_block >= 1);
        Self { k, per_block }
    }

    /// Grid matching an existing sample vector; its length must be a
    /// multiple of k.
    pub fn from_len(k: usize, len: usize) -> Result<Self> {
        if len == 0 || len % k != 0 {
            return Err(Error::GridMismatch {
                expected: k.max(1) * (len / k.max(1)).max(1),
                got: len,
            });
        }
        Ok(Self {
            k,
            per_block: len / k,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn per_block(&self) -> usize {
        self.per_block
    }

    pub fn len(&self) -> usize {
        self.k * self.per_block
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        PI / self.len() as f64
    }

    /// Midpoint of cell i on (0, pi).
    pub fn point(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h()
    }

    /// Midpoint of cell s of a single block, as a point of (0, a).
    pub fn block_point(&self, s: usize) -> f64 {
        (s as f64 + 0.5) * self.h()
    }

    /// Midpoint-rule L2 norm over (0, pi).
    pub fn l2_norm(&self, values: &[Complex64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        (self.h() * values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Midpoint-rule L2 norm of a single block function on (0, a).
    pub fn block_l2_norm(&self, values: &[Complex64]) -> f64 {
        debug_assert_eq!(values.len(), self.per_block);
        (self.h() * values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Relative L2 distance ||u - v|| / max(||v||, floor).
    pub fn rel_l2_error(&self, u: &[Complex64], v: &[Complex64]) -> f64 {
        debug_assert_eq!(u.len(), v.len());
        let diff: f64 = u
            .iter()
            .zip(v)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>();
        let base: f64 = v.iter().map(|b| b.norm_sqr()).sum::<f64>();
        (diff / base.max(1e-300)).sqrt()
    }
}
