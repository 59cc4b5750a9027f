//! The restriction operator K tying q on (0, a) to q on (a, 2a).
//!
//! In the degenerate cases the spectrum leaves one block of the potential
//! free; imposing q(a - t) = K(q(a + t)) with I + K invertible restores
//! uniqueness. The variants cover the operators the reconstruction
//! algorithms actually invert: the identity (even potentials about a),
//! scalar multiples, constant operators K(f) = p (a priori knowledge of q
//! on (0, a)), and a full matrix acting on block samples.

use crate::error::{Error, Result};
use crate::numeric::ComplexLu;
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub enum FrozenK {
    /// K = I; q even about a. (I + K)^{-1} halves.
    Identity,
    /// K = kappa I with kappa != -1.
    Scalar(Complex64),
    /// K(f) = p for every f; fixes q = p(a - .) on (0, a). I + K maps
    /// f to f + p and is always invertible.
    ConstantFunction(Vec<Complex64>),
    /// K acts on block samples by an M x M matrix; I + K must be
    /// nonsingular, checked at construction.
    Matrix {
        dim: usize,
        entries: Vec<Complex64>,
        i_plus_k: ComplexLu,
    },
}

impl FrozenK {
    pub fn scalar(kappa: Complex64) -> Result<Self> {
        if (kappa + Complex64::new(1.0, 0.0)).norm() < 1e-14 {
            return Err(Error::SingularRestriction);
        }
        Ok(FrozenK::Scalar(kappa))
    }

    pub fn constant(p: Vec<Complex64>) -> Self {
        FrozenK::ConstantFunction(p)
    }

    /// Row-major M x M matrix.
    pub fn matrix(entries: Vec<Complex64>, dim: usize) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::GridMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let mut sum = entries.clone();
        for i in 0..dim {
            sum[i * dim + i] += Complex64::new(1.0, 0.0);
        }
        let lu = ComplexLu::factor(&sum, dim).ok_or(Error::SingularRestriction)?;
        Ok(FrozenK::Matrix {
            dim,
            entries,
            i_plus_k: lu,
        })
    }

    /// Check compatibility with a block of `m` samples.
    pub fn check_block_len(&self, m: usize) -> Result<()> {
        match self {
            FrozenK::Identity | FrozenK::Scalar(_) => Ok(()),
            FrozenK::ConstantFunction(p) => {
                if p.len() == m {
                    Ok(())
                } else {
                    Err(Error::GridMismatch {
                        expected: m,
                        got: p.len(),
                    })
                }
            }
            FrozenK::Matrix { dim, .. } => {
                if *dim == m {
                    Ok(())
                } else {
                    Err(Error::GridMismatch {
                        expected: m,
                        got: *dim,
                    })
                }
            }
        }
    }

    /// Apply K to block samples.
    pub fn apply(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_block_len(f.len())?;
        Ok(match self {
            FrozenK::Identity => f.to_vec(),
            FrozenK::Scalar(kappa) => f.iter().map(|v| v * kappa).collect(),
            FrozenK::ConstantFunction(p) => p.clone(),
            FrozenK::Matrix { dim, entries, .. } => (0..*dim)
                .map(|i| {
                    (0..*dim)
                        .map(|j| entries[i * dim + j] * f[j])
                        .sum::<Complex64>()
                })
                .collect(),
        })
    }

    /// Solve (I + K) g = rhs for g.
    pub fn solve_i_plus_k(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_block_len(rhs.len())?;
        Ok(match self {
            FrozenK::Identity => rhs.iter().map(|v| v * 0.5).collect(),
            FrozenK::Scalar(kappa) => {
                let denom = Complex64::new(1.0, 0.0) + kappa;
                if denom.norm() < 1e-14 {
                    return Err(Error::SingularRestriction);
                }
                rhs.iter().map(|v| v / denom).collect()
            }
            FrozenK::ConstantFunction(p) => rhs.iter().zip(p).map(|(v, pi)| v - pi).collect(),
            FrozenK::Matrix { i_plus_k, .. } => i_plus_k.solve(rhs),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_minus_one_rejected() {
        assert!(FrozenK::scalar(c(-1.0, 0.0)).is_err());
        assert!(FrozenK::scalar(c(2.0, 0.0)).is_ok());
    }

    #[test]
    fn singular_matrix_rejected_at_construction() {
        // K = -I makes I + K = 0
        let m = vec![c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)];
        assert!(FrozenK::matrix(m, 2).is_err());
        let ok = vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)];
        assert!(FrozenK::matrix(ok, 2).is_ok());
    }

    #[test]
    fn solve_inverts_apply_plus_identity() {
        let variants: Vec<FrozenK> = vec![
            FrozenK::Identity,
            FrozenK::scalar(c(0.3, -0.2)).unwrap(),
            FrozenK::constant(vec![c(1.0, 0.0), c(-2.0, 0.5), c(0.0, 1.0)]),
            FrozenK::matrix(
                vec![
                    c(0.1, 0.0),
                    c(0.2, 0.1),
                    c(0.0, 0.0),
                    c(-0.3, 0.0),
                    c(0.4, 0.0),
                    c(0.0, 0.2),
                    c(0.0, 0.0),
                    c(0.1, 0.0),
                    c(0.5, 0.0),
                ],
                3,
            )
            .unwrap(),
        ];
        let g = vec![c(1.0, 0.5), c(-0.7, 0.0), c(0.25, -1.0)];
        for k in &variants {
            let rhs: Vec<Complex64> = g
                .iter()
                .zip(k.apply(&g).unwrap())
                .map(|(gi, kg)| gi + kg)
                .collect();
            let back = k.solve_i_plus_k(&rhs).unwrap();
            for (orig, got) in g.iter().zip(&back) {
                assert!((orig - got).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_function_solution_ignores_input_side() {
        // (I + K) g = g + p, so g = rhs - p regardless of what K sees.
        let p = vec![c(2.0, 0.0), c(0.0, 1.0)];
        let k = FrozenK::constant(p.clone());
        let rhs = vec![c(5.0, 0.0), c(1.0, 1.0)];
        let g = k.solve_i_plus_k(&rhs).unwrap();
        assert!((g[0] - c(3.0, 0.0)).norm() < 1e-15);
        assert!((g[1] - c(1.0, 0.0)).norm() < 1e-15);
    }
}
