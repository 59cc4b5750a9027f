//! Entire-function kernels and small dense linear algebra.
//!
//! The characteristic function and its building blocks are ratios like
//! sin z / z whose removable singularities sit exactly where the root finder
//! and the Fourier sampling want to evaluate them. Each helper here switches
//! to a truncated Taylor series near the singular point so the closed forms
//! stay accurate for every complex argument.

use num_complex::Complex64;

const SERIES_RADIUS: f64 = 0.5;

/// sin z / z, entire.
pub fn csinc(z: Complex64) -> Complex64 {
    if z.norm_sqr() < SERIES_RADIUS * SERIES_RADIUS {
        let w = z * z;
        // 1 - z^2/6 + z^4/120 - z^6/5040 + z^8/362880
        Complex64::new(1.0, 0.0)
            + w * (Complex64::new(-1.0 / 6.0, 0.0)
                + w * (Complex64::new(1.0 / 120.0, 0.0)
                    + w * (Complex64::new(-1.0 / 5040.0, 0.0)
                        + w * Complex64::new(1.0 / 362880.0, 0.0))))
    } else {
        z.sin() / z
    }
}

/// d/dz (sin z / z) = (z cos z - sin z) / z^2, entire.
pub fn csinc_d(z: Complex64) -> Complex64 {
    if z.norm_sqr() < SERIES_RADIUS * SERIES_RADIUS {
        let w = z * z;
        // -z/3 + z^3/30 - z^5/840 + z^7/45360
        z * (Complex64::new(-1.0 / 3.0, 0.0)
            + w * (Complex64::new(1.0 / 30.0, 0.0)
                + w * (Complex64::new(-1.0 / 840.0, 0.0)
                    + w * Complex64::new(1.0 / 45360.0, 0.0))))
    } else {
        (z * z.cos() - z.sin()) / (z * z)
    }
}

/// (1 - cos z) / z, entire.
pub fn vcos(z: Complex64) -> Complex64 {
    if z.norm_sqr() < SERIES_RADIUS * SERIES_RADIUS {
        let w = z * z;
        // z/2 - z^3/24 + z^5/720 - z^7/40320
        z * (Complex64::new(0.5, 0.0)
            + w * (Complex64::new(-1.0 / 24.0, 0.0)
                + w * (Complex64::new(1.0 / 720.0, 0.0)
                    + w * Complex64::new(-1.0 / 40320.0, 0.0))))
    } else {
        (Complex64::new(1.0, 0.0) - z.cos()) / z
    }
}

/// d/dz ((1 - cos z) / z) = (z sin z + cos z - 1) / z^2, entire.
pub fn vcos_d(z: Complex64) -> Complex64 {
    if z.norm_sqr() < SERIES_RADIUS * SERIES_RADIUS {
        let w = z * z;
        // 1/2 - z^2/8 + z^4/144 - z^6/5760 (coefficients (2j+1)/(2j+2)!)
        Complex64::new(0.5, 0.0)
            + w * (Complex64::new(-1.0 / 8.0, 0.0)
                + w * (Complex64::new(1.0 / 144.0, 0.0) + w * Complex64::new(-1.0 / 5760.0, 0.0)))
    } else {
        (z * z.sin() + z.cos() - Complex64::new(1.0, 0.0)) / (z * z)
    }
}

/// (1 - cos z) / z^2, entire.
pub fn ccos(z: Complex64) -> Complex64 {
    if z.norm_sqr() < SERIES_RADIUS * SERIES_RADIUS {
        let w = z * z;
        // 1/2 - z^2/24 + z^4/720 - z^6/40320
        Complex64::new(0.5, 0.0)
            + w * (Complex64::new(-1.0 / 24.0, 0.0)
                + w * (Complex64::new(1.0 / 720.0, 0.0) + w * Complex64::new(-1.0 / 40320.0, 0.0)))
    } else {
        (Complex64::new(1.0, 0.0) - z.cos()) / (z * z)
    }
}

/// LU factorization with partial pivoting for small dense complex systems.
///
/// Used for the k x k main-equation matrix (k is the subinterval count,
/// rarely above 10) and for I + K when the restriction operator is a full
/// matrix on one block.
#[derive(Debug, Clone)]
pub struct ComplexLu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    sign: f64,
}

impl ComplexLu {
    /// Factor a row-major n x n matrix. Returns `None` if a pivot falls below
    /// `tiny` relative to the largest entry (singular to working precision).
    pub fn factor(a: &[Complex64], n: usize) -> Option<Self> {
        assert_eq!(a.len(), n * n);
        let mut lu = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = a.iter().map(|z| z.norm()).fold(0.0_f64, f64::max).max(1.0);
        let tiny = 1e-14 * scale;

        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_mag = lu[col * n + col].norm();
            for row in col + 1..n {
                let mag = lu[row * n + col].norm();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = row;
                }
            }
            if pivot_mag < tiny {
                return None;
            }
            if pivot_row != col {
                for j in 0..n {
                    lu.swap(col * n + j, pivot_row * n + j);
                }
                perm.swap(col, pivot_row);
                sign = -sign;
            }
            let pivot = lu[col * n + col];
            for row in col + 1..n {
                let factor = lu[row * n + col] / pivot;
                lu[row * n + col] = factor;
                for j in col + 1..n {
                    let sub = factor * lu[col * n + j];
                    lu[row * n + j] -= sub;
                }
            }
        }
        Some(Self { n, lu, perm, sign })
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(rhs.len(), self.n);
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| rhs[p]).collect();
        // forward substitution, L has unit diagonal
        for i in 1..n {
            for j in 0..i {
                let sub = self.lu[i * n + j] * x[j];
                x[i] -= sub;
            }
        }
        // back substitution with U
        for i in (0..n).rev() {
            for j in i + 1..n {
                let sub = self.lu[i * n + j] * x[j];
                x[i] -= sub;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    pub fn det(&self) -> Complex64 {
        let mut d = Complex64::new(self.sign, 0.0);
        for i in 0..self.n {
            d *= self.lu[i * self.n + i];
        }
        d
    }
}

/// Exact determinant of a small integer matrix by cofactor expansion.
///
/// Brute force on purpose: it is the independent check for the closed-form
/// determinant of the main-equation matrix, so it must not share any code
/// with it. Fine for n <= 10.
pub fn det_i64_bruteforce(a: &[i64], n: usize) -> i64 {
    assert_eq!(a.len(), n * n);
    if n == 1 {
        return a[0];
    }
    let mut det = 0;
    for col in 0..n {
        if a[col] == 0 {
            continue;
        }
        let mut minor = Vec::with_capacity((n - 1) * (n - 1));
        for row in 1..n {
            for j in 0..n {
                if j != col {
                    minor.push(a[row * n + j]);
                }
            }
        }
        let term = a[col] * det_i64_bruteforce(&minor, n - 1);
        if col % 2 == 0 {
            det += term;
        } else {
            det -= term;
        }
    }
    det
}
