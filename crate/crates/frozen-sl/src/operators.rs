//! Block shift/reflection operators, the main-equation matrix, and both
//! directions of the kernel-potential relation.
//!
//! A function on (0, pi) decomposes into k blocks over the subintervals
//! ((j-1)a, ja). Two stackings matter here: `apply_r` collects the blocks
//! counted from the right end with alternating orientation, `apply_q`
//! from the left end. On the midpoint grid both act by exact index
//! permutation, so applying and inverting them is lossless.
//!
//! The kernel W of the characteristic function and the potential q are tied
//! by the constant tridiagonal k x k matrix A:
//!
//!     Q W = (s/2) A R q,      s = (-1)^(alpha beta),
//!
//! which decouples across grid points into k x k linear solves. When A is
//! singular (degenerate groups) the last row plus a restriction operator K
//! fixes the two blocks around the frozen point and a backward recurrence
//! fills the rest.

use crate::config::{CaseGroup, ProblemConfig};
use crate::error::{Error, Result};
use crate::frozen_k::FrozenK;
use crate::grid::Grid;
use crate::numeric::{det_i64_bruteforce, ComplexLu};
use crate::potential::Potential;
use crate::wfunction::WFunction;
use num_complex::Complex64;

/// k block functions on (0, a), all of one resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedVector {
    pub blocks: Vec<Vec<Complex64>>,
}

impl StackedVector {
    pub fn block_len(&self) -> usize {
        self.blocks.first().map_or(0, Vec::len)
    }

    fn check(&self, grid: &Grid) -> Result<()> {
        if self.blocks.len() != grid.k() {
            return Err(Error::BlockCount {
                expected: grid.k(),
                got: self.blocks.len(),
            });
        }
        for b in &self.blocks {
            if b.len() != grid.per_block() {
                return Err(Error::GridMismatch {
                    expected: grid.per_block(),
                    got: b.len(),
                });
            }
        }
        Ok(())
    }
}

/// Sample index of R_m f at block point s: shift for odd m, reflection for
/// even m. The midpoint grid is closed under both maps.
#[inline]
fn r_source(k: usize, m: usize, per_block: usize, s: usize) -> usize {
    debug_assert!((1..=k).contains(&m));
    if m % 2 == 1 {
        (k - m) * per_block + s
    } else {
        (k - m + 1) * per_block - 1 - s
    }
}

/// Sample index of Q_m f at block point s.
#[inline]
fn q_source(m: usize, per_block: usize, s: usize) -> usize {
    if m % 2 == 1 {
        (m - 1) * per_block + s
    } else {
        m * per_block - 1 - s
    }
}

pub fn apply_r_component(f: &[Complex64], m: usize, grid: &Grid) -> Result<Vec<Complex64>> {
    if f.len() != grid.len() {
        return Err(Error::GridMismatch {
            expected: grid.len(),
            got: f.len(),
        });
    }
    let mm = grid.per_block();
    Ok((0..mm)
        .map(|s| f[r_source(grid.k(), m, mm, s)])
        .collect())
}

pub fn apply_q_component(f: &[Complex64], m: usize, grid: &Grid) -> Result<Vec<Complex64>> {
    if f.len() != grid.len() {
        return Err(Error::GridMismatch {
            expected: grid.len(),
            got: f.len(),
        });
    }
    let mm = grid.per_block();
    Ok((0..mm).map(|s| f[q_source(m, mm, s)]).collect())
}

pub fn apply_r(f: &[Complex64], grid: &Grid) -> Result<StackedVector> {
    let blocks = (1..=grid.k())
        .map(|m| apply_r_component(f, m, grid))
        .collect::<Result<_>>()?;
    Ok(StackedVector { blocks })
}

pub fn apply_q(f: &[Complex64], grid: &Grid) -> Result<StackedVector> {
    let blocks = (1..=grid.k())
        .map(|m| apply_q_component(f, m, grid))
        .collect::<Result<_>>()?;
    Ok(StackedVector { blocks })
}

pub fn invert_r(v: &StackedVector, grid: &Grid) -> Result<Vec<Complex64>> {
    v.check(grid)?;
    let mm = grid.per_block();
    let mut f = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (idx, block) in v.blocks.iter().enumerate() {
        let m = idx + 1;
        for (s, val) in block.iter().enumerate() {
            f[r_source(grid.k(), m, mm, s)] = *val;
        }
    }
    Ok(f)
}

pub fn invert_q(v: &StackedVector, grid: &Grid) -> Result<Vec<Complex64>> {
    v.check(grid)?;
    let mm = grid.per_block();
    let mut f = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (idx, block) in v.blocks.iter().enumerate() {
        let m = idx + 1;
        for (s, val) in block.iter().enumerate() {
            f[q_source(m, mm, s)] = *val;
        }
    }
    Ok(f)
}

/// The constant k x k matrix of the main equation. For k > 1 it is
/// tridiagonal with 1 and c in the corners, b on the superdiagonal and c on
/// the subdiagonal; for k = 1 it collapses to the scalar 2 delta_{1,beta}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AMatrix {
    pub k: usize,
    pub b: i64,
    pub c: i64,
    scalar_k1: i64,
}

impl AMatrix {
    pub fn for_config(cfg: &ProblemConfig) -> Self {
        // 2 (-1)^(alpha(beta+1)) delta_{1,beta}; the sign is +1 whenever the
        // delta survives, since beta = 1 makes the exponent even.
        let scalar_k1 = if cfg.beta == 1 { 2 } else { 0 };
        Self {
            k: cfg.k,
            b: cfg.b_sign(),
            c: cfg.c_sign(),
            scalar_k1,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        if self.k == 1 {
            return self.scalar_k1;
        }
        let k = self.k;
        if i == 0 && j == 0 {
            1
        } else if i == k - 1 && j == k - 1 {
            self.c
        } else if j == i + 1 {
            self.b
        } else if j + 1 == i {
            self.c
        } else {
            0
        }
    }

    pub fn dense_i64(&self) -> Vec<i64> {
        let k = self.k;
        (0..k * k).map(|p| self.entry(p / k, p % k)).collect()
    }

    pub fn dense_complex(&self) -> Vec<Complex64> {
        self.dense_i64()
            .into_iter()
            .map(|v| Complex64::new(v as f64, 0.0))
            .collect()
    }

    /// Closed-form determinant, exact in integer arithmetic.
    pub fn det_closed(&self) -> i64 {
        let (k, b, c) = (self.k, self.b, self.c);
        if k == 1 {
            return self.scalar_k1;
        }
        if k % 2 == 1 {
            (-b * c).pow(((k - 1) / 2) as u32) * (1 + c)
        } else {
            (-b).pow((k / 2 - 1) as u32) * c.pow((k / 2) as u32) * (1 - b)
        }
    }

    /// Cofactor-expansion determinant; the independent check.
    pub fn det_bruteforce(&self) -> i64 {
        det_i64_bruteforce(&self.dense_i64(), self.k)
    }
}

pub fn build_a(cfg: &ProblemConfig) -> AMatrix {
    AMatrix::for_config(cfg)
}

pub fn det_a_closed(cfg: &ProblemConfig) -> i64 {
    AMatrix::for_config(cfg).det_closed()
}

/// Kernel from potential through the stacked route: assemble R q, multiply
/// by A row-wise, undo the Q stacking.
pub fn w_from_potential_matrix(q: &Potential, cfg: &ProblemConfig, grid: &Grid) -> Result<WFunction> {
    let qg = q.to_grid(grid)?;
    let rq = apply_r(&qg, grid)?;
    let a = AMatrix::for_config(cfg);
    let pref = 0.5 * cfg.ab_sign();
    let k = grid.k();
    let mm = grid.per_block();
    let mut blocks = Vec::with_capacity(k);
    for i in 0..k {
        let mut row = vec![Complex64::new(0.0, 0.0); mm];
        for j in 0..k {
            let e = a.entry(i, j);
            if e == 0 {
                continue;
            }
            let ef = e as f64;
            for (s, r) in row.iter_mut().enumerate() {
                *r += rq.blocks[j][s] * ef;
            }
        }
        for r in row.iter_mut() {
            *r *= pref;
        }
        blocks.push(row);
    }
    let w = invert_q(&StackedVector { blocks }, grid)?;
    Ok(WFunction::from_grid(cfg, w))
}

/// Kernel from potential through the three-band formula. Must agree with
/// the matrix route pointwise; keeping both is the cross-check.
pub fn w_from_potential_piecewise(
    q: &Potential,
    cfg: &ProblemConfig,
    grid: &Grid,
) -> Result<WFunction> {
    let qg = q.to_grid(grid)?;
    let pref = 0.5 * cfg.ab_sign();
    let k = grid.k();
    let mm = grid.per_block();
    let n = grid.len();
    let mut w = vec![Complex64::new(0.0, 0.0); n];

    if k == 1 {
        let a = AMatrix::for_config(cfg);
        let scale = pref * a.entry(0, 0) as f64;
        for (wi, qi) in w.iter_mut().zip(&qg) {
            *wi = qi * scale;
        }
        return Ok(WFunction::from_grid(cfg, w));
    }

    let b = cfg.b_sign() as f64;
    let c = cfg.c_sign() as f64;
    for (i, wi) in w.iter_mut().enumerate() {
        *wi = if i < mm {
            // (0, a): q((k-1)a + t) + b q((k-1)a - t)
            (qg[(k - 1) * mm + i] + qg[(k - 1) * mm - 1 - i] * b) * pref
        } else if i < (k - 1) * mm {
            // (a, (k-1)a): c q((k+1)a - t) + b q((k-1)a - t)
            (qg[(k + 1) * mm - 1 - i] * c + qg[(k - 1) * mm - 1 - i] * b) * pref
        } else {
            // ((k-1)a, pi): c (q((k+1)a - t) + q(t - (k-1)a))
            (qg[(k + 1) * mm - 1 - i] + qg[i - (k - 1) * mm]) * (pref * c)
        };
    }
    Ok(WFunction::from_grid(cfg, w))
}

/// Unique solve of the main equation in the non-degenerate groups:
/// q = R^{-1} A^{-1} (2 (-1)^(alpha beta)) Q W, one k x k solve per grid
/// point against a single LU factorization of A.
pub fn solve_main_nondegenerate(
    w: &WFunction,
    cfg: &ProblemConfig,
    grid: &Grid,
) -> Result<Potential> {
    w.check_tag(cfg)?;
    if cfg.is_degenerate() {
        return Err(Error::RequiresNonDegenerate);
    }
    let wg = w.to_grid(grid)?;
    let qw = apply_q(&wg, grid)?;
    let scale = 2.0 * cfg.ab_sign();
    let k = grid.k();
    let a = AMatrix::for_config(cfg);
    let lu = ComplexLu::factor(&a.dense_complex(), k).ok_or(Error::RequiresNonDegenerate)?;

    let mm = grid.per_block();
    let mut blocks = vec![vec![Complex64::new(0.0, 0.0); mm]; k];
    let mut rhs = vec![Complex64::new(0.0, 0.0); k];
    for s in 0..mm {
        for j in 0..k {
            rhs[j] = qw.blocks[j][s] * scale;
        }
        let x = lu.solve(&rhs);
        for (j, xj) in x.into_iter().enumerate() {
            blocks[j][s] = xj;
        }
    }
    let q = invert_r(&StackedVector { blocks }, grid)?;
    Ok(Potential::from_grid(q))
}

/// Per-case sign weights of the kernel identity that characterizes
/// degenerate kernels: sum_m s_m Q_m W = 0 on (0, a).
fn degeneration_signs(group: CaseGroup, k: usize) -> Vec<f64> {
    (1..=k)
        .map(|m| match group {
            CaseGroup::I => 1.0,
            CaseGroup::II => {
                if m % 2 == 1 {
                    // odd m = 2j+1 carries (-1)^j
                    if ((m - 1) / 2) % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    // even m = 2j carries -(-1)^j
                    if (m / 2) % 2 == 0 {
                        -1.0
                    } else {
                        1.0
                    }
                }
            }
            CaseGroup::III => {
                if m % 2 == 1 {
                    if ((m - 1) / 2) % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                } else if (m / 2) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            _ => unreachable!("non-degenerate group has no degeneration identity"),
        })
        .collect()
}

/// L2(0, a) norm of the case's kernel identity. Zero (to tolerance) for any
/// kernel produced from an actual potential in a degenerate group.
pub fn degeneration_residual(w: &WFunction, cfg: &ProblemConfig, grid: &Grid) -> Result<f64> {
    w.check_tag(cfg)?;
    let group = cfg.classify();
    if !group.is_degenerate() {
        return Err(Error::RequiresDegenerate);
    }
    let wg = w.to_grid(grid)?;
    let signs = degeneration_signs(group, grid.k());
    let mm = grid.per_block();
    let mut acc = vec![Complex64::new(0.0, 0.0); mm];
    for (m, sign) in signs.iter().enumerate() {
        for (s, a) in acc.iter_mut().enumerate() {
            *a += wg[q_source(m + 1, mm, s)] * *sign;
        }
    }
    Ok(grid.block_l2_norm(&acc))
}

/// How the free block of a degenerate solve is pinned down.
#[derive(Debug, Clone)]
pub enum DegenerateClosure {
    /// q(a - t) = K(q(a + t)): fix the two blocks around the frozen point
    /// from the last stacked row, then march backward.
    Restriction(FrozenK),
    /// Prescribe q directly on subinterval (segment a, (segment+1) a) and
    /// chain through the rows of the rank-(k-1) system. Segment 0 with
    /// values p(a - .) reproduces the constant-operator restriction.
    FreeBlock {
        segment: usize,
        values: Vec<Complex64>,
    },
}

/// Solve the main equation in a degenerate group. The kernel must satisfy
/// its degeneration identity (checked, relative tolerance `deg_tol_rel`);
/// the closure supplies the one free block the spectrum cannot see.
pub fn solve_main_degenerate(
    w: &WFunction,
    cfg: &ProblemConfig,
    grid: &Grid,
    closure: &DegenerateClosure,
    deg_tol_rel: f64,
) -> Result<Potential> {
    w.check_tag(cfg)?;
    if !cfg.is_degenerate() {
        return Err(Error::RequiresDegenerate);
    }
    if cfg.k < 2 {
        return Err(Error::TrivialSubdivision);
    }
    let wg = w.to_grid(grid)?;
    let scale = grid.l2_norm(&wg).max(1.0);
    let residual = degeneration_residual(w, cfg, grid)?;
    if residual > deg_tol_rel * scale {
        return Err(Error::DegenerationResidual {
            residual,
            tol: deg_tol_rel * scale,
        });
    }

    match closure {
        DegenerateClosure::Restriction(k_op) => solve_degenerate_restriction(&wg, cfg, grid, k_op),
        DegenerateClosure::FreeBlock { segment, values } => {
            solve_degenerate_free_block(&wg, cfg, grid, *segment, values)
        }
    }
}

/// Continuation constant multiplying W(pi + a - x) in every row of the
/// stacked system: 2 c (-1)^(alpha beta).
fn kappa_w(cfg: &ProblemConfig) -> f64 {
    2.0 * cfg.c_sign() as f64 * cfg.ab_sign()
}

fn solve_degenerate_restriction(
    wg: &[Complex64],
    cfg: &ProblemConfig,
    grid: &Grid,
    k_op: &FrozenK,
) -> Result<Potential> {
    let k = grid.k();
    let mm = grid.per_block();
    k_op.check_block_len(mm)?;
    let kw = kappa_w(cfg);

    // Last stacked row in x-coordinates: q(a+x) + q(a-x) = kw * W(pi - x).
    let rhs: Vec<Complex64> = (0..mm).map(|s| wg[k * mm - 1 - s] * kw).collect();
    // With q(a-x) = K(q(a+x)): (I + K) q(a+x) = rhs.
    let upper = k_op.solve_i_plus_k(&rhs)?;

    let mut q = vec![Complex64::new(0.0, 0.0); grid.len()];
    for s in 0..mm {
        q[mm + s] = upper[s];
        q[mm - 1 - s] = rhs[s] - upper[s];
    }
    march_outward(&mut q, wg, cfg, grid, 2);
    Ok(Potential::from_grid(q))
}

/// Fill blocks `from_segment..k` by the backward recurrence of the stacked
/// rows, rewritten as a forward march in x:
/// q(x) = kw W(pi + a - x) + (-1)^alpha q(x - 2a) on (sa, (s+1)a).
fn march_outward(
    q: &mut [Complex64],
    wg: &[Complex64],
    cfg: &ProblemConfig,
    grid: &Grid,
    from_segment: usize,
) {
    let k = grid.k();
    let mm = grid.per_block();
    let kw = kappa_w(cfg);
    let kq = if cfg.alpha == 0 { 1.0 } else { -1.0 };
    for seg in from_segment.max(2)..k {
        for i in seg * mm..(seg + 1) * mm {
            q[i] = wg[(k + 1) * mm - 1 - i] * kw + q[i - 2 * mm] * kq;
        }
    }
}

fn solve_degenerate_free_block(
    wg: &[Complex64],
    cfg: &ProblemConfig,
    grid: &Grid,
    segment: usize,
    values: &[Complex64],
) -> Result<Potential> {
    let k = grid.k();
    let mm = grid.per_block();
    if segment >= k {
        return Err(Error::FreeBlockOutOfRange { index: segment, k });
    }
    if values.len() != mm {
        return Err(Error::GridMismatch {
            expected: mm,
            got: values.len(),
        });
    }

    // Stacked rows: y_m = 2 (-1)^(alpha beta) Q_m W.
    let scale = 2.0 * cfg.ab_sign();
    let y: Vec<Vec<Complex64>> = (1..=k)
        .map(|m| {
            (0..mm)
                .map(|s| wg[q_source(m, mm, s)] * scale)
                .collect::<Vec<_>>()
        })
        .collect();
    let b = Complex64::new(cfg.b_sign() as f64, 0.0);
    let c = Complex64::new(cfg.c_sign() as f64, 0.0);

    // Column m of the system holds block R_m q, which lives on segment k - m
    // (reversed in x for even m).
    let m0 = k - segment;
    let mut x: Vec<Option<Vec<Complex64>>> = vec![None; k + 1];
    let seg_to_block = |seg_values: &[Complex64], m: usize| -> Vec<Complex64> {
        if m % 2 == 1 {
            seg_values.to_vec()
        } else {
            seg_values.iter().rev().copied().collect()
        }
    };
    x[m0] = Some(seg_to_block(values, m0));

    // Interior row j (2..k-1): c x_{j-1} + b x_{j+1} = y_j, so within one
    // parity chain each known block determines its neighbours two away.
    let combine = |y_row: &[Complex64], known: &[Complex64], coeff_known: Complex64, coeff_out: Complex64| {
        y_row
            .iter()
            .zip(known)
            .map(|(yv, xv)| (yv - coeff_known * xv) / coeff_out)
            .collect::<Vec<_>>()
    };
    let fill_chain = |x: &mut Vec<Option<Vec<Complex64>>>, start: usize| {
        let mut j = start;
        while j + 2 <= k && j + 1 <= k - 1 && j + 1 >= 2 {
            let next = combine(&y[j], x[j].as_ref().unwrap(), c, b);
            x[j + 2] = Some(next);
            j += 2;
        }
        let mut j = start;
        while j >= 3 {
            // row j-1 is interior because j-1 >= 2
            let prev = combine(&y[j - 2], x[j].as_ref().unwrap(), b, c);
            x[j - 2] = Some(prev);
            j -= 2;
        }
    };
    fill_chain(&mut x, m0);

    if k >= 2 {
        // Cross to the other parity chain through row 1 (x_1 + b x_2 = y_1).
        if x[1].is_some() && x[2].is_none() {
            let x2 = combine(&y[0], x[1].as_ref().unwrap(), Complex64::new(1.0, 0.0), b);
            x[2] = Some(x2);
            fill_chain(&mut x, 2);
        } else if x[2].is_some() && x[1].is_none() {
            let x1: Vec<Complex64> = y[0]
                .iter()
                .zip(x[2].as_ref().unwrap())
                .map(|(yv, xv)| yv - b * xv)
                .collect();
            x[1] = Some(x1);
            fill_chain(&mut x, 1);
        }
    }

    let mut blocks = Vec::with_capacity(k);
    for (m, xm) in x.into_iter().enumerate().skip(1) {
        blocks.push(xm.ok_or(Error::FreeBlockOutOfRange { index: m, k })?);
    }
    let q = invert_r(&StackedVector { blocks }, grid)?;
    Ok(Potential::from_grid(q))
}

/// Recover q on (0, a) from the kernel in the non-degenerate groups by the
/// case's finite reflection sum.
pub fn first_block_from_w(
    w: &WFunction,
    cfg: &ProblemConfig,
    grid: &Grid,
) -> Result<Vec<Complex64>> {
    w.check_tag(cfg)?;
    let group = cfg.classify();
    if group.is_degenerate() {
        return Err(Error::RequiresNonDegenerate);
    }
    let wg = w.to_grid(grid)?;
    let k = grid.k();
    let mm = grid.per_block();
    let mut q0 = vec![Complex64::new(0.0, 0.0); mm];
    match group {
        CaseGroup::IV if k % 2 == 1 => {
            for (s, q) in q0.iter_mut().enumerate() {
                let mut acc = wg[s];
                for j in 1..=(k - 1) / 2 {
                    acc += wg[2 * j * mm + s] - wg[2 * j * mm - 1 - s];
                }
                *q = acc;
            }
        }
        CaseGroup::IV => {
            for (s, q) in q0.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 1..=k / 2 {
                    acc += wg[(2 * j - 1) * mm + s] - wg[(2 * j - 1) * mm - 1 - s];
                }
                *q = acc;
            }
        }
        CaseGroup::V => {
            for (s, q) in q0.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 1..=k / 2 {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    let base = (k + 1 - 2 * j) * mm;
                    acc += (wg[base - 1 - s] + wg[base + s]) * sign;
                }
                *q = acc;
            }
        }
        CaseGroup::VI => {
            let outer = if ((k + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            for (s, q) in q0.iter_mut().enumerate() {
                let mut acc = wg[s];
                for j in 1..=(k - 1) / 2 {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    acc += (wg[2 * j * mm + s] + wg[2 * j * mm - 1 - s]) * sign;
                }
                *q = acc * outer;
            }
        }
        _ => unreachable!(),
    }
    Ok(q0)
}

/// Non-degenerate solve that never touches A: first block from the
/// reflection sum, block (a, 2a) from the last stacked row, the rest by the
/// forward march. Output equals `solve_main_nondegenerate` pointwise.
pub fn potential_from_w_marching(
    w: &WFunction,
    cfg: &ProblemConfig,
    grid: &Grid,
) -> Result<Potential> {
    let q0 = first_block_from_w(w, cfg, grid)?;
    let wg = w.to_grid(grid)?;
    let k = grid.k();
    let mm = grid.per_block();
    let mut q = vec![Complex64::new(0.0, 0.0); grid.len()];
    q[..mm].copy_from_slice(&q0);
    if k > 1 {
        let kw = kappa_w(cfg);
        for i in mm..2 * mm {
            q[i] = wg[(k + 1) * mm - 1 - i] * kw - q[2 * mm - 1 - i];
        }
        march_outward(&mut q, &wg, cfg, grid, 2);
    }
    Ok(Potential::from_grid(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg(alpha: u8, beta: u8, k: usize) -> ProblemConfig {
        ProblemConfig::new(alpha, beta, k).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn identity_samples(grid: &Grid) -> Vec<Complex64> {
        (0..grid.len()).map(|i| c(grid.point(i))).collect()
    }

    #[test]
    fn shift_and_reflection_components_on_identity_function() {
        let grid = Grid::new(2, 16);
        let f = identity_samples(&grid);
        let a = PI / 2.0;
        // R_1 f(t) = f(t + a), R_2 f(t) = f(a - t)
        let r1 = apply_r_component(&f, 1, &grid).unwrap();
        let r2 = apply_r_component(&f, 2, &grid).unwrap();
        for s in 0..grid.per_block() {
            let t = grid.block_point(s);
            assert!((r1[s] - c(t + a)).norm() < 1e-14);
            assert!((r2[s] - c(a - t)).norm() < 1e-14);
        }
        // Q_1 = identity, Q_2 f(t) = f(2a - t) = f(pi - t)
        let q1 = apply_q_component(&f, 1, &grid).unwrap();
        let q2 = apply_q_component(&f, 2, &grid).unwrap();
        for s in 0..grid.per_block() {
            let t = grid.block_point(s);
            assert!((q1[s] - c(t)).norm() < 1e-14);
            assert!((q2[s] - c(PI - t)).norm() < 1e-14);
        }
    }

    #[test]
    fn q3_is_a_shift_for_k_3() {
        let grid = Grid::new(3, 32);
        let f: Vec<Complex64> = (0..grid.len()).map(|i| c(grid.point(i).cos())).collect();
        let q3 = apply_q_component(&f, 3, &grid).unwrap();
        let a = PI / 3.0;
        for s in 0..grid.per_block() {
            let t = grid.block_point(s);
            assert!((q3[s] - c((t + 2.0 * a).cos())).norm() < 1e-14);
        }
    }

    #[test]
    fn k_equals_one_components_are_identity() {
        let grid = Grid::new(1, 16);
        let f = identity_samples(&grid);
        assert_eq!(apply_r_component(&f, 1, &grid).unwrap(), f);
        assert_eq!(apply_q_component(&f, 1, &grid).unwrap(), f);
    }

    #[test]
    fn stacking_roundtrips_exactly() {
        for k in [1usize, 2, 3, 5] {
            let grid = Grid::new(k, 8);
            let f: Vec<Complex64> = (0..grid.len())
                .map(|i| Complex64::new((i * 7 % 13) as f64, (i * 3 % 5) as f64))
                .collect();
            assert_eq!(invert_r(&apply_r(&f, &grid).unwrap(), &grid).unwrap(), f);
            assert_eq!(invert_q(&apply_q(&f, &grid).unwrap(), &grid).unwrap(), f);
        }
    }

    #[test]
    fn wrong_block_count_rejected() {
        let grid = Grid::new(3, 8);
        let v = StackedVector {
            blocks: vec![vec![c(0.0); 8]; 2],
        };
        assert!(matches!(
            invert_r(&v, &grid),
            Err(Error::BlockCount { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn a_matrix_examples() {
        let a = AMatrix::for_config(&cfg(0, 1, 2));
        assert_eq!(a.dense_i64(), vec![1, -1, 1, 1]);
        assert_eq!(AMatrix::for_config(&cfg(0, 0, 1)).entry(0, 0), 0);
        assert_eq!(AMatrix::for_config(&cfg(1, 0, 1)).entry(0, 0), 0);
        assert_eq!(AMatrix::for_config(&cfg(0, 1, 1)).entry(0, 0), 2);
        assert_eq!(AMatrix::for_config(&cfg(1, 1, 1)).entry(0, 0), 2);
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(det_a_closed(&cfg(0, 0, 3)), 0);
        assert_eq!(det_a_closed(&cfg(0, 1, 2)), 2);
        assert_eq!(det_a_closed(&cfg(1, 1, 3)), -2);
        // brute force agreement on the examples
        assert_eq!(AMatrix::for_config(&cfg(0, 1, 2)).det_bruteforce(), 2);
        assert_eq!(AMatrix::for_config(&cfg(1, 1, 3)).det_bruteforce(), -2);
    }

    #[test]
    fn kernel_of_constant_potential_is_square_wave() {
        let grid = Grid::new(2, 32);
        let config = cfg(0, 0, 2);
        let q = Potential::constant(c(1.0));
        let w = w_from_potential_matrix(&q, &config, &grid).unwrap();
        let wg = w.to_grid(&grid).unwrap();
        for (i, v) in wg.iter().enumerate() {
            let expected = if i < grid.per_block() { 1.0 } else { -1.0 };
            assert!((v - c(expected)).norm() < 1e-14, "sample {i}");
        }
        let wp = w_from_potential_piecewise(&q, &config, &grid).unwrap();
        assert_eq!(wp.to_grid(&grid).unwrap(), wg);
    }

    #[test]
    fn kernel_of_zero_potential_vanishes() {
        let grid = Grid::new(3, 16);
        let config = cfg(1, 0, 3);
        let w = w_from_potential_matrix(&Potential::zero(), &config, &grid).unwrap();
        assert!(w.l2_norm() < 1e-15);
    }

    #[test]
    fn kernel_for_k_1_is_scaled_potential() {
        // beta = 1, k = 1: A = 2, so W = (-1)^(alpha beta) q.
        let grid = Grid::new(1, 64);
        let q = Potential::from_fourier_cos(vec![c(0.0), c(1.0)]); // cos x
        let w01 = w_from_potential_piecewise(&q, &cfg(0, 1, 1), &grid).unwrap();
        let w11 = w_from_potential_matrix(&q, &cfg(1, 1, 1), &grid).unwrap();
        let qg = q.to_grid(&grid).unwrap();
        let w01g = w01.to_grid(&grid).unwrap();
        let w11g = w11.to_grid(&grid).unwrap();
        for i in 0..grid.len() {
            assert!((w01g[i] - qg[i]).norm() < 1e-14);
            assert!((w11g[i] + qg[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn main_equation_solve_roundtrips() {
        let config = cfg(1, 1, 3);
        let grid = Grid::new(3, 24);
        let q = Potential::from_fourier_cos(vec![
            c(0.4),
            Complex64::new(-0.3, 0.2),
            c(0.1),
            Complex64::new(0.0, -0.5),
        ]);
        let w = w_from_potential_matrix(&q, &config, &grid).unwrap();
        let back = solve_main_nondegenerate(&w, &config, &grid).unwrap();
        let qg = q.to_grid(&grid).unwrap();
        let bg = back.to_grid(&grid).unwrap();
        for (orig, got) in qg.iter().zip(&bg) {
            assert!((orig - got).norm() < 1e-12);
        }
    }

    #[test]
    fn main_equation_solve_rejects_degenerate_config() {
        let config = cfg(0, 0, 2);
        let grid = Grid::new(2, 8);
        let w = WFunction::from_grid(&config, vec![c(0.0); grid.len()]);
        assert!(matches!(
            solve_main_nondegenerate(&w, &config, &grid),
            Err(Error::RequiresNonDegenerate)
        ));
    }

    #[test]
    fn degeneration_residual_vanishes_for_produced_kernels() {
        for config in [cfg(0, 0, 3), cfg(1, 0, 3), cfg(1, 1, 4)] {
            let grid = Grid::new(config.k, 16);
            let q = Potential::from_fourier_cos(vec![
                Complex64::new(0.3, -0.1),
                c(1.0),
                Complex64::new(-0.2, 0.4),
            ]);
            let w = w_from_potential_matrix(&q, &config, &grid).unwrap();
            let r = degeneration_residual(&w, &config, &grid).unwrap();
            assert!(r < 1e-12, "{config}: residual {r}");
        }
    }

    #[test]
    fn degeneration_residual_detects_pure_comb_mode() {
        // W = cos(k t) violates the identity with residual k ||cos kt||.
        let config = cfg(0, 0, 2);
        let grid = Grid::new(2, 64);
        let wg: Vec<Complex64> = (0..grid.len())
            .map(|i| c((2.0 * grid.point(i)).cos()))
            .collect();
        let w = WFunction::from_grid(&config, wg);
        let r = degeneration_residual(&w, &config, &grid).unwrap();
        let expected = 2.0 * (PI / 4.0).sqrt(); // k sqrt(a/2) = sqrt(pi)
        assert!((r - expected).abs() < 1e-12, "{r} vs {expected}");
    }

    #[test]
    fn degeneration_residual_rejects_nondegenerate_config() {
        let config = cfg(0, 1, 2);
        let grid = Grid::new(2, 8);
        let w = WFunction::zero(&config);
        assert!(matches!(
            degeneration_residual(&w, &config, &grid),
            Err(Error::RequiresDegenerate)
        ));
    }

    #[test]
    fn degenerate_solve_recovers_even_potential_with_identity_restriction() {
        let config = cfg(0, 0, 2);
        let grid = Grid::new(2, 32);
        // even about a = pi/2: cosine modes with index divisible by k
        let q = Potential::from_fourier_cos(vec![c(1.0), c(0.0), c(-0.7), c(0.0), c(0.3)]);
        let w = w_from_potential_matrix(&q, &config, &grid).unwrap();
        let solved = solve_main_degenerate(
            &w,
            &config,
            &grid,
            &DegenerateClosure::Restriction(FrozenK::Identity),
            1e-8,
        )
        .unwrap();
        let qg = q.to_grid(&grid).unwrap();
        let sg = solved.to_grid(&grid).unwrap();
        for (orig, got) in qg.iter().zip(&sg) {
            assert!((orig - got).norm() < 1e-12);
        }
    }

    #[test]
    fn degenerate_solve_zero_kernel_identity_restriction_gives_zero() {
        let config = cfg(1, 1, 2);
        let grid = Grid::new(2, 16);
        let w = WFunction::from_grid(&config, vec![c(0.0); grid.len()]);
        let solved = solve_main_degenerate(
            &w,
            &config,
            &grid,
            &DegenerateClosure::Restriction(FrozenK::Identity),
            1e-8,
        )
        .unwrap();
        assert!(solved.l2_norm() < 1e-14);
    }

    #[test]
    fn degenerate_solve_constant_restriction_pins_first_block() {
        // q with q = p(a - .) on (0, a); K(f) = p recovers exactly that q.
        let config = cfg(0, 0, 3);
        let grid = Grid::new(3, 16);
        let mm = grid.per_block();
        let q = Potential::from_fourier_cos(vec![
            Complex64::new(0.2, 0.1),
            c(0.8),
            Complex64::new(-0.4, 0.3),
        ]);
        let qg = q.to_grid(&grid).unwrap();
        // p(x) = q(a - x) on the block grid: p[s] = q[mm - 1 - s]
        let p: Vec<Complex64> = (0..mm).map(|s| qg[mm - 1 - s]).collect();
        let w = w_from_potential_matrix(&q, &config, &grid).unwrap();
        let solved = solve_main_degenerate(
            &w,
            &config,
            &grid,
            &DegenerateClosure::Restriction(FrozenK::constant(p)),
            1e-8,
        )
        .unwrap();
        let sg = solved.to_grid(&grid).unwrap();
        for (orig, got) in qg.iter().zip(&sg) {
            assert!((orig - got).norm() < 1e-12);
        }
    }

    #[test]
    fn degenerate_solve_rejects_inconsistent_kernel() {
        let config = cfg(0, 0, 2);
        let grid = Grid::new(2, 64);
        let wg: Vec<Complex64> = (0..grid.len())
            .map(|i| c((2.0 * grid.point(i)).cos()))
            .collect();
        let w = WFunction::from_grid(&config, wg);
        assert!(matches!(
            solve_main_degenerate(
                &w,
                &config,
                &grid,
                &DegenerateClosure::Restriction(FrozenK::Identity),
                1e-8
            ),
            Err(Error::DegenerationResidual { .. })
        ));
    }

    #[test]
    fn free_block_closure_recovers_potential_from_any_segment() {
        for config in [cfg(0, 0, 4), cfg(0, 0, 5), cfg(1, 0, 3), cfg(1, 1, 4)] {
            let grid = Grid::new(config.k, 8);
            let mm = grid.per_block();
            let q = Potential::from_fourier_cos(vec![
                Complex64::new(0.5, -0.2),
                Complex64::new(-0.3, 0.1),
                c(0.9),
            ]);
            let qg = q.to_grid(&grid).unwrap();
            let w = w_from_potential_matrix(&q, &config, &grid).unwrap();
            for segment in 0..config.k {
                let values = qg[segment * mm..(segment + 1) * mm].to_vec();
                let solved = solve_main_degenerate(
                    &w,
                    &config,
                    &grid,
                    &DegenerateClosure::FreeBlock { segment, values },
                    1e-8,
                )
                .unwrap();
                let sg = solved.to_grid(&grid).unwrap();
                for (i, (orig, got)) in qg.iter().zip(&sg).enumerate() {
                    assert!(
                        (orig - got).norm() < 1e-11,
                        "{config} segment {segment} sample {i}"
                    );
                }
            }
        }
    }

    #[test]
    fn first_block_recovery_matches_direct_solve() {
        for config in [cfg(0, 1, 2), cfg(0, 1, 3), cfg(1, 0, 4), cfg(1, 1, 3), cfg(1, 1, 1)] {
            let grid = Grid::new(config.k, 16);
            let q = Potential::from_fourier_cos(vec![
                Complex64::new(0.1, 0.6),
                c(-0.5),
                Complex64::new(0.3, -0.3),
            ]);
            let w = w_from_potential_matrix(&q, &config, &grid).unwrap();
            let block = first_block_from_w(&w, &config, &grid).unwrap();
            let qg = q.to_grid(&grid).unwrap();
            for (s, got) in block.iter().enumerate() {
                assert!((qg[s] - got).norm() < 1e-12, "{config} sample {s}");
            }
        }
    }

    #[test]
    fn marching_solve_equals_matrix_solve() {
        for config in [cfg(0, 1, 2), cfg(1, 0, 4), cfg(1, 1, 3)] {
            let grid = Grid::new(config.k, 16);
            let q = Potential::from_fourier_cos(vec![
                Complex64::new(-0.2, 0.4),
                Complex64::new(0.7, 0.1),
                c(0.25),
            ]);
            let w = w_from_potential_matrix(&q, &config, &grid).unwrap();
            let via_matrix = solve_main_nondegenerate(&w, &config, &grid).unwrap();
            let via_march = potential_from_w_marching(&w, &config, &grid).unwrap();
            let a = via_matrix.to_grid(&grid).unwrap();
            let b = via_march.to_grid(&grid).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-12, "{config}");
            }
        }
    }
}
