//! Potential reconstruction from spectra.
//!
//! The pipeline has three stages. First the spectrum determines the
//! characteristic function as an infinite product over its zeros; terms
//! beyond the explicit range are replaced by their asymptotic positions and
//! that sub-product collapses into the closed unperturbed factor
//! (sin(rho pi)/rho for integer seeds, cos(rho pi) for half-integer ones),
//! so truncation error enters only through finitely many correction
//! factors. Second, sampling the product at the unperturbed zeros inverts
//! the integral representation mode by mode and yields the kernel W. Third,
//! the main equation turns W back into a potential: uniquely in the
//! non-degenerate groups, and up to one free block fixed by a restriction
//! operator K in the degenerate ones, which is also how the iso-spectral
//! families arise.

use crate::charfn::CharacteristicFn;
use crate::config::ProblemConfig;
use crate::error::{Error, Result};
use crate::frozen_k::FrozenK;
use crate::grid::Grid;
use crate::numeric::csinc;
use crate::operators::{solve_main_degenerate, solve_main_nondegenerate, DegenerateClosure};
use crate::potential::Potential;
use crate::roots::check_degeneration_spectrum;
use crate::spectrum::Spectrum;
use crate::wfunction::WFunction;
use num_complex::Complex64;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone)]
pub struct InverseOpts {
    /// Eigenvalues used as explicit product factors.
    pub n_explicit: usize,
    /// Kernel modes recovered by sampling; defaults to n_explicit - 10 so
    /// the highest samples stay well inside the explicitly corrected range.
    pub n_modes: Option<usize>,
    /// Total grid samples (multiple of k) of the reconstructed potential.
    pub grid_total: Option<usize>,
    /// Acceptance tolerance (absolute, in lambda) for the forced
    /// eigenvalues of a degenerate spectrum.
    pub deg_tol: f64,
}

impl Default for InverseOpts {
    fn default() -> Self {
        Self {
            n_explicit: 60,
            n_modes: None,
            grid_total: None,
            deg_tol: 1e-6,
        }
    }
}

impl InverseOpts {
    pub fn modes(&self) -> usize {
        self.n_modes
            .unwrap_or_else(|| self.n_explicit.saturating_sub(10))
            .max(1)
    }

    /// Reconstruction grid for a given k.
    pub fn grid_for(&self, k: usize) -> Grid {
        let wanted = self
            .grid_total
            .unwrap_or_else(|| (8 * (self.modes() + 1)).max(64 * k));
        let per_block = wanted.div_ceil(k).max(4);
        Grid::new(k, per_block)
    }
}

#[derive(Debug, Clone)]
pub struct InverseReport {
    /// The +-1 normalization applied to the reconstructed product.
    pub sign: f64,
    pub n_explicit: usize,
    pub n_modes: usize,
    /// Worst forced-eigenvalue deviation (degenerate path only).
    pub degeneration_max_deviation: Option<f64>,
    /// Kernel-identity residual of the extracted W (degenerate path only).
    pub degeneration_residual_w: Option<f64>,
}

/// The characteristic function rebuilt from a spectrum: explicit zero
/// factors for the stored eigenvalues, closed-form tail, and a sign pinned
/// against the unperturbed leading behaviour at a probe point far down the
/// negative real axis.
#[derive(Debug, Clone)]
pub struct ReconstructedDelta {
    cfg: ProblemConfig,
    lambdas: Vec<Complex64>,
    sign: f64,
}

pub fn reconstruct_delta(spec: &Spectrum, n_explicit: usize) -> Result<ReconstructedDelta> {
    if n_explicit == 0 || n_explicit > spec.len() {
        return Err(Error::InvalidConfig(format!(
            "n_explicit = {n_explicit} out of range for a spectrum of {} values",
            spec.len()
        )));
    }
    let cfg = spec.config;
    let offset = cfg.rho_offset();
    for (i, v) in spec.values[..n_explicit].iter().enumerate() {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFiniteEigenvalue { index: i + 1 });
        }
        // an explicit eigenvalue sitting on an asymptotic tail zero would
        // double a zero the closed form already supplies
        let m = (v.norm().sqrt() + offset).round() as usize;
        if m > n_explicit {
            let tail_zero = (m as f64 - offset).powi(2);
            if (v - tail_zero).norm() < 1e-9 * (1.0 + tail_zero) {
                return Err(Error::TailCollision { index: i + 1 });
            }
        }
    }
    let mut rec = ReconstructedDelta {
        cfg,
        lambdas: spec.values[..n_explicit].to_vec(),
        sign: 1.0,
    };
    rec.sign = rec.determine_sign();
    Ok(rec)
}

impl ReconstructedDelta {
    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn n_explicit(&self) -> usize {
        self.lambdas.len()
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        self.eval_unsigned(lambda) * self.sign
    }

    /// Leading behaviour comparison at lambda = -R^2; the product form
    /// determines Delta only up to normalization, and the integral forms
    /// fix it.
    fn determine_sign(&self) -> f64 {
        let probe = Complex64::new(-650.25, 0.0); // rho = 25.5 i
        let rho = probe.sqrt();
        let lead = if self.cfg.alpha_eq_beta() {
            let base = csinc(rho * PI) * PI;
            if self.cfg.alpha == 0 {
                base
            } else {
                probe * base
            }
        } else {
            let s = if self.cfg.alpha == 0 { 1.0 } else { -1.0 };
            (rho * PI).cos() * s
        };
        let unsigned = self.eval_unsigned(probe);
        if (lead.re * unsigned.re).is_sign_negative() {
            -1.0
        } else {
            1.0
        }
    }

    fn eval_unsigned(&self, lambda: Complex64) -> Complex64 {
        let cfg = &self.cfg;
        let rho = lambda.sqrt();
        let n_explicit = self.lambdas.len();
        let offset = cfg.rho_offset();
        let alpha_beta = (cfg.alpha * cfg.beta) as usize;
        let first = 1 + alpha_beta; // first index inside the ratio product

        // which explicit denominator (if any) nearly vanishes at this rho;
        // the n-th ratio factor divides by (n - offset)^2 - lambda
        let near = {
            let n = (rho.re + offset).round() as i64;
            if n >= first as i64 && n <= n_explicit as i64 {
                let freq = n as f64 - offset;
                if (rho - freq).norm() < 0.4 {
                    Some((n as usize, freq))
                } else {
                    None
                }
            } else {
                None
            }
        };

        let mut value = Complex64::new(1.0, 0.0);
        if alpha_beta == 1 {
            value *= self.lambdas[0] - lambda;
        }

        // closed tail factor, with the near-singular denominator folded in
        match near {
            Some((n_star, freq)) => {
                // closed/(freq^2 - lambda) in series-stable form
                let u = (rho - freq) * PI;
                let parity = if (freq.round() as i64) % 2 == 0 { 1.0 } else { -1.0 };
                if cfg.alpha_eq_beta() {
                    // sin(rho pi)/rho / (m^2 - lambda)
                    value *= csinc(u) * (-parity * PI) / (rho * (rho + freq));
                } else {
                    // cos(rho pi) / (mu^2 - lambda); parity refers to n_star
                    let sgn = if n_star % 2 == 0 { 1.0 } else { -1.0 };
                    value *= csinc(u) * (-sgn * PI) / (rho + freq);
                }
                value *= self.lambdas[n_star - 1] - lambda;
                for n in first..=n_explicit {
                    if n == n_star {
                        continue;
                    }
                    let seed = (n as f64 - offset).powi(2);
                    value *= (self.lambdas[n - 1] - lambda) / (seed - lambda);
                }
            }
            None => {
                let closed = if cfg.alpha_eq_beta() {
                    csinc(rho * PI) * PI
                } else {
                    (rho * PI).cos()
                };
                value *= closed;
                for n in first..=n_explicit {
                    let seed = (n as f64 - offset).powi(2);
                    value *= (self.lambdas[n - 1] - lambda) / (seed - lambda);
                }
            }
        }
        value
    }
}

/// Recover the kernel from any entire-function evaluation of Delta by
/// sampling at the unperturbed zeros: rho = n for the cosine basis,
/// rho = n - 1/2 for the half-integer sine basis.
pub fn extract_w(
    delta: impl Fn(Complex64) -> Complex64,
    cfg: &ProblemConfig,
    n_modes: usize,
) -> WFunction {
    if cfg.alpha_eq_beta() {
        let mut coeffs = vec![ZERO; n_modes + 1];
        if cfg.alpha == 1 {
            // mean term from the value at the origin
            coeffs[0] = delta(ZERO) / PI;
        }
        for m in 1..=n_modes {
            let m2 = (m * m) as f64;
            let v = delta(Complex64::new(m2, 0.0));
            coeffs[m] = if cfg.alpha == 0 {
                v * (2.0 * m2 / PI)
            } else {
                v * (2.0 / PI)
            };
        }
        WFunction::from_modes(cfg, coeffs)
    } else {
        let mut coeffs = vec![ZERO; n_modes];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let mu = i as f64 + 0.5;
            let v = delta(Complex64::new(mu * mu, 0.0));
            *c = v * (2.0 * mu / PI);
        }
        WFunction::from_modes(cfg, coeffs)
    }
}

fn extract_stage(
    spec: &Spectrum,
    opts: &InverseOpts,
) -> Result<(ReconstructedDelta, WFunction, usize)> {
    let n_explicit = opts.n_explicit.min(spec.len());
    let delta = reconstruct_delta(spec, n_explicit)?;
    let n_modes = opts.modes().min(n_explicit.saturating_sub(1).max(1));
    let w = extract_w(|l| delta.eval(l), &spec.config, n_modes);
    Ok((delta, w, n_modes))
}

/// Spectrum to potential in the non-degenerate groups: rebuild Delta, read
/// off the kernel, solve the main equation uniquely.
pub fn potential_from_spectrum_nondegenerate(
    spec: &Spectrum,
    opts: &InverseOpts,
) -> Result<(Potential, InverseReport)> {
    let cfg = spec.config;
    if cfg.is_degenerate() {
        return Err(Error::RequiresNonDegenerate);
    }
    let (delta, w, n_modes) = extract_stage(spec, opts)?;
    let grid = opts.grid_for(cfg.k);
    let q = solve_main_nondegenerate(&w, &cfg, &grid)?;
    Ok((
        q,
        InverseReport {
            sign: delta.sign(),
            n_explicit: delta.n_explicit(),
            n_modes,
            degeneration_max_deviation: None,
            degeneration_residual_w: None,
        },
    ))
}

/// Spectrum to potential in the degenerate groups, under the restriction
/// q(a - t) = K(q(a + t)). The spectrum must satisfy its forced-eigenvalue
/// identities within `opts.deg_tol`; that necessity is what makes
/// rejection here meaningful.
pub fn potential_from_spectrum_degenerate(
    spec: &Spectrum,
    k_op: &FrozenK,
    opts: &InverseOpts,
) -> Result<(Potential, InverseReport)> {
    let cfg = spec.config;
    if !cfg.is_degenerate() {
        return Err(Error::RequiresDegenerate);
    }
    if cfg.k < 2 {
        return Err(Error::TrivialSubdivision);
    }
    let deg = check_degeneration_spectrum(spec)?;
    if deg.max_deviation > opts.deg_tol {
        let worst = deg
            .entries
            .iter()
            .max_by(|a, b| a.deviation.partial_cmp(&b.deviation).unwrap())
            .expect("nonempty entries when deviation positive");
        return Err(Error::SpectrumNotRealizable {
            index: worst.position,
            deviation: worst.deviation,
            tol: opts.deg_tol,
        });
    }
    let (delta, w, n_modes) = extract_stage(spec, opts)?;
    let grid = opts.grid_for(cfg.k);
    // The extracted kernel inherits the spectrum's accepted deviations, so
    // the identity check scales with them rather than with roundoff.
    let residual_tol = 1e-8 + 50.0 * (cfg.k as f64) * deg.max_deviation;
    let residual = crate::operators::degeneration_residual(&w, &cfg, &grid)?;
    let q = solve_main_degenerate(
        &w,
        &cfg,
        &grid,
        &DegenerateClosure::Restriction(k_op.clone()),
        residual_tol,
    )?;
    Ok((
        q,
        InverseReport {
            sign: delta.sign(),
            n_explicit: delta.n_explicit(),
            n_modes,
            degeneration_max_deviation: Some(deg.max_deviation),
            degeneration_residual_w: Some(residual),
        },
    ))
}

/// One iso-spectral potential per prescribed first block: constant
/// restriction operators K(f) = p sweep out the whole iso-spectral class
/// as p ranges over block functions.
pub fn isospectral_family(
    spec: &Spectrum,
    p_list: &[Vec<Complex64>],
    opts: &InverseOpts,
) -> Result<Vec<Potential>> {
    p_list
        .iter()
        .map(|p| {
            potential_from_spectrum_degenerate(spec, &FrozenK::constant(p.clone()), opts)
                .map(|(q, _)| q)
        })
        .collect()
}
