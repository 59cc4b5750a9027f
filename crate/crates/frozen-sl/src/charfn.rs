//! Two independent evaluations of the characteristic function.
//!
//! The eigenvalues of the boundary value problem are the zeros of an entire
//! function Delta(lambda). Route one expresses Delta through the kernel W:
//!
//!   alpha = beta:  Delta = rho^(2 alpha) (sin(rho pi)/rho
//!                          + integral W(t) cos(rho t)/rho^2 dt)
//!   alpha != beta: Delta = (-1)^alpha cos(rho pi)
//!                          + integral W(t) sin(rho t)/rho dt
//!
//! with lambda = rho^2. Band-limited W gets closed-form per-mode integrals;
//! grid W goes through oscillation-aware quadrature. Route two builds Delta
//! straight from the potential via the fundamental solutions C, S pinned at
//! the frozen point and the 2x2 boundary determinant. It shares nothing
//! with the W machinery, so it serves as the independent oracle.
//!
//! Every removable singularity (rho -> 0, rho -> mode frequency) is
//! evaluated through series-stabilized kernels, keeping the evaluation
//! entire: no NaN, no catastrophic cancellation at the sampling points the
//! inverse problem cares about.

use crate::config::ProblemConfig;
use crate::error::Result;
use crate::grid::Grid;
use crate::numeric::{ccos, csinc, csinc_d, vcos, vcos_d};
use crate::potential::{Potential, PotentialRep};
use crate::quad::integrate_blocks;
use crate::wfunction::{WBasis, WFunction, WRep};
use num_complex::Complex64;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Below this |rho| the rho-closed forms switch to lambda-series.
const RHO_SERIES_RADIUS: f64 = 0.5;
/// Number of lambda-series terms (powers 0..TERMS-1); at |lambda| < 0.25
/// the tail is far below f64 resolution.
const SERIES_TERMS: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMethod {
    WModes,
    WGrid,
    PotentialModes,
    PotentialGrid,
}

/// The characteristic function bound to one evaluation source.
#[derive(Debug, Clone)]
pub struct CharacteristicFn {
    cfg: ProblemConfig,
    inner: Inner,
}

#[derive(Debug, Clone)]
enum Inner {
    WModes {
        coeffs: Vec<Complex64>,
    },
    WGrid {
        values: Vec<Complex64>,
        grid: Grid,
        mean: Complex64,
        keep_mean: bool,
    },
    PotentialModes {
        coeffs: Vec<Complex64>,
    },
    PotentialGrid {
        values: Vec<Complex64>,
        grid: Grid,
    },
}

impl CharacteristicFn {
    pub fn from_w(cfg: &ProblemConfig, w: &WFunction) -> Result<Self> {
        w.check_tag(cfg)?;
        let inner = match &w.rep {
            WRep::Modes(coeffs) => Inner::WModes {
                coeffs: coeffs.clone(),
            },
            WRep::Grid(values) => {
                let grid = Grid::from_len(cfg.k, values.len())?;
                let mean = values.iter().sum::<Complex64>() * grid.h();
                let abs_scale = values.iter().map(|v| v.norm()).sum::<f64>() * grid.h();
                // A consistent alpha=beta=0 kernel integrates to zero; keep
                // the 1/lambda term only when the data genuinely carries a
                // nonzero mean rather than roundoff.
                let keep_mean = mean.norm() > 1e-12 * abs_scale.max(1e-30);
                Inner::WGrid {
                    values: values.clone(),
                    grid,
                    mean,
                    keep_mean,
                }
            }
        };
        Ok(Self { cfg: *cfg, inner })
    }

    pub fn from_potential(cfg: &ProblemConfig, q: &Potential) -> Result<Self> {
        let inner = match &q.rep {
            PotentialRep::FourierCos(coeffs) => Inner::PotentialModes {
                coeffs: coeffs.clone(),
            },
            PotentialRep::Grid(values) => {
                let grid = Grid::from_len(cfg.k, values.len())?;
                Inner::PotentialGrid {
                    values: values.clone(),
                    grid,
                }
            }
        };
        Ok(Self { cfg: *cfg, inner })
    }

    pub fn method(&self) -> EvalMethod {
        match self.inner {
            Inner::WModes { .. } => EvalMethod::WModes,
            Inner::WGrid { .. } => EvalMethod::WGrid,
            Inner::PotentialModes { .. } => EvalMethod::PotentialModes,
            Inner::PotentialGrid { .. } => EvalMethod::PotentialGrid,
        }
    }

    pub fn config(&self) -> &ProblemConfig {
        &self.cfg
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        self.eval_rho(lambda.sqrt())
    }

    /// Evaluate at a given square root of lambda. The function is even in
    /// rho; callers keep Re(rho) >= 0 away from the mode poles' mirrors.
    pub fn eval_rho(&self, rho: Complex64) -> Complex64 {
        match &self.inner {
            Inner::WModes { coeffs } => w_modes_eval_d(&self.cfg, coeffs, rho).0,
            Inner::WGrid {
                values,
                grid,
                mean,
                keep_mean,
            } => w_grid_eval(&self.cfg, values, grid, *mean, *keep_mean, rho),
            Inner::PotentialModes { coeffs } => q_modes_eval_d(&self.cfg, coeffs, rho).0,
            Inner::PotentialGrid { values, grid } => q_grid_eval(&self.cfg, values, grid, rho),
        }
    }

    /// Value and d/drho. Analytic for mode sources, central differences
    /// for grid-quadrature sources.
    pub fn eval_rho_with_derivative(&self, rho: Complex64) -> (Complex64, Complex64) {
        match &self.inner {
            Inner::WModes { coeffs } => w_modes_eval_d(&self.cfg, coeffs, rho),
            Inner::PotentialModes { coeffs } => q_modes_eval_d(&self.cfg, coeffs, rho),
            _ => {
                let value = self.eval_rho(rho);
                let h = 1e-6 * rho.norm().max(1.0);
                let hp = Complex64::new(h, 0.0);
                let d = (self.eval_rho(rho + hp) - self.eval_rho(rho - hp)) / (2.0 * h);
                (value, d)
            }
        }
    }

    /// Value and d/dlambda; usable at lambda = 0 where the rho chart is
    /// singular (needed for the eigenvalue whose asymptotic seed is rho = 0).
    pub fn eval_lambda_with_derivative(&self, lambda: Complex64) -> (Complex64, Complex64) {
        let rho = lambda.sqrt();
        if rho.norm() >= RHO_SERIES_RADIUS {
            let (v, drho) = self.eval_rho_with_derivative(rho);
            return (v, drho / (2.0 * rho));
        }
        match &self.inner {
            Inner::WModes { coeffs } => w_modes_lambda_eval_d(&self.cfg, coeffs, lambda),
            Inner::PotentialModes { coeffs } => {
                let (v, dl) = q_modes_series_eval_d(&self.cfg, coeffs, lambda);
                (v, dl)
            }
            _ => {
                let value = self.eval_rho(rho);
                let h = 1e-7 * lambda.norm().max(0.05);
                let hp = Complex64::new(h, 0.0);
                let d = (self.eval((lambda + hp)) - self.eval(lambda - hp)) / (2.0 * h);
                (value, d)
            }
        }
    }
}

/// Kernel-route evaluation (alpha/beta decide the representation).
pub fn eval_delta_w(lambda: Complex64, w: &WFunction, cfg: &ProblemConfig) -> Result<Complex64> {
    Ok(CharacteristicFn::from_w(cfg, w)?.eval(lambda))
}

/// Direct-route evaluation from the potential; the independent oracle.
pub fn eval_delta_direct(
    lambda: Complex64,
    q: &Potential,
    cfg: &ProblemConfig,
) -> Result<Complex64> {
    Ok(CharacteristicFn::from_potential(cfg, q)?.eval(lambda))
}

// ---------------------------------------------------------------------------
// Kernel route, band-limited W
// ---------------------------------------------------------------------------

fn w_modes_eval_d(
    cfg: &ProblemConfig,
    coeffs: &[Complex64],
    rho: Complex64,
) -> (Complex64, Complex64) {
    let lambda = rho * rho;
    let base = csinc(rho * PI) * PI; // sin(rho pi)/rho
    let dbase = csinc_d(rho * PI) * (PI * PI);

    if cfg.alpha_eq_beta() {
        let small = rho.norm() < RHO_SERIES_RADIUS;
        if cfg.alpha == 0 {
            let mut value = base;
            let mut deriv = dbase;
            for (n, c) in coeffs.iter().enumerate() {
                if c.norm() == 0.0 {
                    continue;
                }
                if n == 0 {
                    // pole unless the mean vanishes; a consistent kernel has
                    // a_0 = 0 and skips this branch entirely
                    value += c * base / lambda;
                    deriv += c * (dbase / lambda - base * 2.0 / (lambda * rho));
                    continue;
                }
                let nf = n as f64;
                let (g, dg) = if small {
                    let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
                    let denom = lambda - nf * nf;
                    (
                        base * sgn / denom,
                        (dbase / denom - base * 2.0 * rho / (denom * denom)) * sgn,
                    )
                } else {
                    let u = (rho - nf) * PI;
                    let rn = rho + nf;
                    (
                        csinc(u) * PI / (rho * rn),
                        (csinc_d(u) * PI / (rho * rn)
                            - csinc(u) * (2.0 * rho + nf) / (rho * rn * rho * rn))
                            * PI,
                    )
                };
                value += c * g;
                deriv += c * dg;
            }
            (value, deriv)
        } else {
            // Delta = rho sin(rho pi) + integral W cos(rho t)
            let mut value = lambda * base;
            let mut deriv = base * 2.0 * rho + lambda * dbase;
            for (n, c) in coeffs.iter().enumerate() {
                if c.norm() == 0.0 {
                    continue;
                }
                if n == 0 {
                    value += c * base;
                    deriv += c * dbase;
                    continue;
                }
                let nf = n as f64;
                let u = (rho - nf) * PI;
                let rn = rho + nf;
                let f = csinc(u) * PI * rho / rn;
                let df = (csinc_d(u) * PI * rho / rn + csinc(u) * nf / (rn * rn)) * PI;
                value += c * f;
                deriv += c * df;
            }
            (value, deriv)
        }
    } else {
        let lead_sign = if cfg.alpha == 0 { 1.0 } else { -1.0 };
        let mut value = (rho * PI).cos() * lead_sign;
        let mut deriv = (rho * PI).sin() * (-lead_sign * PI);
        for (i, c) in coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            let mu = i as f64 + 0.5;
            let u = (rho - mu) * PI;
            let rm = rho + mu;
            let h = csinc(u) * PI / rm;
            let dh = (csinc_d(u) * PI / rm - csinc(u) / (rm * rm)) * PI;
            value += c * h;
            deriv += c * dh;
        }
        (value, deriv)
    }
}

/// cos(rho pi) as a power series in lambda, with d/dlambda.
fn cos_pi_lambda_series(lambda: Complex64) -> (Complex64, Complex64) {
    let mut value = ZERO;
    let mut deriv = ZERO;
    let mut pow = Complex64::new(1.0, 0.0);
    let mut pow_prev = ZERO;
    let mut fact = 1.0; // (2j)!
    for j in 0..SERIES_TERMS {
        let coeff = PI.powi(2 * j as i32) / fact;
        value += pow * coeff;
        if j >= 1 {
            deriv += pow_prev * (-(j as f64) * coeff);
        }
        pow_prev = pow;
        pow *= -lambda;
        fact *= (2 * j as f64 + 1.0) * (2 * j as f64 + 2.0);
    }
    (value, deriv)
}

/// Kernel route as an analytic function of lambda near lambda = 0.
fn w_modes_lambda_eval_d(
    cfg: &ProblemConfig,
    coeffs: &[Complex64],
    lambda: Complex64,
) -> (Complex64, Complex64) {
    let (s, ds) = sinc_pi_lambda_series(lambda);
    if cfg.alpha_eq_beta() {
        if cfg.alpha == 0 {
            let mut value = s * PI;
            let mut deriv = ds * PI;
            for (n, c) in coeffs.iter().enumerate() {
                if c.norm() == 0.0 {
                    continue;
                }
                if n == 0 {
                    value += c * s * PI / lambda;
                    deriv += c * PI * (ds / lambda - s / (lambda * lambda));
                    continue;
                }
                let nf = n as f64;
                let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
                let denom = lambda - nf * nf;
                value += c * s * (PI * sgn) / denom;
                deriv += c * (ds * denom - s) * (PI * sgn) / (denom * denom);
            }
            (value, deriv)
        } else {
            let mut value = lambda * s * PI;
            let mut deriv = (s + lambda * ds) * PI;
            for (n, c) in coeffs.iter().enumerate() {
                if c.norm() == 0.0 {
                    continue;
                }
                if n == 0 {
                    value += c * s * PI;
                    deriv += c * ds * PI;
                    continue;
                }
                let nf = n as f64;
                let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
                let denom = lambda - nf * nf;
                value += c * lambda * s * (PI * sgn) / denom;
                deriv += c * ((s + lambda * ds) * denom - lambda * s) * (PI * sgn)
                    / (denom * denom);
            }
            (value, deriv)
        }
    } else {
        let (cc, dcc) = cos_pi_lambda_series(lambda);
        let lead = if cfg.alpha == 0 { 1.0 } else { -1.0 };
        let mut value = cc * lead;
        let mut deriv = dcc * lead;
        for (i, c) in coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            let mu = i as f64 + 0.5;
            let sgn = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
            let denom = lambda - mu * mu;
            value += c * cc * sgn / denom;
            deriv += c * (dcc * denom - cc) * sgn / (denom * denom);
        }
        (value, deriv)
    }
}

/// sin(rho pi)/(rho pi) and its lambda-derivative, series form.
fn sinc_pi_lambda_series(lambda: Complex64) -> (Complex64, Complex64) {
    let mut value = ZERO;
    let mut deriv = ZERO;
    let mut pow = Complex64::new(1.0, 0.0);
    let mut pow_prev = ZERO;
    let mut fact = 1.0; // (2j+1)!
    for j in 0..SERIES_TERMS {
        let coeff = PI.powi(2 * j as i32) / fact;
        value += pow * coeff;
        if j >= 1 {
            deriv += pow_prev * (-(j as f64) * coeff);
        }
        pow_prev = pow;
        pow *= -lambda;
        fact *= (2 * j as f64 + 2.0) * (2 * j as f64 + 3.0);
    }
    (value, deriv)
}

// ---------------------------------------------------------------------------
// Kernel route, grid W
// ---------------------------------------------------------------------------

fn w_grid_eval(
    cfg: &ProblemConfig,
    values: &[Complex64],
    grid: &Grid,
    mean: Complex64,
    keep_mean: bool,
    rho: Complex64,
) -> Complex64 {
    let lambda = rho * rho;
    let osc = rho.norm();
    let k = grid.k();
    match (cfg.alpha, cfg.beta) {
        (0, 0) => {
            // cos(rho t)/rho^2 = 1/lambda - t^2 (1 - cos(rho t))/(rho t)^2
            let correction = integrate_blocks(values, grid, 0..k, osc, |t| {
                ccos(rho * t) * (t * t)
            });
            let mut value = csinc(rho * PI) * PI - correction;
            if keep_mean {
                value += mean / lambda;
            }
            value
        }
        (1, 1) => {
            let integral = integrate_blocks(values, grid, 0..k, osc, |t| (rho * t).cos());
            lambda * csinc(rho * PI) * PI + integral
        }
        _ => {
            let integral =
                integrate_blocks(values, grid, 0..k, osc, |t| csinc(rho * t) * t);
            let lead = if cfg.alpha == 0 { 1.0 } else { -1.0 };
            (rho * PI).cos() * lead + integral
        }
    }
}

// ---------------------------------------------------------------------------
// Direct route from the potential
// ---------------------------------------------------------------------------

struct BoundaryData {
    c0: Complex64,
    c0p: Complex64,
    cpi: Complex64,
    cpip: Complex64,
    s0: Complex64,
    s0p: Complex64,
    spi: Complex64,
    spip: Complex64,
}

impl BoundaryData {
    fn determinant(&self, cfg: &ProblemConfig) -> Complex64 {
        let (x, z) = if cfg.alpha == 0 {
            (self.c0, self.s0)
        } else {
            (self.c0p, self.s0p)
        };
        let (v, y) = if cfg.beta == 0 {
            (self.cpi, self.spi)
        } else {
            (self.cpip, self.spip)
        };
        x * y - z * v
    }
}

fn q_grid_eval(
    cfg: &ProblemConfig,
    values: &[Complex64],
    grid: &Grid,
    rho: Complex64,
) -> Complex64 {
    let a = cfg.a();
    let tau = PI - a;
    let k = grid.k();
    let osc = rho.norm();
    let int_sin_a = integrate_blocks(values, grid, 0..1, osc, |t| csinc(rho * t) * t);
    let int_cos_a = integrate_blocks(values, grid, 0..1, osc, |t| (rho * t).cos());
    let int_sin_pi = integrate_blocks(values, grid, 1..k, osc, |t| {
        csinc(rho * (PI - t)) * (PI - t)
    });
    let int_cos_pi = integrate_blocks(values, grid, 1..k, osc, |t| (rho * (PI - t)).cos());

    let data = BoundaryData {
        c0: (rho * a).cos() + int_sin_a,
        c0p: rho * (rho * a).sin() - int_cos_a,
        cpi: (rho * tau).cos() + int_sin_pi,
        cpip: -rho * (rho * tau).sin() + int_cos_pi,
        s0: -csinc(rho * a) * a,
        s0p: (rho * a).cos(),
        spi: csinc(rho * tau) * tau,
        spip: (rho * tau).cos(),
    };
    data.determinant(cfg)
}

fn q_modes_eval_d(
    cfg: &ProblemConfig,
    coeffs: &[Complex64],
    rho: Complex64,
) -> (Complex64, Complex64) {
    if rho.norm() < RHO_SERIES_RADIUS {
        let lambda = rho * rho;
        let (value, dlambda) = q_modes_series_eval_d(cfg, coeffs, lambda);
        return (value, dlambda * 2.0 * rho);
    }
    let a = cfg.a();
    let tau = PI - a;

    // per-mode integrals over (0,a) and, reflected, over (a,pi)
    let mut sin_a = ZERO; // integral q(t) sin(rho t) dt over (0,a)
    let mut cos_a = ZERO; // integral q(t) cos(rho t) dt over (0,a)
    let mut sin_pi = ZERO; // integral q(t) sin(rho(pi-t)) dt over (a,pi)
    let mut cos_pi = ZERO; // integral q(t) cos(rho(pi-t)) dt over (a,pi)
    let (mut d_sin_a, mut d_cos_a, mut d_sin_pi, mut d_cos_pi) = (ZERO, ZERO, ZERO, ZERO);

    for (n, c) in coeffs.iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        let nf = n as f64;
        let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
        let up_a = (rho + nf) * a;
        let dn_a = (rho - nf) * a;
        let up_t = (rho + nf) * tau;
        let dn_t = (rho - nf) * tau;

        let sn_a = (vcos(up_a) + vcos(dn_a)) * (a / 2.0);
        let cs_a = (csinc(up_a) + csinc(dn_a)) * (a / 2.0);
        let sn_t = (vcos(up_t) + vcos(dn_t)) * (tau / 2.0);
        let cs_t = (csinc(up_t) + csinc(dn_t)) * (tau / 2.0);

        sin_a += c * sn_a;
        cos_a += c * cs_a;
        sin_pi += c * sn_t * parity;
        cos_pi += c * cs_t * parity;

        d_sin_a += c * (vcos_d(up_a) + vcos_d(dn_a)) * (a * a / 2.0);
        d_cos_a += c * (csinc_d(up_a) + csinc_d(dn_a)) * (a * a / 2.0);
        d_sin_pi += c * (vcos_d(up_t) + vcos_d(dn_t)) * (tau * tau / 2.0 * parity);
        d_cos_pi += c * (csinc_d(up_t) + csinc_d(dn_t)) * (tau * tau / 2.0 * parity);
    }

    let cos_ra = (rho * a).cos();
    let sin_ra = (rho * a).sin();
    let cos_rt = (rho * tau).cos();
    let sin_rt = (rho * tau).sin();

    let data = BoundaryData {
        c0: cos_ra + sin_a / rho,
        c0p: rho * sin_ra - cos_a,
        cpi: cos_rt + sin_pi / rho,
        cpip: -rho * sin_rt + cos_pi,
        s0: -csinc(rho * a) * a,
        s0p: cos_ra,
        spi: csinc(rho * tau) * tau,
        spip: cos_rt,
    };
    let ddata = BoundaryData {
        c0: -sin_ra * a + d_sin_a / rho - sin_a / (rho * rho),
        c0p: sin_ra + rho * cos_ra * a - d_cos_a,
        cpi: -sin_rt * tau + d_sin_pi / rho - sin_pi / (rho * rho),
        cpip: -sin_rt - rho * cos_rt * tau + d_cos_pi,
        s0: -csinc_d(rho * a) * (a * a),
        s0p: -sin_ra * a,
        spi: csinc_d(rho * tau) * (tau * tau),
        spip: -sin_rt * tau,
    };

    let value = data.determinant(cfg);
    let (x, z, dx, dz) = if cfg.alpha == 0 {
        (data.c0, data.s0, ddata.c0, ddata.s0)
    } else {
        (data.c0p, data.s0p, ddata.c0p, ddata.s0p)
    };
    let (v, y, dv, dy) = if cfg.beta == 0 {
        (data.cpi, data.spi, ddata.cpi, ddata.spi)
    } else {
        (data.cpip, data.spip, ddata.cpip, ddata.spip)
    };
    let deriv = dx * y + x * dy - dz * v - z * dv;
    (value, deriv)
}

/// Trigonometric moments T_m = integral t^m cos(n t) dt and
/// U_m = integral t^m sin(n t) dt over (0, tau), m = 0..=max_m.
fn trig_moments(n: usize, tau: f64, max_m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut t = vec![0.0; max_m + 1];
    let mut u = vec![0.0; max_m + 1];
    if tau == 0.0 {
        return (t, u);
    }
    if n == 0 {
        for (m, tm) in t.iter_mut().enumerate() {
            *tm = tau.powi(m as i32 + 1) / (m as f64 + 1.0);
        }
        return (t, u);
    }
    let nf = n as f64;
    let (sn, cn) = (nf * tau).sin_cos();
    t[0] = sn / nf;
    u[0] = (1.0 - cn) / nf;
    for m in 1..=max_m {
        let tm = tau.powi(m as i32);
        t[m] = tm * sn / nf - (m as f64 / nf) * u[m - 1];
        u[m] = -tm * cn / nf + (m as f64 / nf) * t[m - 1];
    }
    (t, u)
}

/// Direct route as an analytic function of lambda near lambda = 0: every
/// boundary component becomes a short power series with exactly computed
/// trigonometric-moment coefficients.
fn q_modes_series_eval_d(
    cfg: &ProblemConfig,
    coeffs: &[Complex64],
    lambda: Complex64,
) -> (Complex64, Complex64) {
    let a = cfg.a();
    let tau = PI - a;
    let max_m = 2 * SERIES_TERMS + 1;

    // factorials
    let mut fact = vec![1.0_f64; max_m + 1];
    for m in 1..=max_m {
        fact[m] = fact[m - 1] * m as f64;
    }

    // coefficient arrays g[j] so that component = sum_j g[j] (-lambda)^j
    let mut g_c0 = vec![ZERO; SERIES_TERMS];
    let mut g_c0p = vec![ZERO; SERIES_TERMS];
    let mut g_cpi = vec![ZERO; SERIES_TERMS];
    let mut g_cpip = vec![ZERO; SERIES_TERMS];
    let mut g_s0 = vec![ZERO; SERIES_TERMS];
    let mut g_s0p = vec![ZERO; SERIES_TERMS];
    let mut g_spi = vec![ZERO; SERIES_TERMS];
    let mut g_spip = vec![ZERO; SERIES_TERMS];

    for j in 0..SERIES_TERMS {
        let a2j = a.powi(2 * j as i32);
        let t2j = tau.powi(2 * j as i32);
        g_c0[j] += Complex64::new(a2j / fact[2 * j], 0.0);
        g_cpi[j] += Complex64::new(t2j / fact[2 * j], 0.0);
        g_s0p[j] += Complex64::new(a2j / fact[2 * j], 0.0);
        g_spip[j] += Complex64::new(t2j / fact[2 * j], 0.0);
        g_s0[j] += Complex64::new(-a2j * a / fact[2 * j + 1], 0.0);
        g_spi[j] += Complex64::new(t2j * tau / fact[2 * j + 1], 0.0);
        if j >= 1 {
            g_c0p[j] += Complex64::new(-a.powi(2 * j as i32 - 1) / fact[2 * j - 1], 0.0);
            g_cpip[j] += Complex64::new(tau.powi(2 * j as i32 - 1) / fact[2 * j - 1], 0.0);
        }
    }

    for (n, c) in coeffs.iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
        let (t_a, _) = trig_moments(n, a, max_m);
        let (t_t, _) = trig_moments(n, tau, max_m);
        for j in 0..SERIES_TERMS {
            g_c0[j] += c * (t_a[2 * j + 1] / fact[2 * j + 1]);
            g_c0p[j] += c * (-t_a[2 * j] / fact[2 * j]);
            g_cpi[j] += c * (parity * t_t[2 * j + 1] / fact[2 * j + 1]);
            g_cpip[j] += c * (parity * t_t[2 * j] / fact[2 * j]);
        }
    }

    let eval = |g: &[Complex64]| -> (Complex64, Complex64) {
        let mut value = ZERO;
        let mut deriv = ZERO;
        let mut pow = Complex64::new(1.0, 0.0);
        let mut pow_prev = ZERO;
        for (j, gj) in g.iter().enumerate() {
            value += gj * pow;
            if j >= 1 {
                deriv += gj * pow_prev * (-(j as f64));
            }
            pow_prev = pow;
            pow *= -lambda;
        }
        (value, deriv)
    };

    let (c0, dc0) = eval(&g_c0);
    let (c0p, dc0p) = eval(&g_c0p);
    let (cpi, dcpi) = eval(&g_cpi);
    let (cpip, dcpip) = eval(&g_cpip);
    let (s0, ds0) = eval(&g_s0);
    let (s0p, ds0p) = eval(&g_s0p);
    let (spi, dspi) = eval(&g_spi);
    let (spip, dspip) = eval(&g_spip);

    let (x, z, dx, dz) = if cfg.alpha == 0 {
        (c0, s0, dc0, ds0)
    } else {
        (c0p, s0p, dc0p, ds0p)
    };
    let (v, y, dv, dy) = if cfg.beta == 0 {
        (cpi, spi, dcpi, dspi)
    } else {
        (cpip, spip, dcpip, dspip)
    };
    (x * y - z * v, dx * y + x * dy - dz * v - z * dv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::w_from_potential_matrix;

    fn cfg(alpha: u8, beta: u8, k: usize) -> ProblemConfig {
        ProblemConfig::new(alpha, beta, k).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rl(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Closed form for q = 1, k = 2, alpha = beta = 0:
    /// sin(rho pi)/rho + (2 sin(rho pi/2) - sin(rho pi))/rho^3.
    fn square_wave_delta(lambda: Complex64) -> Complex64 {
        let rho = lambda.sqrt();
        let r3 = rho * rho * rho;
        (rho * PI).sin() / rho + ((rho * PI / 2.0).sin() * 2.0 - (rho * PI).sin()) / r3
    }

    #[test]
    fn zero_kernel_reduces_to_leading_terms() {
        let config = cfg(0, 0, 2);
        let w = WFunction::zero(&config);
        let d1 = eval_delta_w(rl(1.0), &w, &config).unwrap();
        assert!(d1.norm() < 1e-12);
        let d2 = eval_delta_w(rl(0.25), &w, &config).unwrap();
        assert!((d2 - rl(2.0)).norm() < 1e-12);
    }

    #[test]
    fn zero_potential_matches_unperturbed_functions() {
        let q = Potential::zero();
        let samples = [rl(0.3), c(2.0, 1.0), rl(-4.0), rl(17.3), c(0.0, 0.0)];
        for lambda in samples {
            let rho = lambda.sqrt();
            let expect00 = csinc(rho * PI) * PI;
            let expect01 = (rho * PI).cos();
            let expect10 = -(rho * PI).cos();
            let expect11 = lambda * csinc(rho * PI) * PI;
            for (config, expect) in [
                (cfg(0, 0, 2), expect00),
                (cfg(0, 1, 2), expect01),
                (cfg(1, 0, 2), expect10),
                (cfg(1, 1, 2), expect11),
            ] {
                let got = eval_delta_direct(lambda, &q, &config).unwrap();
                assert!(
                    (got - expect).norm() < 1e-10 * (1.0 + expect.norm()),
                    "{config} at {lambda}: {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn constant_potential_frozen_values() {
        // q = 1, k = 2, (0,0): Delta(1) = 2 and Delta(4) = 0
        let config = cfg(0, 0, 2);
        let q = Potential::constant(rl(1.0));
        let d1 = eval_delta_direct(rl(1.0), &q, &config).unwrap();
        assert!((d1 - rl(2.0)).norm() < 1e-10, "{d1}");
        let d4 = eval_delta_direct(rl(4.0), &q, &config).unwrap();
        assert!(d4.norm() < 1e-10, "{d4}");
    }

    #[test]
    fn kernel_route_matches_square_wave_closed_form() {
        let config = cfg(0, 0, 2);
        let grid = Grid::new(2, 1024);
        let q = Potential::constant(rl(1.0));
        let w = w_from_potential_matrix(&q, &config, &grid).unwrap();
        for lambda in [rl(1.0), rl(4.0), rl(2.5), rl(-9.0), rl(0.01), c(3.0, 2.0)] {
            let got = eval_delta_w(lambda, &w, &config).unwrap();
            let expect = square_wave_delta(lambda);
            assert!(
                (got - expect).norm() < 1e-9 * (1.0 + expect.norm()),
                "lambda {lambda}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn direct_route_matches_square_wave_closed_form() {
        let config = cfg(0, 0, 2);
        let q = Potential::constant(rl(1.0));
        for lambda in [rl(1.0), rl(4.0), rl(2.5), rl(-9.0), rl(0.01), c(3.0, 2.0)] {
            let got = eval_delta_direct(lambda, &q, &config).unwrap();
            let expect = square_wave_delta(lambda);
            assert!(
                (got - expect).norm() < 1e-11 * (1.0 + expect.norm()),
                "lambda {lambda}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn mode_and_grid_kernel_routes_agree() {
        let config = cfg(1, 1, 2);
        let coeffs = vec![rl(0.4), c(-0.6, 0.2), rl(0.0), c(0.1, 0.5)];
        let w_modes = WFunction::from_modes(&config, coeffs);
        let grid = Grid::new(2, 1024);
        let w_grid = WFunction::from_grid(&config, w_modes.to_grid(&grid).unwrap());
        for lambda in [rl(0.7), rl(9.3), rl(-16.0), c(25.0, 10.0), rl(1e-4)] {
            let a = eval_delta_w(lambda, &w_modes, &config).unwrap();
            let b = eval_delta_w(lambda, &w_grid, &config).unwrap();
            assert!(
                (a - b).norm() < 1e-8 * (1.0 + a.norm()),
                "lambda {lambda}: modes {a} vs grid {b}"
            );
        }
    }

    #[test]
    fn analytic_rho_derivatives_match_finite_differences() {
        let config = cfg(0, 1, 3);
        let w = WFunction::from_modes(&config, vec![rl(0.8), c(-0.2, 0.4), rl(0.3)]);
        let f = CharacteristicFn::from_w(&config, &w).unwrap();
        let q = Potential::from_fourier_cos(vec![rl(0.5), c(0.3, -0.7), rl(-0.2)]);
        let g = CharacteristicFn::from_potential(&config, &q).unwrap();
        for rho in [rl(0.9), rl(2.5), c(3.0, 0.4), rl(0.51), rl(7.5)] {
            for fun in [&f, &g] {
                let (_, d) = fun.eval_rho_with_derivative(rho);
                let h = 1e-6;
                let fd = (fun.eval_rho(rho + rl(h)) - fun.eval_rho(rho - rl(h))) / (2.0 * h);
                assert!(
                    (d - fd).norm() < 1e-5 * (1.0 + fd.norm()),
                    "rho {rho}: analytic {d} vs fd {fd}"
                );
            }
        }
    }

    #[test]
    fn series_and_closed_forms_join_at_the_switch_radius() {
        let config = cfg(1, 1, 3);
        let q = Potential::from_fourier_cos(vec![rl(0.4), c(0.2, 0.3), rl(-0.6)]);
        let f = CharacteristicFn::from_potential(&config, &q).unwrap();
        // straddle |rho| = 0.5 (lambda = 0.25)
        for lambda in [rl(0.2499), rl(0.2501), c(0.2, 0.14), rl(-0.2499), rl(-0.2501)] {
            let (v_series, _) = q_modes_series_eval_d(
                &config,
                &[rl(0.4), c(0.2, 0.3), rl(-0.6)],
                lambda,
            );
            let v = f.eval(lambda);
            assert!(
                (v - v_series).norm() < 1e-12 * (1.0 + v.norm()),
                "lambda {lambda}: {v} vs series {v_series}"
            );
        }
    }

    #[test]
    fn lambda_derivative_usable_at_zero() {
        let config = cfg(1, 1, 2);
        let q = Potential::from_fourier_cos(vec![rl(0.3), rl(0.0), c(0.5, -0.1)]);
        let f = CharacteristicFn::from_potential(&config, &q).unwrap();
        let (v0, d0) = f.eval_lambda_with_derivative(ZERO);
        assert!(v0.re.is_finite() && d0.re.is_finite());
        let h = 1e-6;
        let fd = (f.eval(rl(h)) - f.eval(rl(-h))) / (2.0 * h);
        assert!((d0 - fd).norm() < 1e-6 * (1.0 + fd.norm()), "{d0} vs {fd}");
    }

    #[test]
    fn entire_at_origin_along_a_shrinking_sequence() {
        for config in [cfg(0, 0, 2), cfg(0, 1, 2), cfg(1, 0, 2), cfg(1, 1, 2)] {
            let grid = Grid::new(2, 512);
            let q = Potential::from_fourier_cos(vec![rl(0.7), c(0.2, -0.4)]);
            let w = w_from_potential_matrix(&q, &config, &grid).unwrap();
            let fw = CharacteristicFn::from_w(&config, &w).unwrap();
            let fq = CharacteristicFn::from_potential(&config, &q).unwrap();
            let at_zero = fq.eval(ZERO);
            assert!(at_zero.re.is_finite() && at_zero.im.is_finite());
            let mut prev_gap = f64::MAX;
            for e in [1e-1, 1e-3, 1e-6, 1e-9, 1e-12] {
                let lambda = rl(e);
                let vq = fq.eval(lambda);
                let vw = fw.eval(lambda);
                assert!(vq.re.is_finite() && vw.re.is_finite(), "{config} at {e}");
                let gap = (vq - at_zero).norm();
                assert!(gap <= prev_gap + 1e-6, "{config}: not converging at {e}");
                prev_gap = gap;
                assert!((vw - vq).norm() < 1e-6 * (1.0 + vq.norm()), "{config} at {e}");
            }
        }
    }

    #[test]
    fn trig_moments_match_quadrature() {
        let tau = 1.3;
        let n = 3;
        let (t, u) = trig_moments(n, tau, 5);
        // crude reference by fine midpoint rule
        let steps = 200_000;
        let h = tau / steps as f64;
        for m in 0..=5 {
            let (mut rt, mut ru) = (0.0, 0.0);
            for i in 0..steps {
                let x: f64 = (i as f64 + 0.5) * h;
                rt += x.powi(m as i32) * (n as f64 * x).cos() * h;
                ru += x.powi(m as i32) * (n as f64 * x).sin() * h;
            }
            assert!((t[m] - rt).abs() < 1e-8, "T_{m}: {} vs {rt}", t[m]);
            assert!((u[m] - ru).abs() < 1e-8, "U_{m}: {} vs {ru}", u[m]);
        }
    }
}
