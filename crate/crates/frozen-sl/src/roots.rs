//! Spectra by complex Newton iteration with argument-principle backup.
//!
//! Eigenvalues sit near the seeds rho = n - (alpha+beta)/2, equispaced in
//! rho with perturbations shrinking like 1/n, so Newton on rho -> Delta(rho^2)
//! from each seed has well separated basins. The one seed at rho = 0 (first
//! eigenvalue when alpha = beta = 1) runs in the lambda chart instead, where
//! Delta is analytic and the rho chart is singular. Seeds that fail or
//! collide fall back to winding-number counts over rectangles, subdividing
//! until the zero is isolated, then polish by Newton.

use crate::charfn::CharacteristicFn;
use crate::config::{asymptotic_rho, CaseGroup, ProblemConfig};
use crate::error::{Error, Result};
use crate::spectrum::Spectrum;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct SpectrumOpts {
    /// Newton step tolerance, relative, measured in rho.
    pub tol_rho: f64,
    pub max_iter: usize,
    /// Roots are rejected if they leave |rho - seed| > basin_radius.
    pub basin_radius: f64,
    /// Two converged roots closer than this (in rho) trigger a contour
    /// count to distinguish one double root from two simple ones.
    pub tie_gap: f64,
    /// Run eigenvalue searches concurrently.
    pub parallel: bool,
    /// Extra argument-principle pass over every seed box, reporting
    /// count discrepancies in the notes.
    pub verify: bool,
}

impl Default for SpectrumOpts {
    fn default() -> Self {
        Self {
            tol_rho: 1e-12,
            max_iter: 64,
            basin_radius: 0.75,
            tie_gap: 1e-6,
            parallel: false,
            verify: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RootRecord {
    pub index: usize,
    pub lambda: Complex64,
    pub rho: Complex64,
    /// |Delta(lambda_n)| at the accepted root.
    pub residual: f64,
    /// Local scale max(1, |dDelta/drho|/2) the residual is judged against.
    pub scale: f64,
    pub from_fallback: bool,
}

#[derive(Debug, Clone, Default)]
pub struct ForwardReport {
    pub roots: Vec<RootRecord>,
    pub notes: Vec<String>,
}

/// Compute the first `n_max` eigenvalues of the problem bound to `f`.
pub fn compute_spectrum(
    f: &CharacteristicFn,
    n_max: usize,
    opts: &SpectrumOpts,
) -> Result<Spectrum> {
    compute_spectrum_with_report(f, n_max, opts).map(|(s, _)| s)
}

pub fn compute_spectrum_with_report(
    f: &CharacteristicFn,
    n_max: usize,
    opts: &SpectrumOpts,
) -> Result<(Spectrum, ForwardReport)> {
    assert!(n_max >= 1, "n_max must be at least 1");
    let cfg = *f.config();
    let indices: Vec<usize> = (1..=n_max).collect();
    let attempt = |&n: &usize| -> (usize, Option<Complex64>) { (n, newton_from_seed(f, &cfg, n, opts)) };
    let first_pass: Vec<(usize, Option<Complex64>)> = if opts.parallel {
        indices.par_iter().map(attempt).collect()
    } else {
        indices.iter().map(attempt).collect()
    };

    let mut notes = Vec::new();
    let mut rhos: Vec<Complex64> = Vec::with_capacity(n_max);
    let mut fallback_used = vec![false; n_max];
    for (n, found) in first_pass {
        match found {
            Some(rho) => rhos.push(rho),
            None => {
                let rho = contour_fallback(f, &cfg, n, opts)
                    .ok_or(Error::RootFindFailed { index: n })?;
                notes.push(format!("index {n}: Newton failed, contour fallback used"));
                fallback_used[n - 1] = true;
                rhos.push(rho);
            }
        }
    }

    resolve_ties(f, &cfg, &mut rhos, &mut notes, opts)?;

    if opts.verify {
        verify_counts(f, &cfg, &rhos, &mut notes, opts);
    }

    let mut roots = Vec::with_capacity(n_max);
    let mut values = Vec::with_capacity(n_max);
    for (i, &rho) in rhos.iter().enumerate() {
        let lambda = rho * rho;
        let (v, d) = f.eval_rho_with_derivative(rho);
        let scale = (d.norm() / 2.0).max(1.0);
        roots.push(RootRecord {
            index: i + 1,
            lambda,
            rho,
            residual: v.norm(),
            scale,
            from_fallback: fallback_used[i],
        });
        values.push(lambda);
    }
    Ok((Spectrum::new(values, cfg), ForwardReport { roots, notes }))
}

fn newton_from_seed(
    f: &CharacteristicFn,
    cfg: &ProblemConfig,
    n: usize,
    opts: &SpectrumOpts,
) -> Option<Complex64> {
    let seed = asymptotic_rho(n, cfg);
    let rho = if seed < 0.25 {
        // rho chart is singular at the origin; iterate in lambda
        let lambda = newton_lambda(f, opts)?;
        let r = lambda.sqrt();
        if r.norm() > opts.basin_radius {
            return None;
        }
        r
    } else {
        newton_rho(f, seed, opts)?
    };
    // converged, but insist the value is a genuine zero at local scale
    let (v, d) = f.eval_rho_with_derivative(rho);
    let scale = (d.norm() / 2.0).max(1.0);
    if v.norm() <= 1e-6 * scale {
        Some(rho)
    } else {
        None
    }
}

fn newton_rho(f: &CharacteristicFn, seed: f64, opts: &SpectrumOpts) -> Option<Complex64> {
    let mut rho = Complex64::new(seed, 0.0);
    for _ in 0..opts.max_iter {
        let (v, d) = f.eval_rho_with_derivative(rho);
        if !v.is_finite() || !d.is_finite() || d.norm() < 1e-290 {
            return None;
        }
        let step = v / d;
        rho -= step;
        if (rho - seed).norm() > opts.basin_radius {
            return None;
        }
        if step.norm() <= opts.tol_rho * rho.norm().max(1.0) {
            return Some(rho);
        }
    }
    None
}

fn newton_lambda(f: &CharacteristicFn, opts: &SpectrumOpts) -> Option<Complex64> {
    let mut lambda = Complex64::new(0.0, 0.0);
    for _ in 0..opts.max_iter {
        let (v, d) = f.eval_lambda_with_derivative(lambda);
        if !v.is_finite() || !d.is_finite() || d.norm() < 1e-290 {
            return None;
        }
        let step = v / d;
        lambda -= step;
        if lambda.norm() > opts.basin_radius * opts.basin_radius {
            return None;
        }
        let step_tol = opts.tol_rho * (2.0 * lambda.norm().sqrt()).max(opts.tol_rho);
        if step.norm() <= step_tol {
            return Some(lambda);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Argument-principle machinery
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Rect {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Rect {
    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    fn diag(&self) -> f64 {
        ((self.x1 - self.x0).powi(2) + (self.y1 - self.y0).powi(2)).sqrt()
    }

    fn grown(&self, eps: f64) -> Rect {
        Rect {
            x0: self.x0 - eps,
            x1: self.x1 + eps,
            y0: self.y0 - eps,
            y1: self.y1 + eps,
        }
    }

    fn split(&self, t: f64) -> (Rect, Rect) {
        if self.x1 - self.x0 >= self.y1 - self.y0 {
            let xm = self.x0 + t * (self.x1 - self.x0);
            (Rect { x1: xm, ..*self }, Rect { x0: xm, ..*self })
        } else {
            let ym = self.y0 + t * (self.y1 - self.y0);
            (Rect { y1: ym, ..*self }, Rect { y0: ym, ..*self })
        }
    }
}

/// Number of zeros of rho -> Delta(rho^2) inside the rectangle, by the
/// discrete winding number of the boundary image. `None` when a zero sits
/// (numerically) on the boundary or refinement runs out.
fn winding_number(f: &CharacteristicFn, rect: &Rect) -> Option<i64> {
    let corners = [
        Complex64::new(rect.x0, rect.y0),
        Complex64::new(rect.x1, rect.y0),
        Complex64::new(rect.x1, rect.y1),
        Complex64::new(rect.x0, rect.y1),
    ];
    let mut total = 0.0;
    for e in 0..4 {
        let za = corners[e];
        let zb = corners[(e + 1) % 4];
        // initial subdivision, then adaptive refinement
        let pieces = 8;
        let mut prev_z = za;
        let mut prev_v = f.eval_rho(prev_z);
        for p in 1..=pieces {
            let t = p as f64 / pieces as f64;
            let z = za + (zb - za) * t;
            let v = f.eval_rho(z);
            total += arg_delta(f, prev_z, prev_v, z, v, 24)?;
            prev_z = z;
            prev_v = v;
        }
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.25 {
        return None;
    }
    Some(rounded as i64)
}

fn arg_delta(
    f: &CharacteristicFn,
    za: Complex64,
    va: Complex64,
    zb: Complex64,
    vb: Complex64,
    depth: usize,
) -> Option<f64> {
    if !va.is_finite() || !vb.is_finite() || va.norm() < 1e-280 || vb.norm() < 1e-280 {
        return None;
    }
    let d = (vb / va).arg();
    if d.abs() <= 1.0 {
        return Some(d);
    }
    if depth == 0 {
        return None;
    }
    let zm = (za + zb) * 0.5;
    let vm = f.eval_rho(zm);
    Some(arg_delta(f, za, va, zm, vm, depth - 1)? + arg_delta(f, zm, vm, zb, vb, depth - 1)?)
}

fn winding_with_retries(f: &CharacteristicFn, rect: &Rect) -> Option<i64> {
    let mut r = *rect;
    for attempt in 0..4 {
        if let Some(c) = winding_number(f, &r) {
            return Some(c);
        }
        r = r.grown(7e-3 * (attempt as f64 + 1.0) * rect.diag().max(1e-3));
    }
    None
}

/// All zeros inside the rectangle (with multiplicity), located by
/// recursive bisection of the winding count.
fn zeros_in_rect(f: &CharacteristicFn, rect: Rect, acc: &mut Vec<Complex64>, depth: usize) {
    let count = match winding_with_retries(f, &rect) {
        Some(c) => c,
        None => return,
    };
    if count <= 0 {
        return;
    }
    if rect.diag() < 5e-5 || depth == 0 {
        for _ in 0..count {
            acc.push(rect.center());
        }
        return;
    }
    for t in [0.5, 0.53, 0.461] {
        let (ra, rb) = rect.split(t);
        let ca = winding_with_retries(f, &ra);
        let cb = winding_with_retries(f, &rb);
        if let (Some(ca), Some(cb)) = (ca, cb) {
            if ca + cb == count {
                if ca > 0 {
                    zeros_in_rect(f, ra, acc, depth - 1);
                }
                if cb > 0 {
                    zeros_in_rect(f, rb, acc, depth - 1);
                }
                return;
            }
        }
    }
    // could not split consistently; record the center with multiplicity
    for _ in 0..count {
        acc.push(rect.center());
    }
}

/// Polish a coarse zero location by unconstrained Newton steps.
fn polish(f: &CharacteristicFn, start: Complex64, opts: &SpectrumOpts) -> Option<Complex64> {
    let mut rho = start;
    for _ in 0..opts.max_iter {
        let (v, d) = f.eval_rho_with_derivative(rho);
        if !v.is_finite() || !d.is_finite() || d.norm() < 1e-290 {
            return None;
        }
        let step = v / d;
        rho -= step;
        if (rho - start).norm() > 0.2 {
            return None;
        }
        if step.norm() <= opts.tol_rho * rho.norm().max(1.0) {
            return Some(rho);
        }
    }
    None
}

fn contour_fallback(
    f: &CharacteristicFn,
    cfg: &ProblemConfig,
    n: usize,
    opts: &SpectrumOpts,
) -> Option<Complex64> {
    let seed = asymptotic_rho(n, cfg);
    for height in [1.5, 3.0] {
        let rect = Rect {
            x0: seed - opts.basin_radius,
            x1: seed + opts.basin_radius,
            y0: -height,
            y1: height,
        };
        let mut coarse = Vec::new();
        zeros_in_rect(f, rect, &mut coarse, 40);
        coarse.sort_by(|p, q| {
            let dp = (p - seed).norm();
            let dq = (q - seed).norm();
            dp.partial_cmp(&dq).unwrap()
        });
        for cand in coarse {
            if let Some(rho) = polish(f, cand, opts) {
                return Some(rho);
            }
        }
    }
    None
}

/// Roots closer than tie_gap either share a multiple zero (keep both, that
/// is the multiplicity convention) or one Newton run fell into its
/// neighbour's basin, in which case the missed zero is hunted down by
/// contour subdivision and reassigned.
fn resolve_ties(
    f: &CharacteristicFn,
    cfg: &ProblemConfig,
    rhos: &mut [Complex64],
    notes: &mut Vec<String>,
    opts: &SpectrumOpts,
) -> Result<()> {
    let n = rhos.len();
    for i in 0..n {
        for j in i + 1..n {
            if (rhos[i] - rhos[j]).norm() >= opts.tie_gap {
                continue;
            }
            let center = (rhos[i] + rhos[j]) * 0.5;
            let half = 1e-3_f64.max(4.0 * (rhos[i] - rhos[j]).norm());
            let rect = Rect {
                x0: center.re - half,
                x1: center.re + half,
                y0: center.im - half,
                y1: center.im + half,
            };
            match winding_with_retries(f, &rect) {
                Some(c) if c >= 2 => {
                    notes.push(format!(
                        "indices {} and {}: multiple eigenvalue recorded with multiplicity {c}",
                        i + 1,
                        j + 1
                    ));
                }
                Some(_) => {
                    // one simple zero claimed twice; search both seed boxes
                    let si = asymptotic_rho(i + 1, cfg);
                    let sj = asymptotic_rho(j + 1, cfg);
                    let rect = Rect {
                        x0: si.min(sj) - opts.basin_radius,
                        x1: si.max(sj) + opts.basin_radius,
                        y0: -1.5,
                        y1: 1.5,
                    };
                    let mut coarse = Vec::new();
                    zeros_in_rect(f, rect, &mut coarse, 40);
                    let mut candidates: Vec<Complex64> = coarse
                        .into_iter()
                        .filter_map(|p| polish(f, p, opts))
                        .filter(|p| (p - rhos[i]).norm() > opts.tie_gap)
                        .collect();
                    candidates.dedup_by(|a, b| (*a - *b).norm() < opts.tie_gap);
                    if let Some(other) = candidates.first() {
                        // give the farther seed the recovered zero
                        let keep_i = (rhos[i] - si).norm() <= (rhos[j] - sj).norm();
                        let slot = if keep_i { j } else { i };
                        rhos[slot] = *other;
                        notes.push(format!(
                            "index {}: basin overlap resolved by contour search",
                            slot + 1
                        ));
                    } else {
                        return Err(Error::RootFindFailed { index: j + 1 });
                    }
                }
                None => {
                    notes.push(format!(
                        "indices {} and {}: tie unresolved (contour failed), kept as-is",
                        i + 1,
                        j + 1
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Count zeros in a box around every seed and note mismatches. Skipped for
/// seeds too close to the origin, where the rho chart double-counts.
fn verify_counts(
    f: &CharacteristicFn,
    cfg: &ProblemConfig,
    rhos: &[Complex64],
    notes: &mut Vec<String>,
    opts: &SpectrumOpts,
) {
    let max_im = rhos.iter().map(|r| r.im.abs()).fold(0.0_f64, f64::max);
    let height = (2.0 * max_im).max(1.0);
    for (i, _) in rhos.iter().enumerate() {
        let seed = asymptotic_rho(i + 1, cfg);
        if seed < 0.5 {
            continue;
        }
        let rect = Rect {
            x0: seed - 0.5,
            x1: seed + 0.5,
            y0: -height,
            y1: height,
        };
        match winding_with_retries(f, &rect) {
            Some(1) => {}
            Some(c) => notes.push(format!(
                "verification: seed box {} holds {c} zeros, expected 1",
                i + 1
            )),
            None => notes.push(format!("verification: seed box {} count failed", i + 1)),
        }
    }
}

// ---------------------------------------------------------------------------
// Degeneration structure of computed spectra
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct DegenEntry {
    /// 1-based position in the ordered eigenvalue list.
    pub position: usize,
    /// The forced value this eigenvalue must take.
    pub expected: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone)]
pub struct DegenerationReport {
    pub group: CaseGroup,
    pub entries: Vec<DegenEntry>,
    pub max_deviation: f64,
}

/// Positions (1-based) and forced values of the degenerate part of the
/// spectrum for the given config, up to `len` entries.
pub fn designated_eigenvalues(cfg: &ProblemConfig, len: usize) -> Vec<(usize, f64)> {
    let k = cfg.k;
    let group = cfg.classify();
    let mut out = Vec::new();
    for n in 1.. {
        let position = match group {
            CaseGroup::I => k * n,
            CaseGroup::II => k * n - (k - 1) / 2,
            CaseGroup::III => k * n - k / 2 + 1,
            _ => break,
        };
        if position > len {
            break;
        }
        let expected = match group {
            CaseGroup::I => (k * n) as f64 * (k * n) as f64,
            _ => (k as f64 * (n as f64 - 0.5)).powi(2),
        };
        out.push((position, expected));
    }
    out
}

/// Check the forced-eigenvalue identities a spectrum must satisfy in a
/// degenerate group. Rejects non-degenerate configs.
pub fn check_degeneration_spectrum(spec: &Spectrum) -> Result<DegenerationReport> {
    let group = spec.config.classify();
    if !group.is_degenerate() {
        return Err(Error::RequiresDegenerate);
    }
    let mut entries = Vec::new();
    let mut max_deviation = 0.0_f64;
    for (position, expected) in designated_eigenvalues(&spec.config, spec.len()) {
        let deviation = (spec.values[position - 1] - expected).norm();
        max_deviation = max_deviation.max(deviation);
        entries.push(DegenEntry {
            position,
            expected,
            deviation,
        });
    }
    Ok(DegenerationReport {
        group,
        entries,
        max_deviation,
    })
}

/// The comb sum 1 + 2 sum_{j<=(k-1)/2} cos(2 j n a) + (1+(-1)^k)/2 cos(pi n)
/// collapses to k when k divides n and to 0 otherwise. Returns the integer
/// value after checking the two forms against each other.
pub fn trig_comb_sum(n: usize, cfg: &ProblemConfig) -> i64 {
    let k = cfg.k;
    let a = cfg.a();
    let mut explicit = 1.0;
    for j in 1..=(k - 1) / 2 {
        explicit += 2.0 * (2.0 * j as f64 * n as f64 * a).cos();
    }
    if k % 2 == 0 {
        explicit += (PI * n as f64).cos();
    }
    let closed = if n % k == 0 { k as i64 } else { 0 };
    assert!(
        (explicit - closed as f64).abs() < 1e-8 * k as f64,
        "comb sum forms disagree: explicit {explicit}, closed {closed} (n={n}, k={k})"
    );
    closed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Potential;

    fn cfg(alpha: u8, beta: u8, k: usize) -> ProblemConfig {
        ProblemConfig::new(alpha, beta, k).unwrap()
    }

    fn rl(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_potential_spectra_match_unperturbed_values() {
        let opts = SpectrumOpts::default();
        for (config, expected_rho) in [
            (cfg(0, 0, 2), |n: usize| n as f64),
            (cfg(0, 1, 2), |n: usize| n as f64 - 0.5),
            (cfg(1, 0, 2), |n: usize| n as f64 - 0.5),
            (cfg(1, 1, 2), |n: usize| n as f64 - 1.0),
        ] {
            let f = CharacteristicFn::from_potential(&config, &Potential::zero()).unwrap();
            let spec = compute_spectrum(&f, 12, &opts).unwrap();
            for n in 1..=12 {
                let rho = spec.rho(n);
                let want = expected_rho(n);
                assert!(
                    (rho - want).norm() < 1e-10,
                    "{config} index {n}: rho {rho} vs {want}"
                );
            }
        }
    }

    #[test]
    fn constant_potential_has_forced_even_indexed_eigenvalues() {
        let config = cfg(0, 0, 2);
        let q = Potential::constant(rl(1.0));
        let f = CharacteristicFn::from_potential(&config, &q).unwrap();
        let (spec, report) = compute_spectrum_with_report(&f, 8, &SpectrumOpts::default()).unwrap();
        assert!((spec.values[1] - rl(4.0)).norm() < 1e-9, "{}", spec.values[1]);
        assert!((spec.values[3] - rl(16.0)).norm() < 1e-9);
        assert!((spec.values[5] - rl(36.0)).norm() < 1e-9);
        for r in &report.roots {
            assert!(
                r.residual <= 1e-8 * r.scale,
                "index {} residual {} scale {}",
                r.index,
                r.residual,
                r.scale
            );
        }
        let deg = check_degeneration_spectrum(&spec).unwrap();
        assert!(deg.max_deviation < 1e-8, "{}", deg.max_deviation);
        assert_eq!(
            deg.entries.iter().map(|e| e.position).collect::<Vec<_>>(),
            vec![2, 4, 6, 8]
        );
    }

    #[test]
    fn degeneration_check_flags_constructed_violation() {
        let config = cfg(0, 0, 2);
        let mut values: Vec<Complex64> = (1..=8).map(|n| rl((n * n) as f64)).collect();
        values[1] = rl(4.1);
        let spec = Spectrum::new(values, config);
        let report = check_degeneration_spectrum(&spec).unwrap();
        assert!((report.max_deviation - 0.1).abs() < 1e-12);
        assert_eq!(report.entries[0].position, 2);
        assert!((report.entries[0].deviation - 0.1).abs() < 1e-12);
    }

    #[test]
    fn degeneration_check_rejects_nondegenerate_config() {
        let spec = Spectrum::new(vec![rl(0.25)], cfg(0, 1, 2));
        assert!(matches!(
            check_degeneration_spectrum(&spec),
            Err(Error::RequiresDegenerate)
        ));
    }

    #[test]
    fn designated_positions_for_the_three_groups() {
        // group ii, k = 3: positions k n - (k-1)/2 = 2, 5, 8, ...
        let ii = designated_eigenvalues(&cfg(1, 0, 3), 10);
        assert_eq!(
            ii.iter().map(|e| e.0).collect::<Vec<_>>(),
            vec![2, 5, 8]
        );
        assert!((ii[0].1 - 2.25).abs() < 1e-15); // (3/2)^2
        // group iii, k = 2: positions 2n
        let iii = designated_eigenvalues(&cfg(1, 1, 2), 6);
        assert_eq!(iii.iter().map(|e| e.0).collect::<Vec<_>>(), vec![2, 4, 6]);
        assert!((iii[0].1 - 1.0).abs() < 1e-15); // (2 * 1/2)^2
    }

    #[test]
    fn comb_sum_examples_and_agreement() {
        assert_eq!(trig_comb_sum(1, &cfg(0, 0, 2)), 0);
        assert_eq!(trig_comb_sum(2, &cfg(0, 0, 2)), 2);
        assert_eq!(trig_comb_sum(0, &cfg(0, 0, 3)), 3);
        for k in 1..=6 {
            let config = cfg(0, 0, k);
            for n in 0..=30 {
                let got = trig_comb_sum(n, &config);
                assert_eq!(got, if n % k == 0 { k as i64 } else { 0 });
            }
        }
    }

    #[test]
    fn winding_counts_zeros_of_unperturbed_function() {
        let config = cfg(0, 0, 2);
        let f = CharacteristicFn::from_potential(&config, &Potential::zero()).unwrap();
        // sin(rho pi)/rho has zeros at rho = 1, 2, 3
        let three = winding_number(
            &f,
            &Rect {
                x0: 0.5,
                x1: 3.5,
                y0: -1.0,
                y1: 1.0,
            },
        )
        .unwrap();
        assert_eq!(three, 3);
        let none = winding_number(
            &f,
            &Rect {
                x0: 0.2,
                x1: 0.8,
                y0: -0.5,
                y1: 0.5,
            },
        )
        .unwrap();
        assert_eq!(none, 0);
    }

    #[test]
    fn contour_fallback_silent_when_newton_suffices() {
        // complex potential, non-trivial spectrum: just exercise the full path
        let config = cfg(0, 1, 3);
        let q = Potential::from_fourier_cos(vec![
            Complex64::new(0.4, 0.3),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.2, -0.6),
        ]);
        let f = CharacteristicFn::from_potential(&config, &q).unwrap();
        let (spec, report) =
            compute_spectrum_with_report(&f, 10, &SpectrumOpts::default()).unwrap();
        assert_eq!(spec.len(), 10);
        for r in &report.roots {
            assert!(r.residual <= 1e-8 * r.scale);
            assert!(!r.from_fallback);
        }
        let (res, plausible) = spec.residuals_checked(10.0).unwrap();
        assert!(plausible, "residual tail: {res:?}");
    }

    #[test]
    fn parallel_and_serial_agree() {
        let config = cfg(1, 1, 2);
        let q = Potential::from_fourier_cos(vec![rl(0.5), rl(0.0), Complex64::new(0.3, 0.2)]);
        let f = CharacteristicFn::from_potential(&config, &q).unwrap();
        let serial = compute_spectrum(&f, 8, &SpectrumOpts::default()).unwrap();
        let parallel = compute_spectrum(
            &f,
            8,
            &SpectrumOpts {
                parallel: true,
                ..Default::default()
            },
        )
        .unwrap();
        for (a, b) in serial.values.iter().zip(&parallel.values) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
