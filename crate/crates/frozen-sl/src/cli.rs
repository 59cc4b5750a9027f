//! File-based pipelines behind the `frozen-sl` binary.
//!
//! Four subcommands cover the workflows: `forward` (potential to spectrum
//! plus plot-ready samples of the characteristic function), `inverse`
//! (spectrum to potential, dispatching on the parameter group and taking a
//! restriction operator in the degenerate ones), `roundtrip` (forward then
//! inverse with error reporting, optionally swept over the eigenvalue
//! count), and `isospectral` (one family member per prescribed block).
//! Outputs are deterministic; a manifest.json in the output directory
//! records inputs, resolved options and wall time.

use crate::charfn::CharacteristicFn;
use crate::config::ProblemConfig;
use crate::error::Error;
use crate::frozen_k::FrozenK;
use crate::grid::Grid;
use crate::inverse::{
    isospectral_family, potential_from_spectrum_degenerate,
    potential_from_spectrum_nondegenerate, InverseOpts, InverseReport,
};
use crate::json_io::{
    config_json, format_f64, parse_config, parse_matrix, parse_potential, parse_spectrum,
    potential_json, write_file, JVal,
};
use crate::potential::{Potential, PotentialRep};
use crate::roots::{compute_spectrum_with_report, ForwardReport, SpectrumOpts};
use crate::spectrum::Spectrum;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_UNREALIZABLE: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::RootFindFailed { .. }
            | Error::NonFiniteEigenvalue { .. }
            | Error::TailCollision { .. } => EXIT_NUMERIC,
            Error::DegenerationResidual { .. } | Error::SpectrumNotRealizable { .. } => {
                EXIT_UNREALIZABLE
            }
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "frozen-sl",
    version,
    about = "Forward and inverse spectra of Sturm-Liouville problems with frozen argument"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CommonOpts {
    /// Newton step tolerance for eigenvalue searches, measured in rho.
    #[arg(long = "tol-root", default_value_t = 1e-12)]
    pub tol_root: f64,
    /// Acceptance tolerance (absolute, in lambda) for forced eigenvalues.
    #[arg(long = "tol-deg", default_value_t = 1e-6)]
    pub tol_deg: f64,
    /// Kernel modes recovered by the inverse pipeline (default: explicit
    /// eigenvalue count minus a guard band of 10).
    #[arg(long)]
    pub modes: Option<usize>,
    /// Eigenvalues used as explicit product factors by the inverse pipeline.
    #[arg(long = "n-explicit")]
    pub n_explicit: Option<usize>,
    /// Total grid samples of reconstructed potentials (rounded up to a
    /// multiple of k).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Search eigenvalues concurrently.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute a spectrum; writes spectrum.json and delta-samples.csv.
    Forward {
        config: PathBuf,
        potential: PathBuf,
        /// Number of eigenvalues.
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        /// Upper end of the rho sampling range for the CSV (default n + 1).
        #[arg(long = "rho-max")]
        rho_max: Option<f64>,
        #[arg(long = "rho-samples", default_value_t = 400)]
        rho_samples: usize,
        /// Argument-principle verification pass over every seed box.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Reconstruct a potential; writes potential.json and report.json.
    Inverse {
        config: PathBuf,
        spectrum: PathBuf,
        /// Restriction operator for degenerate cases:
        /// identity | scalar:RE[,IM] | const:PATH | matrix:PATH.
        #[arg(long = "K")]
        restriction: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Forward then inverse; writes report.json with reconstruction errors.
    Roundtrip {
        config: PathBuf,
        potential: PathBuf,
        /// Number of eigenvalues (ignored with --sweep).
        #[arg(long, default_value_t = 40)]
        n: usize,
        /// Run the sweep n in {20, 40, 80} and report each error.
        #[arg(long)]
        sweep: bool,
        #[arg(long = "K")]
        restriction: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Iso-spectral family from prescribed first blocks (degenerate only);
    /// one potential per JSON file in P_DIR plus a pairwise distance matrix.
    Isospectral {
        config: PathBuf,
        spectrum: PathBuf,
        p_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Eigenvalues compared per member pair.
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let started = Instant::now();
    let result = match &cli.command {
        Command::Forward {
            config,
            potential,
            n,
            out,
            rho_max,
            rho_samples,
            verify,
            common,
        } => cmd_forward(
            config,
            potential,
            *n,
            out,
            *rho_max,
            *rho_samples,
            *verify,
            common,
        ),
        Command::Inverse {
            config,
            spectrum,
            restriction,
            out,
            common,
        } => cmd_inverse(config, spectrum, restriction.as_deref(), out, common),
        Command::Roundtrip {
            config,
            potential,
            n,
            sweep,
            restriction,
            out,
            common,
        } => cmd_roundtrip(
            config,
            potential,
            *n,
            *sweep,
            restriction.as_deref(),
            out,
            common,
        ),
        Command::Isospectral {
            config,
            spectrum,
            p_dir,
            out,
            n,
            common,
        } => cmd_isospectral(config, spectrum, p_dir, out, *n, common),
    };
    match result {
        Ok((out_dir, manifest_body)) => {
            let manifest = finish_manifest(manifest_body, started);
            if let Err(e) = write_file(&out_dir.join("manifest.json"), &manifest.render()) {
                eprintln!("frozen-sl: failed to write manifest: {e}");
                return EXIT_USAGE;
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("frozen-sl: {}", e.message);
            e.code
        }
    }
}

fn finish_manifest(body: JVal, started: Instant) -> JVal {
    let wall_ms = started.elapsed().as_millis() as i64;
    match body {
        JVal::Obj(mut fields) => {
            fields.push(("version".into(), JVal::Str(env!("CARGO_PKG_VERSION").into())));
            fields.push(("wall_ms".into(), JVal::Int(wall_ms)));
            JVal::Obj(fields)
        }
        other => other,
    }
}

fn load(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn common_manifest(
    command: &str,
    inputs: &[&Path],
    options: Vec<(&str, JVal)>,
) -> JVal {
    JVal::obj(vec![
        ("command", JVal::Str(command.into())),
        (
            "inputs",
            JVal::Arr(
                inputs
                    .iter()
                    .map(|p| JVal::Str(p.display().to_string()))
                    .collect(),
            ),
        ),
        ("options", JVal::obj(options)),
    ])
}

fn spectrum_opts(common: &CommonOpts, verify: bool) -> SpectrumOpts {
    SpectrumOpts {
        tol_rho: common.tol_root,
        parallel: common.parallel,
        verify,
        ..Default::default()
    }
}

fn inverse_opts(common: &CommonOpts, spectrum_len: usize) -> InverseOpts {
    InverseOpts {
        n_explicit: common.n_explicit.unwrap_or(60).min(spectrum_len),
        n_modes: common.modes,
        grid_total: common.grid,
        deg_tol: common.tol_deg,
    }
}

/// Parse the --K specification. Block functions (const:) accept the
/// potential schema, with fourier-cos coefficients read against the
/// period-matched basis cos(n k t) on (0, a).
fn parse_restriction(
    spec: &str,
    grid: &Grid,
) -> Result<FrozenK, CliError> {
    if spec == "identity" {
        return Ok(FrozenK::Identity);
    }
    if let Some(rest) = spec.strip_prefix("scalar:") {
        let mut parts = rest.split(',');
        let re: f64 = parts
            .next()
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad scalar restriction: {rest}")))?;
        let im: f64 = match parts.next() {
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| CliError::usage(format!("bad scalar restriction: {rest}")))?,
            None => 0.0,
        };
        return Ok(FrozenK::scalar(Complex64::new(re, im))?);
    }
    if let Some(path) = spec.strip_prefix("const:") {
        let p = load_block_function(Path::new(path), grid)?;
        return Ok(FrozenK::constant(p));
    }
    if let Some(path) = spec.strip_prefix("matrix:") {
        let (entries, dim) = parse_matrix(&load(Path::new(path))?)?;
        if dim != grid.per_block() {
            return Err(CliError::usage(format!(
                "restriction matrix is {dim}x{dim} but blocks carry {} samples; pass --grid {}",
                grid.per_block(),
                dim * grid.k()
            )));
        }
        return Ok(FrozenK::matrix(entries, dim)?);
    }
    Err(CliError::usage(format!(
        "unknown restriction \"{spec}\"; expected identity | scalar:RE[,IM] | const:PATH | matrix:PATH"
    )))
}

/// A function on (0, a) from a potential-schema file: grid samples must
/// match the block resolution; fourier-cos coefficients are evaluated
/// against cos(n k t).
fn load_block_function(path: &Path, grid: &Grid) -> Result<Vec<Complex64>, CliError> {
    let p = parse_potential(&load(path)?)?;
    match &p.rep {
        PotentialRep::Grid(values) => {
            if values.len() != grid.per_block() {
                return Err(CliError::usage(format!(
                    "{}: block function has {} samples, reconstruction grid wants {} per block",
                    path.display(),
                    values.len(),
                    grid.per_block()
                )));
            }
            Ok(values.clone())
        }
        PotentialRep::FourierCos(coeffs) => {
            let kf = grid.k() as f64;
            Ok((0..grid.per_block())
                .map(|s| {
                    let t = grid.block_point(s);
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(n, c)| c * (n as f64 * kf * t).cos())
                        .sum()
                })
                .collect())
        }
    }
}

fn spectrum_json(spec: &Spectrum, report: &ForwardReport) -> JVal {
    JVal::obj(vec![
        ("config", config_json(&spec.config)),
        ("values", JVal::complex_list(&spec.values)),
        ("residuals", JVal::complex_list(&spec.residuals())),
        (
            "root_residuals",
            JVal::Arr(
                report
                    .roots
                    .iter()
                    .map(|r| {
                        JVal::obj(vec![
                            ("index", JVal::Int(r.index as i64)),
                            ("residual", JVal::Num(r.residual)),
                            ("scale", JVal::Num(r.scale)),
                        ])
                    })
                    .collect(),
            ),
        ),
        (
            "notes",
            JVal::Arr(report.notes.iter().map(|s| JVal::Str(s.clone())).collect()),
        ),
    ])
}

fn inverse_report_json(cfg: &ProblemConfig, report: &InverseReport) -> JVal {
    JVal::obj(vec![
        ("case", JVal::Str(cfg.classify().to_string())),
        ("degenerate", JVal::Bool(cfg.is_degenerate())),
        ("sign", JVal::Num(report.sign)),
        ("n_explicit", JVal::Int(report.n_explicit as i64)),
        ("n_modes", JVal::Int(report.n_modes as i64)),
        (
            "degeneration_max_deviation",
            report
                .degeneration_max_deviation
                .map_or(JVal::Null, JVal::Num),
        ),
        (
            "degeneration_residual_w",
            report
                .degeneration_residual_w
                .map_or(JVal::Null, JVal::Num),
        ),
    ])
}

#[allow(clippy::too_many_arguments)]
fn cmd_forward(
    config_path: &Path,
    potential_path: &Path,
    n: usize,
    out: &Path,
    rho_max: Option<f64>,
    rho_samples: usize,
    verify: bool,
    common: &CommonOpts,
) -> Result<(PathBuf, JVal), CliError> {
    let cfg = parse_config(&load(config_path)?)?;
    let q = parse_potential(&load(potential_path)?)?;
    let f = CharacteristicFn::from_potential(&cfg, &q)?;
    let opts = spectrum_opts(common, verify);
    let (spec, report) = compute_spectrum_with_report(&f, n, &opts)?;

    write_file(
        &out.join("spectrum.json"),
        &spectrum_json(&spec, &report).render(),
    )
    .map_err(|e| CliError::usage(format!("write failed: {e}")))?;

    let hi = rho_max.unwrap_or(n as f64 + 1.0);
    let samples = rho_samples.max(2);
    let mut csv = String::from("rho,re_delta,im_delta\n");
    for i in 0..samples {
        let rho = hi * i as f64 / (samples - 1) as f64;
        let v = f.eval_rho(Complex64::new(rho, 0.0));
        let _ = writeln!(
            csv,
            "{},{},{}",
            format_f64(rho),
            format_f64(v.re),
            format_f64(v.im)
        );
    }
    write_file(&out.join("delta-samples.csv"), &csv)
        .map_err(|e| CliError::usage(format!("write failed: {e}")))?;

    let manifest = common_manifest(
        "forward",
        &[config_path, potential_path],
        vec![
            ("n", JVal::Int(n as i64)),
            ("rho_max", JVal::Num(hi)),
            ("rho_samples", JVal::Int(samples as i64)),
            ("tol_root", JVal::Num(common.tol_root)),
            ("tol_deg", JVal::Num(common.tol_deg)),
            ("verify", JVal::Bool(verify)),
            ("parallel", JVal::Bool(common.parallel)),
        ],
    );
    Ok((out.to_path_buf(), manifest))
}

fn reconstruct(
    cfg: &ProblemConfig,
    spec: &Spectrum,
    restriction: Option<&str>,
    opts: &InverseOpts,
) -> Result<(Potential, InverseReport), CliError> {
    if cfg.is_degenerate() {
        let spec_str = restriction.ok_or_else(|| {
            CliError::usage(
                "degenerate configuration requires --K (identity | scalar:RE[,IM] | const:PATH | matrix:PATH)",
            )
        })?;
        let grid = opts.grid_for(cfg.k);
        let k_op = parse_restriction(spec_str, &grid)?;
        Ok(potential_from_spectrum_degenerate(spec, &k_op, opts)?)
    } else {
        Ok(potential_from_spectrum_nondegenerate(spec, opts)?)
    }
}

fn cmd_inverse(
    config_path: &Path,
    spectrum_path: &Path,
    restriction: Option<&str>,
    out: &Path,
    common: &CommonOpts,
) -> Result<(PathBuf, JVal), CliError> {
    let cfg = parse_config(&load(config_path)?)?;
    let spec = parse_spectrum(&load(spectrum_path)?, cfg)?;
    let opts = inverse_opts(common, spec.len());
    let (q, report) = reconstruct(&cfg, &spec, restriction, &opts)?;

    write_file(&out.join("potential.json"), &potential_json(&q).render())
        .map_err(|e| CliError::usage(format!("write failed: {e}")))?;
    write_file(
        &out.join("report.json"),
        &inverse_report_json(&cfg, &report).render(),
    )
    .map_err(|e| CliError::usage(format!("write failed: {e}")))?;

    let manifest = common_manifest(
        "inverse",
        &[config_path, spectrum_path],
        vec![
            ("n_explicit", JVal::Int(opts.n_explicit as i64)),
            ("n_modes", JVal::Int(opts.modes() as i64)),
            ("grid", JVal::Int(opts.grid_for(cfg.k).len() as i64)),
            ("tol_root", JVal::Num(common.tol_root)),
            ("tol_deg", JVal::Num(common.tol_deg)),
            (
                "restriction",
                restriction.map_or(JVal::Null, |s| JVal::Str(s.into())),
            ),
        ],
    );
    Ok((out.to_path_buf(), manifest))
}

#[allow(clippy::too_many_arguments)]
fn cmd_roundtrip(
    config_path: &Path,
    potential_path: &Path,
    n: usize,
    sweep: bool,
    restriction: Option<&str>,
    out: &Path,
    common: &CommonOpts,
) -> Result<(PathBuf, JVal), CliError> {
    let cfg = parse_config(&load(config_path)?)?;
    let q = parse_potential(&load(potential_path)?)?;

    // fail fast on a missing restriction before any numerics
    if cfg.is_degenerate() && restriction.is_none() {
        return Err(CliError::usage(
            "degenerate configuration requires --K for the inverse stage",
        ));
    }

    let n_list: Vec<usize> = if sweep { vec![20, 40, 80] } else { vec![n] };
    let n_max = *n_list.iter().max().expect("nonempty");

    let f = CharacteristicFn::from_potential(&cfg, &q)?;
    let (spec, fwd_report) = compute_spectrum_with_report(&f, n_max, &spectrum_opts(common, false))?;

    let mut runs = Vec::new();
    let mut last_report: Option<InverseReport> = None;
    for &n_run in &n_list {
        let sub = Spectrum::new(spec.values[..n_run].to_vec(), cfg);
        let mut opts = inverse_opts(common, n_run);
        opts.n_explicit = opts.n_explicit.min(n_run);
        let (q_hat, report) = reconstruct(&cfg, &sub, restriction, &opts)?;
        let grid = opts.grid_for(cfg.k);
        let err = grid.rel_l2_error(&q_hat.to_grid(&grid)?, &q.to_grid(&grid)?);
        runs.push(JVal::obj(vec![
            ("n", JVal::Int(n_run as i64)),
            ("n_modes", JVal::Int(report.n_modes as i64)),
            ("rel_l2_error", JVal::Num(err)),
        ]));
        last_report = Some(report);
    }

    let max_root_residual = fwd_report
        .roots
        .iter()
        .map(|r| r.residual / r.scale)
        .fold(0.0_f64, f64::max);
    let mut fields = vec![
        ("case", JVal::Str(cfg.classify().to_string())),
        ("runs", JVal::Arr(runs)),
        ("forward_max_scaled_residual", JVal::Num(max_root_residual)),
    ];
    if let Some(report) = &last_report {
        fields.push(("sign", JVal::Num(report.sign)));
        fields.push((
            "degeneration_max_deviation",
            report
                .degeneration_max_deviation
                .map_or(JVal::Null, JVal::Num),
        ));
        fields.push((
            "degeneration_residual_w",
            report
                .degeneration_residual_w
                .map_or(JVal::Null, JVal::Num),
        ));
    }
    write_file(&out.join("report.json"), &JVal::obj(fields).render())
        .map_err(|e| CliError::usage(format!("write failed: {e}")))?;

    let manifest = common_manifest(
        "roundtrip",
        &[config_path, potential_path],
        vec![
            ("n", JVal::Int(n as i64)),
            ("sweep", JVal::Bool(sweep)),
            ("tol_root", JVal::Num(common.tol_root)),
            ("tol_deg", JVal::Num(common.tol_deg)),
            (
                "restriction",
                restriction.map_or(JVal::Null, |s| JVal::Str(s.into())),
            ),
        ],
    );
    Ok((out.to_path_buf(), manifest))
}

fn cmd_isospectral(
    config_path: &Path,
    spectrum_path: &Path,
    p_dir: &Path,
    out: &Path,
    n: usize,
    common: &CommonOpts,
) -> Result<(PathBuf, JVal), CliError> {
    let cfg = parse_config(&load(config_path)?)?;
    if !cfg.is_degenerate() {
        return Err(CliError::usage(
            "iso-spectral families exist in degenerate configurations only",
        ));
    }
    let spec = parse_spectrum(&load(spectrum_path)?, cfg)?;

    let mut p_files: Vec<PathBuf> = std::fs::read_dir(p_dir)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", p_dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    p_files.sort();

    let mut opts = inverse_opts(common, spec.len());
    // forward runs on the reconstructed members need a fine grid for the
    // pairwise eigenvalue comparison to be meaningful
    if opts.grid_total.is_none() {
        opts.grid_total = Some(16384);
    }
    let grid = opts.grid_for(cfg.k);

    let mut blocks = Vec::new();
    for p in &p_files {
        blocks.push(load_block_function(p, &grid)?);
    }
    let members = isospectral_family(&spec, &blocks, &opts)?;

    let mut member_spectra = Vec::new();
    for (i, member) in members.iter().enumerate() {
        write_file(
            &out.join(format!("potential-{i:02}.json")),
            &potential_json(member).render(),
        )
        .map_err(|e| CliError::usage(format!("write failed: {e}")))?;
        let f = CharacteristicFn::from_potential(&cfg, member)?;
        let (s, _) = compute_spectrum_with_report(&f, n, &spectrum_opts(common, false))?;
        member_spectra.push(s);
    }

    let count = members.len();
    let mut matrix = Vec::with_capacity(count);
    for i in 0..count {
        let mut row = Vec::with_capacity(count);
        for j in 0..count {
            let d = member_spectra[i]
                .values
                .iter()
                .zip(&member_spectra[j].values)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0_f64, f64::max);
            row.push(JVal::Num(d));
        }
        matrix.push(JVal::Arr(row));
    }
    let distances = JVal::obj(vec![
        (
            "files",
            JVal::Arr(
                p_files
                    .iter()
                    .map(|p| JVal::Str(p.display().to_string()))
                    .collect(),
            ),
        ),
        ("eigenvalues_compared", JVal::Int(n as i64)),
        ("max_pairwise_deviation", JVal::Arr(matrix)),
    ]);
    write_file(&out.join("distances.json"), &distances.render())
        .map_err(|e| CliError::usage(format!("write failed: {e}")))?;

    let manifest = common_manifest(
        "isospectral",
        &[config_path, spectrum_path, p_dir],
        vec![
            ("n", JVal::Int(n as i64)),
            ("members", JVal::Int(count as i64)),
            ("grid", JVal::Int(grid.len() as i64)),
            ("tol_root", JVal::Num(common.tol_root)),
            ("tol_deg", JVal::Num(common.tol_deg)),
        ],
    );
    Ok((out.to_path_buf(), manifest))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restriction_spec_parsing() {
        let grid = Grid::new(2, 8);
        assert!(matches!(
            parse_restriction("identity", &grid),
            Ok(FrozenK::Identity)
        ));
        assert!(matches!(
            parse_restriction("scalar:0.5", &grid),
            Ok(FrozenK::Scalar(_))
        ));
        assert!(matches!(
            parse_restriction("scalar:0.5,-1.0", &grid),
            Ok(FrozenK::Scalar(_))
        ));
        assert!(parse_restriction("scalar:-1", &grid).is_err());
        assert!(parse_restriction("banana", &grid).is_err());
    }

    #[test]
    fn error_codes_follow_the_contract() {
        let usage: CliError = Error::RequiresDegenerate.into();
        assert_eq!(usage.code, EXIT_USAGE);
        let numeric: CliError = Error::RootFindFailed { index: 3 }.into();
        assert_eq!(numeric.code, EXIT_NUMERIC);
        let unrealizable: CliError = Error::SpectrumNotRealizable {
            index: 2,
            deviation: 0.1,
            tol: 1e-6,
        }
        .into();
        assert_eq!(unrealizable.code, EXIT_UNREALIZABLE);
    }
}
