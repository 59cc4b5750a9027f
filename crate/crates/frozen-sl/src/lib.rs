//! Forward and inverse spectral theory of Sturm-Liouville operators with
//! frozen argument.
//!
//! The boundary value problem is
//!
//! ```text
//!   -y''(x) + q(x) y(a) = lambda y(x),   0 < x < pi,
//!   y^(alpha)(0) = y^(beta)(pi) = 0,     alpha, beta in {0, 1},
//! ```
//!
//! where the potential term evaluates the unknown at the fixed interior
//! point a = pi/k instead of x, making the operator nonlocal and
//! non-self-adjoint. This crate computes spectra of such problems from a
//! potential (forward direction) and reconstructs the potential from a
//! spectrum (inverse direction), in both the degenerate parameter groups,
//! where part of the spectrum is forced and uniqueness needs a restriction
//! operator K, and the non-degenerate groups, where the spectrum alone
//! determines q.
//!
//! Start with the runnable examples (`cargo run --example forward_spectrum`
//! and friends); the `frozen-sl` binary wraps the same pipelines in a
//! file-based CLI.

pub mod charfn;
pub mod cli;
pub mod config;
pub mod error;
pub mod frozen_k;
pub mod grid;
pub mod inverse;
pub mod json_io;
pub mod numeric;
pub mod operators;
pub mod potential;
mod quad;
pub mod roots;
pub mod spectrum;
pub mod wfunction;

pub use charfn::{eval_delta_direct, eval_delta_w, CharacteristicFn, EvalMethod};
pub use config::{asymptotic_rho, classify_case, CaseGroup, ProblemConfig};
pub use error::{Error, Result};
pub use frozen_k::FrozenK;
pub use grid::Grid;
pub use inverse::{
    extract_w, isospectral_family, potential_from_spectrum_degenerate,
    potential_from_spectrum_nondegenerate, reconstruct_delta, InverseOpts, InverseReport,
    ReconstructedDelta,
};
pub use operators::{
    apply_q, apply_q_component, apply_r, apply_r_component, build_a, degeneration_residual,
    det_a_closed, first_block_from_w, invert_q, invert_r, potential_from_w_marching,
    solve_main_degenerate, solve_main_nondegenerate, w_from_potential_matrix,
    w_from_potential_piecewise, AMatrix, DegenerateClosure, StackedVector,
};
pub use potential::{Potential, PotentialRep};
pub use roots::{
    check_degeneration_spectrum, compute_spectrum, compute_spectrum_with_report, trig_comb_sum,
    DegenerationReport, ForwardReport, SpectrumOpts,
};
pub use spectrum::{Spectrum, DEFAULT_L2_TAIL_BOUND};
pub use wfunction::{WBasis, WFunction, WRep};
