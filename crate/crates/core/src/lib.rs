//! Iterative regularization for first-kind Fredholm integral equations
//! with noisy data.
//!
//! The solver runs the DSM-derived iteration
//!
//! ```text
//! u_n = q u_{n-1} + (1 - q) (T^(m_n) + a_n I)^{-1} K*_{m_n} f_delta,   a_n = alpha0 q^n
//! ```
//!
//! where `T^(m)` is a degenerate-kernel (compound Simpson) approximation of
//! `K*K`, `K*_m` a piecewise-Taylor approximation of the adjoint, and the
//! level `m_n` grows with `1/a_n` so the operator errors stay below the
//! regularization parameter. Iteration stops by a discrepancy-type rule.
//! All computations are carried out in Haar wavelet coordinates on `[0, 1]`.
//!
//! The crate is `no_std` and only needs `alloc`. Seeded noise, CSV reports
//! and the command-line harness live in `fredholm-dsm-experiment`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod assembly;
pub mod dsm;
pub mod haar;
pub mod kernel;
pub mod matrix;
pub mod problem;
pub mod quadrature;
pub mod samples;
pub mod shifted;

pub use assembly::{
    assemble_gram, assemble_rhs, data_coefficients, error_budget, galerkin_matrix, Discretization,
    ErrorBudget, GramMatrix, Side,
};
pub use dsm::{
    closed_form_iterate, discrepancy_update, dsm_step, geometric_weights, rank_schedule,
    run_adaptive, run_fixed, AdaptiveRun, DiscrepancyForm, FixedScheme, IterationRecord,
    IterationState, RankChoice, SolveOutcome, SolverConfig, StopReason,
};
pub use error::Error;
pub use haar::{exp_haar_inner, haar_eval, HaarCoefficients, HaarIndex};
pub use kernel::{ExpKernel, FnKernel, Kernel};
pub use matrix::SquareMatrix;
pub use problem::{avg_error, exact_problem, laplace_rhs, Problem};
pub use quadrature::{simpson_rule, taylor_partition, QuadratureRule, TaylorPartition};
pub use samples::SampledFunction;
pub use shifted::{solve_shifted, ShiftedCholesky, ShiftedSystem};

pub type Result<T, E = Error> = core::result::Result<T, E>;
