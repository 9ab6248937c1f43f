//! Dense primal-dual interior-point solver for small block-diagonal
//! semidefinite programs with free and nonnegative scalar variables.
//!
//! The solver targets problems with many small PSD blocks and at most a few
//! hundred equality constraints: the Schur complement is assembled densely and
//! factorized with partial-pivoting LU each iteration.
//!
//! The [`ConicSolver`] trait is the seam callers program against; the only
//! backend shipped here is [`InteriorPoint`] (HKM search direction with a
//! Mehrotra predictor-corrector step).

mod ipm;
mod problem;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

pub use ipm::{InteriorPoint, Settings};
pub use problem::{Frame, Problem, PsdBlock, ScalarVar, Term};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("no convergence after {iterations} iterations (pinf {primal_residual:.2e}, dinf {dual_residual:.2e}, gap {gap:.2e})")]
    NotConverged {
        iterations: usize,
        primal_residual: f64,
        dual_residual: f64,
        gap: f64,
    },
    #[error("numerical breakdown: {0}")]
    Numerical(String),
    #[error("unknown solver backend '{0}'")]
    UnknownBackend(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// All residuals and the relative gap below the requested tolerance.
    Optimal,
    /// Converged to the reduced tolerance only.
    Inaccurate,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Inaccurate => "inaccurate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveInfo {
    pub solver: &'static str,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub status: Status,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub free: DVector<f64>,
    pub nonneg: DVector<f64>,
    pub blocks: Vec<DMatrix<f64>>,
    /// Multipliers of the equality rows.
    pub y: DVector<f64>,
    pub nonneg_dual: DVector<f64>,
    pub block_duals: Vec<DMatrix<f64>>,
    pub info: SolveInfo,
}

pub trait ConicSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, problem: &Problem) -> Result<Solution, SolverError>;
}

/// Backend names accepted by [`backend_by_name`].
pub const BACKENDS: &[&str] = &["ipm", "ipm-safe"];

/// Looks up a backend by name. `ipm` is the default interior-point solver;
/// `ipm-safe` runs it with a shorter step fraction and more iterations.
pub fn backend_by_name(name: &str) -> Result<Box<dyn ConicSolver>, SolverError> {
    match name.trim().to_ascii_lowercase().as_str() {
        "" | "ipm" | "default" => Ok(Box::new(InteriorPoint::default())),
        "ipm-safe" => Ok(Box::new(InteriorPoint::labelled(
            Settings {
                step_fraction: 0.9,
                max_iter: 300,
                ..Settings::default()
            },
            "ipm-safe",
        ))),
        other => Err(SolverError::UnknownBackend(other.to_string())),
    }
}
