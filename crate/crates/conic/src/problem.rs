//! Problem data for the block-diagonal conic program
//!
//! ```text
//! (P)  min  Σ c_u·u + Σ c_v·v + Σ_j <C_j, X_j>
//!      s.t. A_u u + A_v v + Σ_j A_j(X_j) = b,   v ≥ 0,  X_j ⪰ 0
//!
//! (D)  max  b·y
//!      s.t. A_uᵀ y = c_u,  A_vᵀ y + w = c_v,  A_j*(y) + S_j = C_j,  w ≥ 0,  S_j ⪰ 0
//! ```
//!
//! Each PSD block couples to the constraint rows through a *frame*: a list of
//! symmetric matrices shared between blocks. A term `(row, frame, coef)` adds
//! `coef·<F_frame, X_j>` to constraint `row`. Problems whose blocks all read the
//! same handful of linear functionals (coordinates in a fixed operator basis)
//! share one frame, which keeps the Schur-complement assembly cheap.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::SolverError;

/// A scalar variable with its objective coefficient and sparse column.
#[derive(Debug, Clone, Default)]
pub struct ScalarVar {
    pub cost: f64,
    pub column: Vec<(usize, f64)>,
}

impl ScalarVar {
    pub fn new(cost: f64, column: Vec<(usize, f64)>) -> Self {
        Self { cost, column }
    }
}

/// One coupling `coef·<frame[frame_index], X>` into constraint `row`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub row: usize,
    pub frame: usize,
    pub coef: f64,
}

/// Shared list of symmetric matrices used to express block couplings.
pub type Frame = Arc<Vec<DMatrix<f64>>>;

#[derive(Debug, Clone)]
pub struct PsdBlock {
    pub dim: usize,
    pub cost: DMatrix<f64>,
    pub frame: Frame,
    pub terms: Vec<Term>,
}

impl PsdBlock {
    pub fn new(cost: DMatrix<f64>, frame: Frame, terms: Vec<Term>) -> Self {
        Self {
            dim: cost.nrows(),
            cost,
            frame,
            terms,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Problem {
    pub b: DVector<f64>,
    pub free: Vec<ScalarVar>,
    pub nonneg: Vec<ScalarVar>,
    pub blocks: Vec<PsdBlock>,
}

impl Problem {
    pub fn new(b: DVector<f64>) -> Self {
        Self {
            b,
            ..Default::default()
        }
    }

    pub fn rows(&self) -> usize {
        self.b.len()
    }

    /// Adds a free scalar and returns its index among the free variables.
    pub fn add_free(&mut self, var: ScalarVar) -> usize {
        self.free.push(var);
        self.free.len() - 1
    }

    pub fn add_nonneg(&mut self, var: ScalarVar) -> usize {
        self.nonneg.push(var);
        self.nonneg.len() - 1
    }

    pub fn add_block(&mut self, block: PsdBlock) -> usize {
        self.blocks.push(block);
        self.blocks.len() - 1
    }

    /// Total cone dimension used to normalize the duality measure.
    pub fn barrier_degree(&self) -> usize {
        self.nonneg.len() + self.blocks.iter().map(|b| b.dim).sum::<usize>()
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let m = self.rows();
        if m == 0 {
            return Err(SolverError::InvalidProblem("no constraint rows".into()));
        }
        if self.barrier_degree() == 0 {
            return Err(SolverError::InvalidProblem(
                "problem has no conic variables".into(),
            ));
        }
        for (kind, vars) in [("free", &self.free), ("nonneg", &self.nonneg)] {
            for (i, v) in vars.iter().enumerate() {
                if let Some(&(row, _)) = v.column.iter().find(|(r, _)| *r >= m) {
                    return Err(SolverError::InvalidProblem(format!(
                        "{kind} variable {i} references row {row} of {m}"
                    )));
                }
            }
        }
        for (j, block) in self.blocks.iter().enumerate() {
            let n = block.dim;
            if n == 0 || block.cost.shape() != (n, n) {
                return Err(SolverError::InvalidProblem(format!(
                    "block {j}: cost shape {:?} does not match dim {n}",
                    block.cost.shape()
                )));
            }
            if block.frame.iter().any(|f| f.shape() != (n, n)) {
                return Err(SolverError::InvalidProblem(format!(
                    "block {j}: frame matrices must be {n}x{n}"
                )));
            }
            for t in &block.terms {
                if t.row >= m || t.frame >= block.frame.len() {
                    return Err(SolverError::InvalidProblem(format!(
                        "block {j}: term {t:?} out of range"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Infinity norm of the constraint data, used for scaling the start point.
    pub(crate) fn data_scale(&self) -> (f64, f64) {
        let b_scale = self.b.amax();
        let mut c_scale: f64 = 0.0;
        for v in self.free.iter().chain(&self.nonneg) {
            c_scale = c_scale.max(v.cost.abs());
        }
        for block in &self.blocks {
            c_scale = c_scale.max(block.cost.amax());
        }
        (b_scale, c_scale)
    }
}
