//! Primal-dual interior-point solver for second-order cone programs
//!
//! ```text
//! minimize    cᵀx
//! subject to  G x + s = h,  s ∈ K
//!             A x = b
//! ```
//!
//! where `K` is a product of a non-negative orthant and second-order cones.

mod cones;
mod ipm;
mod kkt;
mod sparse;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

pub use cones::{ConeSpec, Scaling};
pub use kkt::{apply_inv_sq, DenseKkt, KktSolver};
pub use sparse::SparseMatrix;

/// A cone program in standard form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConeProgram {
    pub c: DVector<f64>,
    pub g: SparseMatrix,
    pub h: DVector<f64>,
    pub a: SparseMatrix,
    pub b: DVector<f64>,
    pub cones: ConeSpec,
}

impl ConeProgram {
    /// Checks that all dimensions agree.
    pub fn check_dimensions(&self) -> Result<(), String> {
        let n = self.c.len();
        let m = self.cones.dim();
        if self.g.nrows != m || self.g.ncols != n || self.h.len() != m {
            return Err(format!(
                "G is {}x{}, h has {} rows, expected {m}x{n}",
                self.g.nrows,
                self.g.ncols,
                self.h.len()
            ));
        }
        if self.a.ncols != n || self.a.nrows != self.b.len() {
            return Err(format!(
                "A is {}x{}, b has {} rows",
                self.a.nrows,
                self.a.ncols,
                self.b.len()
            ));
        }
        if self.cones.soc.iter().any(|&q| q < 1) {
            return Err("second-order cones must have dimension at least 1".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIterations,
    NumericalError,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    pub feastol: f64,
    pub abstol: f64,
    pub reltol: f64,
    pub max_iter: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            feastol: 1e-9,
            abstol: 1e-9,
            reltol: 1e-9,
            max_iter: 200,
            step_fraction: 0.99,
        }
    }
}

/// Primal-dual solution. For infeasible problems `y, z` (primal) or `x, s`
/// (dual) hold the normalized certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConeSolution {
    pub status: SolverStatus,
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub z: DVector<f64>,
    pub s: DVector<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub iterations: usize,
}

/// Solves `prog` with the given KKT backend.
pub fn solve_with<K: KktSolver>(
    prog: &ConeProgram,
    kkt: &mut K,
    settings: &SolverSettings,
) -> ConeSolution {
    if let Err(msg) = prog.check_dimensions() {
        panic!("malformed cone program: {msg}");
    }
    ipm::solve_homogeneous(prog, kkt, settings)
}

/// Solves `prog` with a dense KKT factorization.
pub fn solve(prog: &ConeProgram, settings: &SolverSettings) -> ConeSolution {
    solve_with(prog, &mut DenseKkt::new(), settings)
}
