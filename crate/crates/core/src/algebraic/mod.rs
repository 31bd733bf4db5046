//! Fully discrete reconstruction over the pixel basis.
//!
//! The Radon matrix `A` has `a_{j,k}` equal to the length of line `j` inside
//! pixel `k`. Solvers: Kaczmarz and its non-negative variant (ART),
//! Tikhonov-regularized least squares by conjugate gradients, and dense
//! Householder QR least squares.

mod kaczmarz;
mod matrix;
mod qr;
mod tikhonov;

pub use kaczmarz::{kaczmarz, kaczmarz_nonneg, project_row, KaczmarzOptions, RowOrder};
pub use matrix::{build_radon_matrix, DenseMatrix, LinearOperator, SparseMatrix};
pub use qr::{least_squares_qr, QrSolution, QR_ELEMENT_LIMIT};
pub use tikhonov::{tikhonov_cg, tikhonov_objective, CgOptions, Regularizer};

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The last sweep moved the iterate by at most the tolerance.
    TolStep,
    /// The residual fell below the tolerance.
    TolResidual,
    MaxIter,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TolStep => "tol_step",
            Self::TolResidual => "tol_residual",
            Self::MaxIter => "max_iter",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    /// Sweeps for Kaczmarz, CG steps for Tikhonov.
    pub iterations: usize,
    /// `‖Ac - y‖` for Kaczmarz; the normal-equation residual for CG.
    pub residual_norm: f64,
    pub stop_reason: StopReason,
    /// Zero rows left out of the Kaczmarz sweeps.
    pub skipped_rows: usize,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.stop_reason != StopReason::MaxIter
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
