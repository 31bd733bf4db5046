use super::matrix::{DenseMatrix, LinearOperator};
use super::{dot, norm, SolveReport, StopReason};
use crate::error::{Error, Result};

/// Penalty matrix `B` of `‖Ac - y‖² + γ cᵀBc`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Regularizer {
    #[default]
    Identity,
    /// Symmetric positive definite `B`.
    Dense(DenseMatrix),
}

impl Regularizer {
    fn apply(&self, c: &[f64]) -> Vec<f64> {
        match self {
            Self::Identity => c.to_vec(),
            Self::Dense(b) => b.apply(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgOptions {
    /// Stop once `‖(AᵀA + γB)c - Aᵀy‖ ≤ tol·‖Aᵀy‖`.
    pub tol: f64,
    /// Defaults to `10·N + 100`.
    pub max_iter: Option<usize>,
    /// Start vector, zero when absent.
    pub initial: Option<Vec<f64>>,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: None, initial: None }
    }
}

/// Solves the generalized normal equation `(AᵀA + γB) c = Aᵀy` by conjugate
/// gradients without forming `AᵀA`.
pub fn tikhonov_cg<A: LinearOperator + ?Sized>(
    a: &A,
    y: &[f64],
    gamma: f64,
    reg: &Regularizer,
    opts: &CgOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    let n = a.ncols();
    if y.len() != a.nrows() {
        return Err(Error::ShapeMismatch(format!("{} data values for {} rows", y.len(), a.nrows())));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("regularization γ = {gamma} must be positive")));
    }
    if let Regularizer::Dense(b) = reg {
        if b.nrows() != n || b.ncols() != n {
            return Err(Error::ShapeMismatch(format!("regularizer must be {n}×{n}")));
        }
        let scale = b.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !b.is_symmetric(1e-12 * scale) {
            return Err(Error::InvalidArgument("regularizer must be symmetric".into()));
        }
    }
    let normal = |c: &[f64]| -> Vec<f64> {
        let mut out = a.apply_transpose(&a.apply(c));
        for (o, b) in out.iter_mut().zip(reg.apply(c)) {
            *o += gamma * b;
        }
        out
    };

    let rhs = a.apply_transpose(y);
    let rhs_norm = norm(&rhs);
    let max_iter = opts.max_iter.unwrap_or(10 * n + 100);
    let mut c = match &opts.initial {
        Some(c0) if c0.len() != n => {
            return Err(Error::ShapeMismatch(format!("start vector of length {} for {n} unknowns", c0.len())));
        }
        Some(c0) => c0.clone(),
        None => vec![0.0; n],
    };
    let mut r: Vec<f64> = rhs.iter().zip(normal(&c)).map(|(b, q)| b - q).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let target = opts.tol * rhs_norm;

    for it in 0..=max_iter {
        if rr.sqrt() <= target {
            let report = SolveReport {
                iterations: it,
                residual_norm: rr.sqrt(),
                stop_reason: StopReason::TolResidual,
                skipped_rows: 0,
            };
            return Ok((c, report));
        }
        if it == max_iter {
            break;
        }
        let q = normal(&p);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return Err(Error::InvalidArgument("normal matrix is not positive definite".into()));
        }
        let alpha = rr / pq;
        for i in 0..n {
            c[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    Ok((
        c,
        SolveReport {
            iterations: max_iter,
            residual_norm: rr.sqrt(),
            stop_reason: StopReason::MaxIter,
            skipped_rows: 0,
        },
    ))
}

/// `J_γ(c) = ‖Ac - y‖² + γ cᵀBc`.
pub fn tikhonov_objective<A: LinearOperator + ?Sized>(
    a: &A,
    y: &[f64],
    gamma: f64,
    reg: &Regularizer,
    c: &[f64],
) -> f64 {
    let r: Vec<f64> = a.apply(c).iter().zip(y).map(|(p, q)| p - q).collect();
    dot(&r, &r) + gamma * dot(c, &reg.apply(c))
}
