use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::matrix::{LinearOperator, SparseMatrix};
use super::{norm, SolveReport, StopReason};
use crate::error::{Error, Result};

/// Order in which rows are visited within a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RowOrder {
    #[default]
    Sequential,
    /// A fresh permutation per sweep drawn from ChaCha20 with this seed.
    Shuffled(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KaczmarzOptions {
    /// Relaxation `ω ∈ (0, 2)`.
    pub omega: f64,
    /// Stop once `‖c(k) - c(k-1)‖ ≤ δ` or `‖Ac(k) - y‖ ≤ δ‖y‖`.
    pub delta: f64,
    /// Defaults to `10·M/N + 100`.
    pub max_sweeps: Option<usize>,
    pub order: RowOrder,
}

impl Default for KaczmarzOptions {
    fn default() -> Self {
        Self { omega: 1.0, delta: 1e-6, max_sweeps: None, order: RowOrder::Sequential }
    }
}

impl KaczmarzOptions {
    fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega < 2.0) {
            return Err(Error::InvalidArgument(format!("relaxation ω = {} must lie in (0, 2)", self.omega)));
        }
        if !(self.delta >= 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance δ = {} must be ≥ 0", self.delta)));
        }
        Ok(())
    }

    pub fn sweeps_for(&self, rows: usize, cols: usize) -> usize {
        self.max_sweeps.unwrap_or(10 * rows / cols.max(1) + 100)
    }
}

/// Relaxed projection `u - ω (aᵀu - y)/(aᵀa) a` onto `{c : aᵀc = y}`.
pub fn project_row(u: &[f64], a: &[f64], y: f64, omega: f64) -> Result<Vec<f64>> {
    if u.len() != a.len() {
        return Err(Error::ShapeMismatch(format!("vector of length {} and row of length {}", u.len(), a.len())));
    }
    let aa: f64 = a.iter().map(|v| v * v).sum();
    if aa == 0.0 {
        return Err(Error::ZeroRow);
    }
    let au: f64 = a.iter().zip(u).map(|(p, q)| p * q).sum();
    let step = omega * (au - y) / aa;
    Ok(u.iter().zip(a).map(|(ui, ai)| ui - step * ai).collect())
}

/// Kaczmarz's method: cyclic relaxed projections onto the row hyperplanes.
/// From `c0 = 0` a consistent system converges to the minimal norm solution.
pub fn kaczmarz(a: &SparseMatrix, y: &[f64], c0: &[f64], opts: &KaczmarzOptions) -> Result<(Vec<f64>, SolveReport)> {
    run(a, y, c0, opts, false)
}

/// ART: Kaczmarz with every update followed by `max(0, ·)`.
pub fn kaczmarz_nonneg(
    a: &SparseMatrix,
    y: &[f64],
    c0: &[f64],
    opts: &KaczmarzOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    run(a, y, c0, opts, true)
}

fn run(
    a: &SparseMatrix,
    y: &[f64],
    c0: &[f64],
    opts: &KaczmarzOptions,
    nonneg: bool,
) -> Result<(Vec<f64>, SolveReport)> {
    opts.validate()?;
    let (m, n) = (a.nrows(), a.ncols());
    if y.len() != m || c0.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "matrix {m}×{n} with data of length {} and start of length {}",
            y.len(),
            c0.len()
        )));
    }
    let norms: Vec<f64> = (0..m).map(|j| a.row_norm_sq(j)).collect();
    let skipped_rows = norms.iter().filter(|&&v| v == 0.0).count();
    if skipped_rows > 0 {
        log::warn!("{skipped_rows} zero rows (rays missing the grid) are skipped");
    }
    let y_norm = norm(y);
    let max_sweeps = opts.sweeps_for(m, n);
    let mut rng = match opts.order {
        RowOrder::Shuffled(seed) => Some(ChaCha20Rng::seed_from_u64(seed)),
        RowOrder::Sequential => None,
    };
    let mut order: Vec<usize> = (0..m).filter(|&j| norms[j] > 0.0).collect();

    let mut c = c0.to_vec();
    let mut clamp_all = nonneg;
    let mut prev = c.clone();
    let residual = |c: &[f64]| norm(&a.apply(c).iter().zip(y).map(|(p, q)| p - q).collect::<Vec<_>>());

    for sweep in 1..=max_sweeps {
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        prev.copy_from_slice(&c);
        for &j in &order {
            let step = opts.omega * (a.row_dot(j, &c) - y[j]) / norms[j];
            let (cols, vals) = a.row(j);
            for (&k, &v) in cols.iter().zip(vals) {
                c[k] -= step * v;
                if nonneg && c[k] < 0.0 {
                    c[k] = 0.0;
                }
            }
            if clamp_all {
                c.iter_mut().for_each(|v| *v = v.max(0.0));
                clamp_all = false;
            }
        }
        let step_norm = norm(&c.iter().zip(&prev).map(|(p, q)| p - q).collect::<Vec<_>>());
        let res = residual(&c);
        let stop = if step_norm <= opts.delta {
            Some(StopReason::TolStep)
        } else if res <= opts.delta * y_norm {
            Some(StopReason::TolResidual)
        } else {
            None
        };
        if let Some(stop_reason) = stop {
            return Ok((c, SolveReport { iterations: sweep, residual_norm: res, stop_reason, skipped_rows }));
        }
    }
    let residual_norm = residual(&c);
    Ok((c, SolveReport { iterations: max_sweeps, residual_norm, stop_reason: StopReason::MaxIter, skipped_rows }))
}
