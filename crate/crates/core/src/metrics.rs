//! Reconstruction error measures.

use crate::error::{Error, Result};
use crate::projector::Image;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    /// `‖f - g‖₂ / ‖g‖₂`, with `0/0 = 0`.
    pub relative_l2: f64,
    pub max_abs: f64,
    pub mean_abs: f64,
}

/// Errors of `estimate` against `reference` on the same grid.
pub fn error_metrics(estimate: &Image, reference: &Image) -> Result<ErrorMetrics> {
    if estimate.rows() != reference.rows() || estimate.cols() != reference.cols() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} image compared with {}x{}",
            estimate.rows(),
            estimate.cols(),
            reference.rows(),
            reference.cols()
        )));
    }
    Ok(slice_metrics(estimate.values(), reference.values()))
}

pub(crate) fn slice_metrics(estimate: &[f64], reference: &[f64]) -> ErrorMetrics {
    let mut diff2 = 0.0;
    let mut ref2 = 0.0;
    let mut max_abs = 0.0f64;
    let mut sum_abs = 0.0;
    for (e, r) in estimate.iter().zip(reference) {
        let d = e - r;
        diff2 += d * d;
        ref2 += r * r;
        max_abs = max_abs.max(d.abs());
        sum_abs += d.abs();
    }
    let relative_l2 = if diff2 == 0.0 {
        0.0
    } else if ref2 == 0.0 {
        f64::INFINITY
    } else {
        (diff2 / ref2).sqrt()
    };
    let mean_abs = if estimate.is_empty() { 0.0 } else { sum_abs / estimate.len() as f64 };
    ErrorMetrics { relative_l2, max_abs, mean_abs }
}
