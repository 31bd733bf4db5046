use super::matrix::{DenseMatrix, LinearOperator};
use crate::error::{Error, Result};

/// Largest matrix (in elements) accepted by [`least_squares_qr`].
pub const QR_ELEMENT_LIMIT: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct QrSolution {
    pub coefficients: Vec<f64>,
    /// `‖Ac - y‖`, read off the tail of `Qᵀy`.
    pub residual_norm: f64,
}

/// Least squares `min ‖Ac - y‖` for `M ≥ N` by Householder QR and back
/// substitution on `R c = (Qᵀy)[..N]`.
pub fn least_squares_qr(a: &DenseMatrix, y: &[f64]) -> Result<QrSolution> {
    let (m, n) = (a.nrows(), a.ncols());
    if m < n {
        return Err(Error::ShapeMismatch(format!("QR least squares needs M ≥ N, got {m}×{n}")));
    }
    if y.len() != m {
        return Err(Error::ShapeMismatch(format!("{} data values for {m} rows", y.len())));
    }
    if m * n > QR_ELEMENT_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "{m}×{n} matrix exceeds the dense QR limit of {QR_ELEMENT_LIMIT} elements"
        )));
    }
    // column-major working copy
    let mut cols: Vec<Vec<f64>> = (0..n).map(|c| (0..m).map(|r| a.get(r, c)).collect()).collect();
    let mut b = y.to_vec();
    let scale = cols.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).fold(0.0, f64::max);
    let tol = m.max(n) as f64 * f64::EPSILON * scale;
    let mut diag = vec![0.0; n];

    for k in 0..n {
        let x = &cols[k][k..];
        let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if xnorm <= tol || xnorm == 0.0 {
            return Err(Error::RankDeficient { column: k, value: xnorm });
        }
        let alpha = if x[0] > 0.0 { -xnorm } else { xnorm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|t| t * t).sum();
        diag[k] = alpha;
        cols[k][k] = alpha;
        cols[k][k + 1..].iter_mut().for_each(|t| *t = 0.0);
        let reflect = |w: &mut [f64]| {
            let s = 2.0 * v.iter().zip(w.iter()).map(|(p, q)| p * q).sum::<f64>() / vv;
            for (wi, vi) in w.iter_mut().zip(&v) {
                *wi -= s * vi;
            }
        };
        for col in cols.iter_mut().skip(k + 1) {
            reflect(&mut col[k..]);
        }
        reflect(&mut b[k..]);
    }

    let mut c = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in k + 1..n {
            s -= cols[j][k] * c[j];
        }
        c[k] = s / diag[k];
    }
    let residual_norm = b[n..].iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(QrSolution { coefficients: c, residual_norm })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_minimizes() {
        let a = DenseMatrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        let s = least_squares_qr(&a, &[1.0, 3.0]).unwrap();
        assert!((s.coefficients[0] - 2.0).abs() < 1e-15);
        assert!((s.residual_norm - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn square_system() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 4.0]]).unwrap();
        let c = [1.0, -2.0, 0.5];
        let y = a.apply(&c);
        let s = least_squares_qr(&a, &y).unwrap();
        assert!(s.residual_norm < 1e-14);
        assert!(s.coefficients.iter().zip(c).all(|(p, q)| (p - q).abs() < 1e-12));
    }

    #[test]
    fn rank_deficiency_and_shapes() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]).unwrap();
        assert!(matches!(least_squares_qr(&a, &[1.0, 2.0, 3.0]), Err(Error::RankDeficient { column: 1, .. })));
        let wide = DenseMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert!(least_squares_qr(&wide, &[1.0]).is_err());
        assert!(least_squares_qr(&DenseMatrix::identity(2), &[1.0]).is_err());
        let zero = DenseMatrix::zeros(2, 1);
        assert!(matches!(least_squares_qr(&zero, &[1.0, 1.0]), Err(Error::RankDeficient { column: 0, .. })));
    }
}
