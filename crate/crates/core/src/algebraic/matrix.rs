use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::LineParam;
use crate::projector::{ray_pixel_intersections, Grid};

/// Products with `A` and `Aᵀ`, enough for the matrix-free solvers.
pub trait LinearOperator: Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `A x`
    fn apply(&self, x: &[f64]) -> Vec<f64>;
    /// `Aᵀ y`
    fn apply_transpose(&self, y: &[f64]) -> Vec<f64>;
}

/// Compressed sparse rows with strictly increasing column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// A matrix with `ncols` columns and no rows.
    pub fn new(ncols: usize) -> Self {
        Self { ncols, row_ptr: vec![0], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn from_rows(ncols: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let mut m = Self::new(ncols);
        for row in rows {
            m.push_row(&row)?;
        }
        Ok(m)
    }

    /// Appends a row given as `(column, value)` pairs in increasing column order.
    pub fn push_row(&mut self, entries: &[(usize, f64)]) -> Result<()> {
        let mut last = None;
        for &(c, v) in entries {
            if c >= self.ncols {
                return Err(Error::ShapeMismatch(format!("column {c} outside {} columns", self.ncols)));
            }
            if last.is_some_and(|l| c <= l) {
                return Err(Error::InvalidArgument("row column indices must increase strictly".into()));
            }
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite entry in column {c}")));
            }
            last = Some(c);
        }
        for &(c, v) in entries {
            self.col_idx.push(c);
            self.values.push(v);
        }
        self.row_ptr.push(self.col_idx.len());
        Ok(())
    }

    pub fn from_dense(dense: &DenseMatrix) -> Self {
        let mut m = Self::new(dense.ncols());
        for r in 0..dense.nrows() {
            let row: Vec<(usize, f64)> =
                dense.row(r).iter().enumerate().filter(|(_, &v)| v != 0.0).map(|(c, &v)| (c, v)).collect();
            m.push_row(&row).expect("dense rows are valid");
        }
        m
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `j`.
    pub fn row(&self, j: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[j]..self.row_ptr[j + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn row_norm_sq(&self, j: usize) -> f64 {
        self.row(j).1.iter().map(|v| v * v).sum()
    }

    /// `a_jᵀ x`
    pub fn row_dot(&self, j: usize, x: &[f64]) -> f64 {
        let (cols, vals) = self.row(j);
        cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.nrows(), self.ncols);
        for j in 0..self.nrows() {
            let (cols, vals) = self.row(j);
            for (&c, &v) in cols.iter().zip(vals) {
                d.set(j, c, v);
            }
        }
        d
    }

    /// Text dump: a `M N nnz` header, then one `row col value` triple per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.nrows(), self.ncols, self.nnz());
        for j in 0..self.nrows() {
            let (cols, vals) = self.row(j);
            for (&c, &v) in cols.iter().zip(vals) {
                writeln!(out, "{j} {c} {v:e}").unwrap();
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let parse_err = |line: usize, message: &str| Error::Parse { line: line + 1, message: message.into() };
        let (hl, header) = lines.next().ok_or_else(|| parse_err(0, "missing `M N nnz` header"))?;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| parse_err(hl, "header must be three integers"))?;
        let [m, n, nnz] = head[..] else {
            return Err(parse_err(hl, "header must be three integers"));
        };
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        let mut count = 0;
        for (i, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(parse_err(i, "expected `row col value`"));
            }
            let r: usize = f[0].parse().map_err(|_| parse_err(i, "bad row index"))?;
            let c: usize = f[1].parse().map_err(|_| parse_err(i, "bad column index"))?;
            let v: f64 = f[2].parse().map_err(|_| parse_err(i, "bad value"))?;
            if r >= m {
                return Err(parse_err(i, "row index out of range"));
            }
            rows[r].push((c, v));
            count += 1;
        }
        if count != nnz {
            return Err(Error::Format(format!("header announces {nnz} entries, found {count}")));
        }
        Self::from_rows(n, rows)
    }
}

impl LinearOperator for SparseMatrix {
    fn nrows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    fn ncols(&self) -> usize {
        self.ncols
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "vector length");
        (0..self.nrows()).into_par_iter().map(|j| self.row_dot(j, x)).collect()
    }

    fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.nrows(), "vector length");
        let mut out = vec![0.0; self.ncols];
        for (j, &yj) in y.iter().enumerate() {
            if yj == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(j);
            for (&c, &v) in cols.iter().zip(vals) {
                out[c] += v * yj;
            }
        }
        out
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, data: vec![0.0; nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_row_major(nrows: usize, ncols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::ShapeMismatch(format!("{} values for a {nrows}×{ncols} matrix", data.len())));
        }
        Ok(Self { nrows, ncols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::ShapeMismatch("rows of unequal length".into()));
        }
        Ok(Self { nrows: rows.len(), ncols, data: rows.concat() })
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.ncols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.ncols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.ncols..(r + 1) * self.ncols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.nrows == self.ncols
            && (0..self.nrows).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }
}

impl LinearOperator for DenseMatrix {
    fn nrows(&self) -> usize {
        self.nrows
    }

    fn ncols(&self) -> usize {
        self.ncols
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "vector length");
        (0..self.nrows).into_par_iter().map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.nrows, "vector length");
        let mut out = vec![0.0; self.ncols];
        for (r, &yr) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a * yr;
            }
        }
        out
    }
}

/// Radon matrix of the pixel basis: `a_{j,k}` is the length of line `j`
/// inside pixel `k` (column-wise labels, rows top to bottom).
pub fn build_radon_matrix(grid: Grid, lines: &[LineParam]) -> Result<SparseMatrix> {
    // validates the grid even when there are no lines
    ray_pixel_intersections(LineParam::new(0.0, 0.0), grid)?;
    let rows: Vec<Vec<(usize, f64)>> =
        lines.par_iter().map(|&l| ray_pixel_intersections(l, grid)).collect::<Result<_>>()?;
    SparseMatrix::from_rows(grid.len(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn small() -> SparseMatrix {
        SparseMatrix::from_rows(3, vec![vec![(0, 1.0), (2, 2.0)], vec![], vec![(1, 3.0)]]).unwrap()
    }

    #[test]
    fn products() {
        let a = small();
        assert_eq!(a.apply(&[1.0, 2.0, 3.0]), vec![7.0, 0.0, 6.0]);
        assert_eq!(a.apply_transpose(&[1.0, 5.0, 2.0]), vec![1.0, 6.0, 2.0]);
        let d = a.to_dense();
        assert_eq!(d.apply(&[1.0, 2.0, 3.0]), vec![7.0, 0.0, 6.0]);
        assert_eq!(d.apply_transpose(&[1.0, 5.0, 2.0]), vec![1.0, 6.0, 2.0]);
        assert_eq!(SparseMatrix::from_dense(&d), a);
    }

    #[test]
    fn rejects_bad_rows() {
        let mut a = SparseMatrix::new(3);
        assert!(a.push_row(&[(1, 1.0), (1, 2.0)]).is_err());
        assert!(a.push_row(&[(3, 1.0)]).is_err());
        assert!(a.push_row(&[(0, f64::NAN)]).is_err());
        assert_eq!(a.nrows(), 0);
    }

    #[test]
    fn text_round_trip() {
        let a = small();
        let text = a.to_text();
        assert!(text.starts_with("3 3 3\n"));
        assert_eq!(SparseMatrix::from_text(&text).unwrap(), a);
        assert!(SparseMatrix::from_text("2 2 1\n").is_err());
        assert!(SparseMatrix::from_text("2 2\n").is_err());
        assert!(SparseMatrix::from_text("1 2 1\n0 x 1\n").is_err());
    }

    #[test]
    fn empty_line_list() {
        let a = build_radon_matrix(Grid::square(4, 1.0), &[]).unwrap();
        assert_eq!((a.nrows(), a.ncols()), (0, 16));
    }

    #[test]
    fn small_example_rows() {
        let s = SQRT_2 / 3.0;
        let lines = [
            LineParam::new(-s, FRAC_PI_4),
            LineParam::new(0.0, FRAC_PI_4),
            LineParam::new(s, FRAC_PI_4),
            LineParam::new(-2.0 / 3.0, FRAC_PI_2),
            LineParam::new(0.0, FRAC_PI_2),
            LineParam::new(2.0 / 3.0, FRAC_PI_2),
        ];
        let a = build_radon_matrix(Grid::square(3, 1.0), &lines).unwrap().to_dense();
        // the bottom line y = -2/3 crosses pixels 3, 6, 9 (1-based)
        for k in 0..9 {
            let expect = if [2, 5, 8].contains(&k) { 2.0 / 3.0 } else { 0.0 };
            assert!((a.get(3, k) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_square() {
        let g = Grid { rows: 2, cols: 3, extent: 1.0 };
        assert!(build_radon_matrix(g, &[]).is_err());
    }
}
