//! Pixel images, sinograms and the discrete projection operators.
//!
//! Pixels are labelled column-wise: pixel `(row, col)` has index
//! `col·rows + row`, columns run left to right and rows top to bottom.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{FanGeometry, LineParam, ParallelGeometry};
use crate::interp::{InterpMethod, SampledRow};

/// Direction components below this magnitude are treated as exactly zero so
/// that axis-aligned rays do not pick up spurious boundary crossings.
const AXIS_SNAP: f64 = 1e-14;

/// Relative distance to a pixel edge under which a point is assigned to the
/// pixel on the side of increasing coordinate.
const EDGE_SNAP: f64 = 1e-9;

/// Cartesian pixel grid covering `[-extent, extent]²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub rows: usize,
    pub cols: usize,
    pub extent: f64,
}

impl Grid {
    pub fn square(n: usize, extent: f64) -> Self {
        Self { rows: n, cols: n, extent }
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pixel_width(&self) -> f64 {
        2.0 * self.extent / self.cols as f64
    }

    pub fn pixel_height(&self) -> f64 {
        2.0 * self.extent / self.rows as f64
    }

    /// x coordinate of the centre of column `col`.
    pub fn x(&self, col: usize) -> f64 {
        -self.extent + (col as f64 + 0.5) * self.pixel_width()
    }

    /// y coordinate of the centre of row `row` (row 0 is the top).
    pub fn y(&self, row: usize) -> f64 {
        self.extent - (row as f64 + 0.5) * self.pixel_height()
    }

    /// Column-wise pixel label.
    pub fn pixel_index(&self, row: usize, col: usize) -> usize {
        col * self.rows + row
    }

    fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidArgument("grid needs at least one pixel".into()));
        }
        if !(self.extent > 0.0 && self.extent.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid extent {} must be positive", self.extent)));
        }
        Ok(())
    }

    fn require_square(&self) -> Result<()> {
        self.validate()?;
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "square pixels need rows == cols, got {}×{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }
}

/// Image on a [`Grid`], row-major with row 0 at the top.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    grid: Grid,
    values: Vec<f64>,
}

impl Image {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {}×{} grid",
                values.len(),
                grid.rows,
                grid.cols
            )));
        }
        Ok(Self { grid, values })
    }

    /// Evaluates `f(x, y)` at every pixel centre.
    pub fn from_fn<F: Fn(f64, f64) -> f64 + Sync>(grid: Grid, f: F) -> Self {
        let values = (0..grid.rows)
            .into_par_iter()
            .flat_map_iter(|r| {
                let y = grid.y(r);
                (0..grid.cols).map(move |c| (c, y))
            })
            .map(|(c, y)| f(grid.x(c), y))
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn rows(&self) -> usize {
        self.grid.rows
    }

    pub fn cols(&self) -> usize {
        self.grid.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.grid.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.values[row * self.grid.cols + col] = value;
    }

    /// Pixel values in column-wise label order (the Radon matrix unknowns).
    pub fn to_column_major(&self) -> Vec<f64> {
        let g = self.grid;
        let mut out = vec![0.0; g.len()];
        for r in 0..g.rows {
            for c in 0..g.cols {
                out[g.pixel_index(r, c)] = self.get(r, c);
            }
        }
        out
    }

    /// Inverse of [`Image::to_column_major`].
    pub fn from_column_major(grid: Grid, coefficients: &[f64]) -> Result<Self> {
        if coefficients.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!("{} coefficients for {} pixels", coefficients.len(), grid.len())));
        }
        let mut img = Self::zeros(grid);
        for r in 0..grid.rows {
            for c in 0..grid.cols {
                img.set(r, c, coefficients[grid.pixel_index(r, c)]);
            }
        }
        Ok(img)
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Parallel beam data, `(2M + 1) × N` row-major, row `j + M`, column `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    geometry: ParallelGeometry,
    values: Vec<f64>,
}

impl Sinogram {
    pub fn zeros(geometry: ParallelGeometry) -> Self {
        Self { geometry, values: vec![0.0; geometry.offset_count() * geometry.angle_count()] }
    }

    pub fn from_values(geometry: ParallelGeometry, values: Vec<f64>) -> Result<Self> {
        let expected = geometry.offset_count() * geometry.angle_count();
        if values.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {}×{} sinogram",
                values.len(),
                geometry.offset_count(),
                geometry.angle_count()
            )));
        }
        Ok(Self { geometry, values })
    }

    pub fn geometry(&self) -> &ParallelGeometry {
        &self.geometry
    }

    pub fn rows(&self) -> usize {
        self.geometry.offset_count()
    }

    pub fn cols(&self) -> usize {
        self.geometry.angle_count()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, row: usize, k: usize) -> f64 {
        self.values[row * self.cols() + k]
    }

    pub fn set(&mut self, row: usize, k: usize, value: f64) {
        let cols = self.cols();
        self.values[row * cols + k] = value;
    }

    /// Samples of angle `k`, ordered by offset.
    pub fn column(&self, k: usize) -> Vec<f64> {
        (0..self.rows()).map(|r| self.get(r, k)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.cols()).map(|k| self.column(k)).collect()
    }

    pub(crate) fn from_columns(geometry: ParallelGeometry, columns: &[Vec<f64>]) -> Result<Self> {
        let mut s = Self::zeros(geometry);
        if columns.len() != s.cols() || columns.iter().any(|c| c.len() != s.rows()) {
            return Err(Error::ShapeMismatch("column layout does not match the geometry".into()));
        }
        for (k, col) in columns.iter().enumerate() {
            for (r, &v) in col.iter().enumerate() {
                s.set(r, k, v);
            }
        }
        Ok(s)
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Fan beam data, `(2q + 1) × p` row-major, row `j + q`, column `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FanSinogram {
    geometry: FanGeometry,
    values: Vec<f64>,
}

impl FanSinogram {
    pub fn zeros(geometry: FanGeometry) -> Self {
        Self { geometry, values: vec![0.0; geometry.ray_count() * geometry.source_count()] }
    }

    pub fn from_values(geometry: FanGeometry, values: Vec<f64>) -> Result<Self> {
        let expected = geometry.ray_count() * geometry.source_count();
        if values.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {}×{} fan sinogram",
                values.len(),
                geometry.ray_count(),
                geometry.source_count()
            )));
        }
        Ok(Self { geometry, values })
    }

    pub fn geometry(&self) -> &FanGeometry {
        &self.geometry
    }

    pub fn rows(&self) -> usize {
        self.geometry.ray_count()
    }

    pub fn cols(&self) -> usize {
        self.geometry.source_count()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, row: usize, k: usize) -> f64 {
        self.values[row * self.cols() + k]
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        (0..self.rows()).map(|r| self.get(r, k)).collect()
    }
}

fn snapped_sin_cos(theta: f64) -> (f64, f64) {
    let (mut sin, mut cos) = theta.sin_cos();
    if sin.abs() < AXIS_SNAP {
        sin = 0.0;
    }
    if cos.abs() < AXIS_SNAP {
        cos = 0.0;
    }
    (sin, cos)
}

/// Cell containing coordinate `v` on a grid starting at `-extent` with cells
/// of width `size`; points on an edge go to the cell above the edge.
fn cell_of(v: f64, extent: f64, size: f64, count: usize) -> usize {
    let pos = (v + extent) / size;
    let nearest = pos.round();
    let cell = if (pos - nearest).abs() < EDGE_SNAP { nearest } else { pos.floor() };
    (cell.max(0.0) as usize).min(count - 1)
}

/// Parameter interval `[lo, hi]` where `origin + u·dir` stays in `[-extent, extent]`.
fn slab(origin: f64, dir: f64, extent: f64) -> Option<(f64, f64)> {
    if dir == 0.0 {
        if origin.abs() <= extent {
            Some((f64::NEG_INFINITY, f64::INFINITY))
        } else {
            None
        }
    } else {
        let a = (-extent - origin) / dir;
        let b = (extent - origin) / dir;
        Some((a.min(b), a.max(b)))
    }
}

/// Pixels hit by `line` with the length of each intersection.
///
/// Indices use the column-wise labelling and are sorted increasingly. A line
/// running exactly along a pixel edge is attributed to the pixels on the side
/// of increasing coordinate.
pub fn ray_pixel_intersections(line: LineParam, grid: Grid) -> Result<Vec<(usize, f64)>> {
    grid.require_square()?;
    let mut out = Vec::new();
    trace(line, grid, &mut Vec::new(), &mut out);
    out.sort_unstable_by_key(|&(idx, _)| idx);
    Ok(out)
}

/// Core traversal; `crossings` is scratch space reused across calls.
fn trace(line: LineParam, grid: Grid, crossings: &mut Vec<f64>, out: &mut Vec<(usize, f64)>) {
    out.clear();
    let n = grid.cols;
    let r = grid.extent;
    let h = grid.pixel_width();
    let (sin, cos) = snapped_sin_cos(line.theta);
    let (x0, y0) = (line.t * cos, line.t * sin);
    let (dx, dy) = (-sin, cos);

    let (Some((ax, bx)), Some((ay, by))) = (slab(x0, dx, r), slab(y0, dy, r)) else {
        return;
    };
    let lo = ax.max(ay);
    let hi = bx.min(by);
    if !(hi - lo > EDGE_SNAP * h) {
        return;
    }

    crossings.clear();
    crossings.push(lo);
    for i in 1..n {
        let edge = -r + i as f64 * h;
        if dx != 0.0 {
            let u = (edge - x0) / dx;
            if u > lo && u < hi {
                crossings.push(u);
            }
        }
        if dy != 0.0 {
            let u = (edge - y0) / dy;
            if u > lo && u < hi {
                crossings.push(u);
            }
        }
    }
    crossings.push(hi);
    crossings.sort_unstable_by(|a, b| a.total_cmp(b));

    let min_len = EDGE_SNAP * h;
    for w in crossings.windows(2) {
        let len = w[1] - w[0];
        if len <= min_len {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        let col = cell_of(x0 + mid * dx, r, h, n);
        let row = n - 1 - cell_of(y0 + mid * dy, r, h, n);
        let idx = grid.pixel_index(row, col);
        match out.last_mut() {
            Some((last, acc)) if *last == idx => *acc += len,
            _ => out.push((idx, len)),
        }
    }
}

/// Line integrals of the pixel image: `Σ value·length` over the pixels each
/// sampled line crosses.
pub fn forward_project(image: &Image, geometry: &ParallelGeometry) -> Result<Sinogram> {
    let grid = image.grid();
    grid.require_square()?;
    let reach = geometry.half_count() as f64 * geometry.spacing();
    if grid.extent > reach * (1.0 + 1e-12) {
        log::warn!("image extent {} exceeds the sampled offsets M·d = {reach}; outer rays are missing", grid.extent);
    }
    let columns: Vec<Vec<f64>> = (0..geometry.angle_count())
        .into_par_iter()
        .map(|k| {
            let theta = geometry.angle(k);
            let mut crossings = Vec::new();
            let mut hits = Vec::new();
            (0..geometry.offset_count())
                .map(|row| {
                    trace(LineParam::new(geometry.offset_at_row(row), theta), grid, &mut crossings, &mut hits);
                    hits.iter()
                        .map(|&(idx, len)| {
                            let (c, r) = (idx / grid.rows, idx % grid.rows);
                            image.get(r, c) * len
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    Sinogram::from_columns(*geometry, &columns)
}

/// Discrete back projection `(1/N) Σ_k I[column k](x cos θ_k + y sin θ_k)`.
///
/// Offsets outside the sampled range contribute zero.
pub fn back_project(sinogram: &Sinogram, grid: Grid, interp: InterpMethod) -> Result<Image> {
    grid.validate()?;
    let g = sinogram.geometry();
    let columns = sinogram.columns();
    let first = g.offset(-(g.half_count() as i64));
    let scale = 1.0 / g.angle_count() as f64;
    Ok(back_project_columns(&columns, first, g.spacing(), &g.angles(), grid, interp, scale))
}

/// Shared back projection over columns sampled at `first + i·spacing`.
pub(crate) fn back_project_columns(
    columns: &[Vec<f64>],
    first: f64,
    spacing: f64,
    angles: &[f64],
    grid: Grid,
    interp: InterpMethod,
    scale: f64,
) -> Image {
    let trig: Vec<(f64, f64)> = angles.iter().map(|a| a.sin_cos()).collect();
    let rows: Vec<Vec<f64>> = (0..grid.rows)
        .into_par_iter()
        .map(|r| {
            let y = grid.y(r);
            (0..grid.cols)
                .map(|c| {
                    let x = grid.x(c);
                    let mut acc = 0.0;
                    for (col, &(sin, cos)) in columns.iter().zip(&trig) {
                        let row = SampledRow::new(col, first, spacing);
                        acc += row.eval(x * cos + y * sin, interp);
                    }
                    acc * scale
                })
                .collect()
        })
        .collect();
    Image { grid, values: rows.into_iter().flatten().collect() }
}
