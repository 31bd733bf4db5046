//! Discrete filtered back projection for parallel and fan beam data.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filters::FilterSpec;
use crate::geometry::ParallelGeometry;
use crate::projector::{back_project_columns, FanSinogram, Grid, Image, Sinogram};

pub use crate::interp::{interpolate, InterpMethod, SampledRow};

/// Convolved projections `h(t_i, θ_k)` for `i = -I..=I`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredSinogram {
    geometry: ParallelGeometry,
    half_range: usize,
    columns: Vec<Vec<f64>>,
}

impl FilteredSinogram {
    pub fn geometry(&self) -> &ParallelGeometry {
        &self.geometry
    }

    /// `I`, the largest index evaluated.
    pub fn half_range(&self) -> usize {
        self.half_range
    }

    /// `h(t_i, θ_k)`, zero outside `-I..=I`.
    pub fn get(&self, i: i64, k: usize) -> f64 {
        if i.unsigned_abs() as usize > self.half_range {
            0.0
        } else {
            self.columns[k][(i + self.half_range as i64) as usize]
        }
    }

    pub fn column(&self, k: usize) -> &[f64] {
        &self.columns[k]
    }
}

/// Discrete convolution `h(t_i, θ_k) = d Σ_j κ_L(t_i - t_j) Rf(t_j, θ_k)` on
/// `i = -M..=M`.
pub fn convolve_rows(sinogram: &Sinogram, filter: &FilterSpec) -> FilteredSinogram {
    convolve_rows_over(sinogram, filter, sinogram.geometry().half_count())
}

/// As [`convolve_rows`] with the output index range `-half_range..=half_range`.
pub fn convolve_rows_over(sinogram: &Sinogram, filter: &FilterSpec, half_range: usize) -> FilteredSinogram {
    let g = *sinogram.geometry();
    let d = g.spacing();
    let nyquist = g.nyquist_bandwidth();
    if (filter.bandwidth() - nyquist).abs() > 1e-9 * nyquist {
        log::warn!("filter bandwidth {} is not coupled to the sampling (π/d = {nyquist})", filter.bandwidth());
    }
    let m = g.half_count() as i64;
    let reach = half_range + g.half_count();
    let kernel = if (filter.bandwidth() - nyquist).abs() <= 1e-12 * nyquist {
        filter.kernel_samples(reach).as_slice().to_vec()
    } else {
        (-(reach as i64)..=reach as i64).map(|j| filter.kernel(j as f64 * d)).collect()
    };
    let centre = reach as i64;
    let columns = (0..g.angle_count())
        .into_par_iter()
        .map(|k| {
            let data = sinogram.column(k);
            (-(half_range as i64)..=half_range as i64)
                .map(|i| {
                    let mut acc = 0.0;
                    for (row, &v) in data.iter().enumerate() {
                        let j = row as i64 - m;
                        acc += kernel[(i - j + centre) as usize] * v;
                    }
                    d * acc
                })
                .collect()
        })
        .collect();
    FilteredSinogram { geometry: g, half_range, columns }
}

/// Parallel beam FBP: `f(x, y) = (1/2N) Σ_k I h(x cos θ_k + y sin θ_k, θ_k)`.
///
/// `h` is evaluated on `-I..=I` with `I` from [`evaluation_range`], so the
/// negative side lobes of the filtered data reach the grid corners.
pub fn fbp_parallel(sinogram: &Sinogram, filter: &FilterSpec, interp: InterpMethod, grid: Grid) -> Result<Image> {
    let g = sinogram.geometry();
    let reach = g.half_count() as f64 * g.spacing();
    if grid.extent > reach * (1.0 + 1e-12) {
        return Err(Error::ShapeMismatch(format!(
            "reconstruction extent {} exceeds the sampled offsets M·d = {reach}",
            grid.extent
        )));
    }
    let filtered = convolve_rows_over(sinogram, filter, evaluation_range(g, grid));
    Ok(back_project_filtered(&filtered, grid, interp))
}

/// Smallest `I ≤ 2M` whose offsets cover every `x cos θ + y sin θ` queried on
/// `grid`, and at least `M`.
pub fn evaluation_range(geometry: &ParallelGeometry, grid: Grid) -> usize {
    let far_x = (0..grid.cols).map(|c| grid.x(c).abs()).fold(0.0, f64::max);
    let far_y = (0..grid.rows).map(|r| grid.y(r).abs()).fold(0.0, f64::max);
    let needed = (far_x.hypot(far_y) / geometry.spacing() - 1e-9).ceil().max(0.0) as usize;
    let m = geometry.half_count();
    needed.clamp(m, 2 * m)
}

/// Back projection step of [`fbp_parallel`] with the `1/(2N)` factor.
pub fn back_project_filtered(filtered: &FilteredSinogram, grid: Grid, interp: InterpMethod) -> Image {
    let g = filtered.geometry();
    let first = -(filtered.half_range as f64) * g.spacing();
    let scale = 0.5 / g.angle_count() as f64;
    back_project_columns(&filtered.columns, first, g.spacing(), &g.angles(), grid, interp, scale)
}

/// Fan beam reconstruction plus the number of pixels left at zero because they
/// lie within one pixel of a source position.
#[derive(Debug, Clone, PartialEq)]
pub struct FanReconstruction {
    pub image: Image,
    pub excluded_pixels: usize,
}

/// `sgn` with `sgn(0) = 0`.
fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Fan beam FBP.
///
/// 1. `h(α_i, β_k) = Δα Σ_j κ_L(D sin(α_i - α_j)) cos(α_j) Df(α_j, β_k)` for
///    `i = -q..=q`.
/// 2. `f(x) = D³/(2p) Σ_k ‖x - x_S(β_k)‖⁻² I h(γ, β_k)`, where `γ` is the fan
///    angle of the ray from `x_S(β_k)` through `x`.
///
/// The weights assume `r ≪ D`.
pub fn fbp_fan(fan: &FanSinogram, filter: &FilterSpec, interp: InterpMethod, grid: Grid) -> Result<FanReconstruction> {
    let g = *fan.geometry();
    for w in g.sampling_warnings(filter.bandwidth()) {
        log::warn!("fan sampling: {w}");
    }
    if grid.rows == 0 || grid.cols == 0 || !(grid.extent > 0.0) {
        return Err(Error::InvalidArgument("empty reconstruction grid".into()));
    }
    let q = g.half_rays() as i64;
    let p = g.source_count();
    let big_d = g.source_radius();
    let d_alpha = g.alpha_step();

    let kernel: Vec<f64> = (-2 * q..=2 * q).map(|m| filter.kernel(big_d * (m as f64 * d_alpha).sin())).collect();
    let weights: Vec<f64> = (0..g.ray_count()).map(|row| g.alpha_at_row(row).cos()).collect();

    let columns: Vec<Vec<f64>> = (0..p)
        .into_par_iter()
        .map(|k| {
            let data: Vec<f64> = fan.column(k).iter().zip(&weights).map(|(v, w)| v * w).collect();
            (-q..=q)
                .map(|i| {
                    let mut acc = 0.0;
                    for (row, &v) in data.iter().enumerate() {
                        let j = row as i64 - q;
                        acc += kernel[(i - j + 2 * q) as usize] * v;
                    }
                    d_alpha * acc
                })
                .collect()
        })
        .collect();

    let sources: Vec<(f64, f64)> = (0..p).map(|k| g.beta(k).sin_cos()).collect();
    let first = -(q as f64) * d_alpha;
    let scale = big_d.powi(3) / (2.0 * p as f64);
    let guard = grid.pixel_width().max(grid.pixel_height());

    let rows: Vec<(Vec<f64>, usize)> = (0..grid.rows)
        .into_par_iter()
        .map(|r| {
            let y = grid.y(r);
            let mut excluded = 0;
            let row = (0..grid.cols)
                .map(|c| {
                    let x = grid.x(c);
                    let mut acc = 0.0;
                    for (col, &(sin_b, cos_b)) in columns.iter().zip(&sources) {
                        let dx = x - big_d * cos_b;
                        let dy = y - big_d * sin_b;
                        let dist2 = dx * dx + dy * dy;
                        let dist = dist2.sqrt();
                        if dist < guard {
                            excluded += 1;
                            return 0.0;
                        }
                        let cos_gamma = ((big_d - x * cos_b - y * sin_b) / dist).clamp(-1.0, 1.0);
                        let gamma = sign(x * sin_b - y * cos_b) * cos_gamma.acos();
                        acc += SampledRow::new(col, first, d_alpha).eval(gamma, interp) / dist2;
                    }
                    scale * acc
                })
                .collect();
            (row, excluded)
        })
        .collect();

    let excluded_pixels = rows.iter().map(|r| r.1).sum();
    if excluded_pixels > 0 {
        log::warn!("{excluded_pixels} pixels within one pixel of a source position were set to zero");
    }
    let image = Image::from_values(grid, rows.into_iter().flat_map(|r| r.0).collect())?;
    Ok(FanReconstruction { image, excluded_pixels })
}
