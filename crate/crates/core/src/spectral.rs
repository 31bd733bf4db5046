//! Fourier-domain tools.
//!
//! Transforms follow the continuous convention `F f(ω) = ∫ f(x) e^{-iωx} dx`,
//! discretized as `F(ω) = dx Σ_j f_j e^{-iω(x₀ + j·dx)}` on the frequencies
//! `ω_m = m·Δω`, `Δω = 2π/(P·dx)`, where `P` is the padded length. The
//! inverse carries the factor `Δω/2π`, so `dx Σ|f|² = (Δω/2π) Σ|F|²`.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::interp::InterpMethod;
use crate::projector::{back_project, Grid, Image, Sinogram};

/// Samples of the continuous Fourier transform of a sampled function.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    /// `F(ω_m)` in FFT order: `m = 0, 1, …, P/2 - 1, -P/2, …, -1`.
    pub values: Vec<Complex64>,
    /// Sample spacing `dx` of the source.
    pub spacing: f64,
    /// Position `x₀` of the first source sample.
    pub origin: f64,
    /// Number of source samples before padding.
    pub source_len: usize,
}

impl Spectrum1D {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `Δω = 2π/(P·dx)`
    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / (self.len() as f64 * self.spacing)
    }

    /// Signed frequency index of slot `m`.
    pub fn signed_index(&self, m: usize) -> i64 {
        signed_index(m, self.len())
    }

    pub fn frequency(&self, m: usize) -> f64 {
        self.signed_index(m) as f64 * self.frequency_step()
    }

    /// Linear interpolation of the spectrum at frequency `omega`; zero outside
    /// the sampled band.
    pub fn eval(&self, omega: f64) -> Complex64 {
        let p = self.len() as i64;
        let u = omega / self.frequency_step();
        let m0 = u.floor();
        if !(m0 >= -(p / 2) as f64 && m0 + 1.0 <= (p / 2 - 1) as f64) {
            return Complex64::new(0.0, 0.0);
        }
        let frac = u - m0;
        let slot = |m: i64| self.values[m.rem_euclid(p) as usize];
        let m0 = m0 as i64;
        slot(m0) * (1.0 - frac) + slot(m0 + 1) * frac
    }

    /// Inverse transform back to the original samples.
    pub fn inverse(&self) -> Vec<Complex64> {
        let p = self.len();
        let step = self.frequency_step();
        let mut buf: Vec<Complex64> = self
            .values
            .iter()
            .enumerate()
            .map(|(m, v)| v * Complex64::from_polar(1.0, signed_index(m, p) as f64 * step * self.origin))
            .collect();
        FftPlanner::new().plan_fft_inverse(p).process(&mut buf);
        // Δω/2π = 1/(P·dx); the dx cancels against the forward factor
        let scale = 1.0 / (p as f64 * self.spacing);
        buf.truncate(self.source_len);
        buf.iter().map(|v| v * scale).collect()
    }

    /// Real part of [`Spectrum1D::inverse`].
    pub fn inverse_real(&self) -> Vec<f64> {
        self.inverse().iter().map(|v| v.re).collect()
    }
}

fn signed_index(m: usize, p: usize) -> i64 {
    if m < p / 2 {
        m as i64
    } else {
        m as i64 - p as i64
    }
}

/// Forward transform of samples at `j·spacing`, zero-padded to the next power
/// of two.
pub fn dft_1d(samples: &[f64], spacing: f64) -> Spectrum1D {
    dft_1d_padded(samples, spacing, 0.0, samples.len().max(1).next_power_of_two())
}

/// Forward transform of samples at `origin + j·spacing`, zero-padded to
/// `padded_len ≥ samples.len()` (rounded up to a power of two).
pub fn dft_1d_padded(samples: &[f64], spacing: f64, origin: f64, padded_len: usize) -> Spectrum1D {
    let p = padded_len.max(samples.len()).max(1).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); p];
    for (b, &s) in buf.iter_mut().zip(samples) {
        b.re = s;
    }
    FftPlanner::new().plan_fft_forward(p).process(&mut buf);
    let step = 2.0 * PI / (p as f64 * spacing);
    let values = buf
        .iter()
        .enumerate()
        .map(|(m, v)| v * spacing * Complex64::from_polar(1.0, -(signed_index(m, p) as f64) * step * origin))
        .collect();
    Spectrum1D { values, spacing, origin, source_len: samples.len() }
}

/// Two-dimensional spectrum of an image,
/// `F(ξ, η) = h² Σ f(x, y) e^{-i(ξx + ηy)}` over the pixel centres.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    /// Row-major, `values[b·P + a]` at `(ξ_a, η_b)`, both in FFT order.
    pub values: Vec<Complex64>,
    /// Padded side length `P`.
    pub size: usize,
    pub pixel: f64,
    grid: Grid,
}

impl Spectrum2D {
    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / (self.size as f64 * self.pixel)
    }

    /// `(ξ_a, η_b)` of slot `(a, b)`.
    pub fn frequency(&self, a: usize, b: usize) -> (f64, f64) {
        let s = self.frequency_step();
        (signed_index(a, self.size) as f64 * s, signed_index(b, self.size) as f64 * s)
    }

    /// Inverse transform onto the original grid.
    pub fn inverse(&self) -> Image {
        let p = self.size;
        let grid = self.grid;
        let (x0, y0) = (grid.x(0), grid.y(grid.rows - 1));
        let step = self.frequency_step();
        let mut buf: Vec<Complex64> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let (a, b) = (i % p, i / p);
                let phase = signed_index(a, p) as f64 * step * x0 + signed_index(b, p) as f64 * step * y0;
                v * Complex64::from_polar(1.0, phase)
            })
            .collect();
        fft_2d(&mut buf, p, true);
        let scale = 1.0 / (p as f64 * self.pixel).powi(2);
        let values = (0..grid.rows)
            .flat_map(|r| (0..grid.cols).map(move |c| (r, c)))
            .map(|(r, c)| buf[(grid.rows - 1 - r) * p + c].re * scale)
            .collect();
        Image::from_values(grid, values).expect("grid-sized buffer")
    }
}

/// 2D spectrum of a square-pixel image zero-padded to `padded` (power of two).
pub fn dft_2d(image: &Image, padded: usize) -> Result<Spectrum2D> {
    let grid = image.grid();
    let h = grid.pixel_width();
    if (grid.pixel_height() - h).abs() > 1e-12 * h {
        return Err(Error::ShapeMismatch("2D spectra need square pixels".into()));
    }
    let p = padded.max(grid.rows).max(grid.cols).next_power_of_two();
    // rows ordered by increasing y
    let mut buf = vec![Complex64::new(0.0, 0.0); p * p];
    for j in 0..grid.rows {
        for c in 0..grid.cols {
            buf[j * p + c].re = image.get(grid.rows - 1 - j, c);
        }
    }
    fft_2d(&mut buf, p, false);
    let (x0, y0) = (grid.x(0), grid.y(grid.rows - 1));
    let step = 2.0 * PI / (p as f64 * h);
    let values = buf
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let (a, b) = (i % p, i / p);
            let phase = -(signed_index(a, p) as f64 * step * x0 + signed_index(b, p) as f64 * step * y0);
            v * h * h * Complex64::from_polar(1.0, phase)
        })
        .collect();
    Ok(Spectrum2D { values, size: p, pixel: h, grid })
}

/// In-place unnormalized 2D FFT of a row-major `p × p` buffer.
fn fft_2d(buf: &mut [Complex64], p: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(p) } else { planner.plan_fft_forward(p) };
    buf.par_chunks_mut(p).for_each(|row| fft.process(row));
    let mut t = transpose(buf, p);
    t.par_chunks_mut(p).for_each(|col| fft.process(col));
    buf.copy_from_slice(&transpose(&t, p));
}

fn transpose(buf: &[Complex64], p: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); p * p];
    for r in 0..p {
        for c in 0..p {
            out[c * p + r] = buf[r * p + c];
        }
    }
    out
}

/// Image spectrum evaluated only where needed: each row is transformed in
/// `x` by FFT, the `y` sum is carried out directly at requested nodes.
struct LazyImageSpectrum {
    /// `G(ξ_a, y_r)` for `a` in `a_min..a_min + partial.len()`.
    partial: Vec<Vec<Complex64>>,
    a_min: i64,
    ys: Vec<f64>,
    pixel: f64,
    step: f64,
    cache: HashMap<(i64, i64), Complex64>,
}

impl LazyImageSpectrum {
    fn new(image: &Image, padded: usize, max_freq: f64) -> Self {
        let grid = image.grid();
        let h = grid.pixel_width();
        let p = padded.next_power_of_two();
        let step = 2.0 * PI / (p as f64 * h);
        let reach = (max_freq / step).ceil() as i64 + 2;
        let reach = reach.min(p as i64 / 2 - 1);
        let x0 = grid.x(0);
        let fft = FftPlanner::new().plan_fft_forward(p);
        let rows: Vec<Vec<Complex64>> = (0..grid.rows)
            .into_par_iter()
            .map(|r| {
                let mut buf = vec![Complex64::new(0.0, 0.0); p];
                for (c, slot) in buf.iter_mut().take(grid.cols).enumerate() {
                    slot.re = image.get(r, c);
                }
                fft.process(&mut buf);
                (-reach..=reach)
                    .map(|a| {
                        buf[a.rem_euclid(p as i64) as usize] * h * Complex64::from_polar(1.0, -(a as f64) * step * x0)
                    })
                    .collect()
            })
            .collect();
        // transpose to [a][r]
        let partial = (0..rows[0].len()).map(|a| rows.iter().map(|row| row[a]).collect()).collect();
        Self {
            partial,
            a_min: -reach,
            ys: (0..grid.rows).map(|r| grid.y(r)).collect(),
            pixel: h,
            step,
            cache: HashMap::new(),
        }
    }

    fn node(&mut self, a: i64, b: i64) -> Complex64 {
        if let Some(v) = self.cache.get(&(a, b)) {
            return *v;
        }
        let idx = a - self.a_min;
        let v = if idx < 0 || idx as usize >= self.partial.len() {
            Complex64::new(0.0, 0.0)
        } else {
            let eta = b as f64 * self.step;
            let col = &self.partial[idx as usize];
            let sum: Complex64 = col.iter().zip(&self.ys).map(|(g, &y)| g * Complex64::from_polar(1.0, -eta * y)).sum();
            sum * self.pixel
        };
        self.cache.insert((a, b), v);
        v
    }

    /// Bilinear interpolation between lattice nodes.
    fn eval(&mut self, xi: f64, eta: f64) -> Complex64 {
        let (u, v) = (xi / self.step, eta / self.step);
        let (a0, b0) = (u.floor(), v.floor());
        let (fa, fb) = (u - a0, v - b0);
        let (a0, b0) = (a0 as i64, b0 as i64);
        self.node(a0, b0) * ((1.0 - fa) * (1.0 - fb))
            + self.node(a0 + 1, b0) * (fa * (1.0 - fb))
            + self.node(a0, b0 + 1) * ((1.0 - fa) * fb)
            + self.node(a0 + 1, b0 + 1) * (fa * fb)
    }
}

/// Deviation between the 1D spectrum of sinogram column `k` and the 2D image
/// spectrum along the slice `S ↦ (S cos θ_k, S sin θ_k)`.
///
/// Returns `max |F(Rf)(S) - Ff(S n_θ)| / max |F(Rf)(S)|` over the half band
/// `|S| ≤ min(π/d, π/h)/2`; zero when the sinogram column vanishes. The
/// image spectrum is sampled bilinearly on a lattice whose spacing
/// `2π/(P·h)` uses `P = max(4n, n²/32)`, refining with the grid.
pub fn fourier_slice_residual(image: &Image, sinogram: &Sinogram, k: usize) -> Result<f64> {
    let g = sinogram.geometry();
    let grid = image.grid();
    if k >= g.angle_count() {
        return Err(Error::InvalidArgument(format!("angle index {k} outside 0..{}", g.angle_count())));
    }
    if grid.rows != grid.cols || grid.extent < g.radius() * (1.0 - 1e-12) {
        return Err(Error::ShapeMismatch(format!(
            "image grid {}×{} on [-{e}, {e}]² does not cover the support radius {}",
            grid.rows,
            grid.cols,
            g.radius(),
            e = grid.extent
        )));
    }
    let n = grid.rows;
    let h = grid.pixel_width();
    let d = g.spacing();
    let band = 0.5 * (PI / d).min(PI / h);

    let column = sinogram.column(k);
    let sino_spec = dft_1d_padded(&column, d, g.offset(-(g.half_count() as i64)), 8 * column.len());
    let peak = sino_spec.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(image.values().iter().fold(0.0, |m: f64, v| m.max(v.abs())));
    }

    let padded = (4 * n).max(n * n / 32);
    let mut lazy = LazyImageSpectrum::new(image, padded, band);
    let (sin, cos) = g.angle(k).sin_cos();
    let mut worst = 0.0f64;
    for m in 0..sino_spec.len() {
        let s = sino_spec.frequency(m);
        if s.abs() > band {
            continue;
        }
        let img = lazy.eval(s * cos, s * sin);
        worst = worst.max((sino_spec.values[m] - img).norm());
    }
    Ok(worst / peak)
}

/// Output of [`direct_fourier_reconstruct`].
#[derive(Debug, Clone, PartialEq)]
pub struct DirectFourierResult {
    /// Real part of the inverse transform.
    pub image: Image,
    /// `Σ Im² / Σ Re²` of the inverse transform over the output grid.
    pub imaginary_ratio: f64,
}

/// Direct Fourier reconstruction.
///
/// 1. 1D transform of every projection (zero-padded 8×),
/// 2. polar samples `F f(ρ n_θ)` gathered onto a Cartesian lattice by
///    bilinear interpolation in `(ρ, θ)`, wrapping `θ = π` to `θ = 0` with
///    `ρ ↦ -ρ`, and zero beyond `|ρ| = π/d`,
/// 3. 2D inverse transform on a lattice padded to twice the grid.
pub fn direct_fourier_reconstruct(sinogram: &Sinogram, grid: Grid) -> Result<DirectFourierResult> {
    if grid.rows != grid.cols || grid.rows == 0 || !(grid.extent > 0.0) {
        return Err(Error::ShapeMismatch("direct Fourier reconstruction needs a square grid".into()));
    }
    let g = *sinogram.geometry();
    let d = g.spacing();
    let n_ang = g.angle_count();
    let first = g.offset(-(g.half_count() as i64));
    let spectra: Vec<Spectrum1D> = (0..n_ang)
        .into_par_iter()
        .map(|k| {
            let col = sinogram.column(k);
            dft_1d_padded(&col, d, first, 8 * col.len())
        })
        .collect();

    let n = grid.rows;
    let h = grid.pixel_width();
    let p = (2 * n).next_power_of_two();
    let step = 2.0 * PI / (p as f64 * h);
    let cutoff = PI / d;
    let d_theta = PI / n_ang as f64;

    let polar = |rho: f64, theta: f64| -> Complex64 {
        // θ ∈ [0, π)
        let u = theta / d_theta;
        let k0 = (u.floor() as usize).min(n_ang - 1);
        let frac = u - k0 as f64;
        let lo = spectra[k0].eval(rho);
        let hi = if k0 + 1 < n_ang { spectra[k0 + 1].eval(rho) } else { spectra[0].eval(-rho) };
        lo * (1.0 - frac) + hi * frac
    };

    let (x0, y0) = (grid.x(0), grid.y(grid.rows - 1));
    let mut buf: Vec<Complex64> = (0..p * p)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (signed_index(i % p, p) as f64, signed_index(i / p, p) as f64);
            let (xi, eta) = (a * step, b * step);
            let rho = xi.hypot(eta);
            if rho > cutoff {
                return Complex64::new(0.0, 0.0);
            }
            let mut theta = eta.atan2(xi);
            let mut r = rho;
            if theta < 0.0 {
                theta += PI;
                r = -r;
            }
            if theta >= PI {
                theta -= PI;
                r = -r;
            }
            polar(r, theta) * Complex64::from_polar(1.0, xi * x0 + eta * y0)
        })
        .collect();
    fft_2d(&mut buf, p, true);
    let scale = 1.0 / (p as f64 * h).powi(2);
    let (mut re2, mut im2) = (0.0, 0.0);
    let mut image = Image::zeros(grid);
    for r in 0..n {
        for c in 0..n {
            let v = buf[(n - 1 - r) * p + c] * scale;
            re2 += v.re * v.re;
            im2 += v.im * v.im;
            image.set(r, c, v.re);
        }
    }
    let imaginary_ratio = if re2 == 0.0 { 0.0 } else { im2 / re2 };
    Ok(DirectFourierResult { image, imaginary_ratio })
}

/// Filtering the laminogram: `f = ½ F⁻¹(‖ξ‖ F(B Rf))`.
///
/// The laminogram is formed on a grid of twice the extent and resolution
/// count (same pixel size), transformed with a further 2× zero padding,
/// multiplied by `‖ξ‖` with frequencies beyond `min(π/h, π/d)` zeroed, and
/// cropped back to `grid`.
pub fn laminogram_reconstruct(sinogram: &Sinogram, grid: Grid) -> Result<Image> {
    if grid.rows != grid.cols || grid.rows == 0 || !(grid.extent > 0.0) {
        return Err(Error::ShapeMismatch("laminogram filtering needs a square grid".into()));
    }
    let n = grid.rows;
    let big = Grid::square(2 * n, 2.0 * grid.extent);
    let lam = back_project(sinogram, big, InterpMethod::Linear)?;
    let h = grid.pixel_width();
    let p = (4 * n).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); p * p];
    for r in 0..2 * n {
        for c in 0..2 * n {
            buf[r * p + c].re = lam.get(r, c);
        }
    }
    fft_2d(&mut buf, p, false);
    let step = 2.0 * PI / (p as f64 * h);
    let cutoff = (PI / h).min(PI / sinogram.geometry().spacing());
    buf.par_iter_mut().enumerate().for_each(|(i, v)| {
        let rho = (signed_index(i % p, p) as f64 * step).hypot(signed_index(i / p, p) as f64 * step);
        *v *= if rho > cutoff { 0.0 } else { rho };
    });
    fft_2d(&mut buf, p, true);
    let scale = 0.5 / (p * p) as f64;
    let off = n / 2;
    let mut out = Image::zeros(grid);
    for r in 0..n {
        for c in 0..n {
            out.set(r, c, buf[(r + off) * p + c + off].re * scale);
        }
    }
    Ok(out)
}

/// Truncated Shannon series `Σ_i h_i sinc(π(t - (first + i)·d)/d)` for samples
/// `h_i` taken at `(first + i)·d`.
pub fn shannon_interpolate(samples: &[f64], first: i64, spacing: f64, t: f64) -> f64 {
    let u = t / spacing;
    let whole = u.floor();
    let frac = u - whole;
    if frac == 0.0 {
        let idx = whole as i64 - first;
        return if idx >= 0 && (idx as usize) < samples.len() { samples[idx as usize] } else { 0.0 };
    }
    // sin(π(u - j)) = (-1)^{⌊u⌋ - j} sin(π·frac)
    let s = (PI * frac).sin();
    samples
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let j = first + i as i64;
            let sign = if (whole as i64 - j).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            v * sign * s / (PI * (u - j as f64))
        })
        .sum()
}
