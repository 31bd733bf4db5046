//! Two-dimensional computed tomography.
//!
//! The crate covers the full chain from an analytic object to a reconstructed
//! image:
//!
//! * [`phantom`]: ellipse phantoms whose Radon transform is known in closed form,
//! * [`projector`]: pixel images, sinograms, exact ray/pixel intersection
//!   lengths, discrete forward and back projection,
//! * [`filters`]: the low-pass filter family `F_L(S) = |S| W(S/L)` and the
//!   samples of its inverse Fourier transform,
//! * [`fbp`]: filtered back projection for parallel and fan beam data,
//! * [`spectral`]: Fourier slice checks, direct Fourier reconstruction,
//!   laminogram filtering and Shannon interpolation,
//! * [`algebraic`]: the Radon matrix, Kaczmarz/ART, Tikhonov least squares
//!   and dense QR least squares.
//!
//! Lines are parametrized as `l(t, θ) = { t·n_θ + s·n_θ^⊥ : s ∈ ℝ }` with
//! `n_θ = (cos θ, sin θ)`; the Fourier transform uses the kernel `e^{-iSt}`
//! with the `1/(2π)` factor on the inverse.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebraic;
pub mod error;
pub mod fbp;
pub mod filters;
pub mod geometry;
pub mod interp;
pub mod io;
pub mod metrics;
pub mod noise;
pub mod phantom;
pub mod projector;
pub mod spectral;

pub use error::{Error, Result};
pub use fbp::{fbp_fan, fbp_parallel, FanReconstruction};
pub use filters::{FilterKind, FilterSpec};
pub use geometry::{FanGeometry, LineParam, ParallelGeometry};
pub use interp::InterpMethod;
pub use metrics::{error_metrics, ErrorMetrics};
pub use phantom::{AnalyticObject, Ellipse, GaussianBlob, Phantom};
pub use projector::{FanSinogram, Grid, Image, Sinogram};
