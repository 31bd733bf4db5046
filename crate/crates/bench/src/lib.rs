//! Shared fixtures for benchmarks.

use std::f64::consts::PI;

use tomokit::phantom::{analytic_sinogram, rasterize};
use tomokit::{Grid, Image, ParallelGeometry, Phantom, Sinogram};

/// Shepp-Logan sampled with `L = factor·π` on the unit disk.
pub fn shepp_logan_sinogram(factor: f64) -> Sinogram {
    let g = ParallelGeometry::from_bandwidth(factor * PI, 1.0).expect("valid bandwidth");
    analytic_sinogram(&Phantom::builtin("shepp-logan").expect("builtin"), &g)
}

pub fn shepp_logan_image(n: usize) -> Image {
    rasterize(&Phantom::builtin("shepp-logan").expect("builtin"), Grid::square(n, 1.0))
}
