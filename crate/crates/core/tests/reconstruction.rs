use std::f64::consts::PI;

use tomokit::fbp::{convolve_rows, evaluation_range};
use tomokit::io::{read_sinogram, write_sinogram, SinogramData};
use tomokit::phantom::{analytic_fan_sinogram, analytic_sinogram, rasterize};
use tomokit::projector::forward_project;
use tomokit::spectral::{fourier_slice_residual, laminogram_reconstruct};
use tomokit::*;

/// Parallel FBP written out directly: Ram-Lak samples from their closed form,
/// convolution over `-2M..=2M`, linear interpolation inline.
fn direct_fbp(sino: &Sinogram, l: f64, grid: Grid) -> Vec<f64> {
    let g = sino.geometry();
    let (m, n_ang, d) = (g.half_count() as i64, g.angle_count(), g.spacing());
    let kappa = |j: i64| {
        if j == 0 {
            l * l / (2.0 * PI)
        } else if j % 2 == 0 {
            0.0
        } else {
            -2.0 * l * l / (PI.powi(3) * (j * j) as f64)
        }
    };
    let h: Vec<Vec<f64>> = (0..n_ang)
        .map(|k| {
            (-2 * m..=2 * m)
                .map(|i| d * (-m..=m).map(|j| kappa(i - j) * sino.get((j + m) as usize, k)).sum::<f64>())
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(grid.len());
    for r in 0..grid.rows {
        for c in 0..grid.cols {
            let (x, y) = (grid.x(c), grid.y(r));
            let mut acc = 0.0;
            for (k, hk) in h.iter().enumerate() {
                let theta = k as f64 * PI / n_ang as f64;
                let u = (x * theta.cos() + y * theta.sin()) / d + 2.0 * m as f64;
                let i0 = u.floor();
                if i0 >= 0.0 && i0 + 1.0 <= (4 * m) as f64 {
                    let f = u - i0;
                    acc += (1.0 - f) * hk[i0 as usize] + f * hk[i0 as usize + 1];
                }
            }
            out.push(acc / (2 * n_ang) as f64);
        }
    }
    out
}

#[test]
fn fbp_matches_direct_summation() {
    let l = 20.0 * PI;
    let g = ParallelGeometry::from_bandwidth(l, 1.0).unwrap();
    let sino = analytic_sinogram(&Phantom::builtin("shepp-logan").unwrap(), &g);
    let grid = Grid::square(48, 1.0);
    let lib =
        fbp_parallel(&sino, &FilterSpec::new(FilterKind::RamLak, l).unwrap(), InterpMethod::Linear, grid).unwrap();
    let oracle = direct_fbp(&sino, l, grid);
    for (a, b) in lib.values().iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn evaluation_range_covers_corners() {
    let g = ParallelGeometry::from_bandwidth(50.0 * PI, 1.0).unwrap();
    assert_eq!(evaluation_range(&g, Grid::square(256, 1.0)), 71);
    assert_eq!(evaluation_range(&g, Grid::square(4, 0.2)), 50);
    let f = convolve_rows(&Sinogram::zeros(g), &FilterSpec::new(FilterKind::RamLak, 50.0 * PI).unwrap());
    assert_eq!(f.half_range(), 50);
}

#[test]
fn discrete_and_analytic_sinograms_agree() {
    let sl = Phantom::builtin("thorax").unwrap();
    let g = ParallelGeometry::from_bandwidth(20.0 * PI, 1.0).unwrap();
    let analytic = analytic_sinogram(&sl, &g);
    let discrete = forward_project(&rasterize(&sl, Grid::square(256, 1.0)), &g).unwrap();
    let diff: f64 = analytic.values().iter().zip(discrete.values()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    assert!(diff / analytic.l2_norm() < 2e-2);
}

#[test]
fn fan_and_parallel_reconstructions_are_close() {
    let sl = Phantom::builtin("shepp-logan").unwrap();
    let grid = Grid::square(64, 1.0);
    let fg = FanGeometry::new(3.0, PI / 3.0, 180, 60, 1.0).unwrap();
    let spec = FilterSpec::new(FilterKind::Cosine, 120.0).unwrap();
    let fan = fbp_fan(&analytic_fan_sinogram(&sl, &fg), &spec, InterpMethod::Linear, grid).unwrap();
    let pg = ParallelGeometry::new(PI / 120.0, 39, 117, 1.0).unwrap();
    let par = fbp_parallel(&analytic_sinogram(&sl, &pg), &spec, InterpMethod::Linear, grid).unwrap();
    let truth = rasterize(&sl, grid);
    let ef = error_metrics(&fan.image, &truth).unwrap().relative_l2;
    let ep = error_metrics(&par, &truth).unwrap().relative_l2;
    assert!(ef <= 1.5 * ep, "fan {ef} parallel {ep}");
}

#[test]
fn laminogram_approaches_fbp_with_resolution() {
    let l = 50.0 * PI;
    let g = ParallelGeometry::from_bandwidth(l, 1.0).unwrap();
    let sino = analytic_sinogram(&Phantom::unit_ball(), &g);
    let spec = FilterSpec::new(FilterKind::RamLak, l).unwrap();
    let gap = |n: usize| {
        let grid = Grid::square(n, 1.0);
        let lam = laminogram_reconstruct(&sino, grid).unwrap();
        let fbp = fbp_parallel(&sino, &spec, InterpMethod::Linear, grid).unwrap();
        error_metrics(&lam, &fbp).unwrap().relative_l2
    };
    assert!(gap(512) < gap(256));
}

#[test]
fn fourier_slice_refines_for_smooth_object() {
    let blob = GaussianBlob::new(1.0, 0.05);
    let g = ParallelGeometry::from_bandwidth(50.0 * PI, 1.0).unwrap();
    let sino = analytic_sinogram(&blob, &g);
    let residual = |n: usize| fourier_slice_residual(&rasterize(&blob, Grid::square(n, 1.0)), &sino, 20).unwrap();
    let (coarse, fine) = (residual(256), residual(512));
    assert!(fine < coarse);
    assert!(fine <= 1e-2);
}

#[test]
fn sinogram_file_round_trip() {
    let g = ParallelGeometry::from_bandwidth(4.0 * PI, 1.0).unwrap();
    let data = SinogramData::Parallel(analytic_sinogram(&Phantom::unit_ball(), &g));
    let path = std::env::temp_dir().join(format!("tomokit-roundtrip-{}.tomo", std::process::id()));
    write_sinogram(&path, &data).unwrap();
    let back = read_sinogram(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(back, data);
}
