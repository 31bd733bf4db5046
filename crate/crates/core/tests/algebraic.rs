use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tomokit::algebraic::*;
use tomokit::{Grid, LineParam, ParallelGeometry};

fn example_lines() -> Vec<LineParam> {
    let s = SQRT_2 / 3.0;
    vec![
        LineParam::new(-s, FRAC_PI_4),
        LineParam::new(0.0, FRAC_PI_4),
        LineParam::new(s, FRAC_PI_4),
        LineParam::new(-2.0 / 3.0, FRAC_PI_2),
        LineParam::new(0.0, FRAC_PI_2),
        LineParam::new(2.0 / 3.0, FRAC_PI_2),
    ]
}

fn example_matrix() -> SparseMatrix {
    build_radon_matrix(Grid::square(3, 1.0), &example_lines()).unwrap()
}

fn pinv_solution(a: &DenseMatrix, y: &[f64]) -> Vec<f64> {
    let m = DMatrix::from_row_slice(a.nrows(), a.ncols(), a.as_slice());
    let p = m.pseudo_inverse(1e-12).unwrap();
    (p * nalgebra::DVector::from_column_slice(y)).iter().copied().collect()
}

#[test]
fn example_system_entries() {
    let r = SQRT_2;
    let expected = [
        [0.0, r, 0.0, 0.0, 0.0, r, 0.0, 0.0, 0.0],
        [r, 0.0, 0.0, 0.0, r, 0.0, 0.0, 0.0, r],
        [0.0, 0.0, 0.0, r, 0.0, 0.0, 0.0, r, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0],
        [0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
        [1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0],
    ];
    let a = example_matrix().to_dense();
    for (j, row) in expected.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            assert!((a.get(j, k) - 2.0 / 3.0 * v).abs() < 1e-12, "entry ({j}, {k})");
        }
    }
}

#[test]
fn kaczmarz_reaches_minimal_norm_solution() {
    let a = example_matrix();
    let dense = a.to_dense();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for omega in [0.5, 1.0, 1.5] {
        let c_true: Vec<f64> = (0..9).map(|_| rng.random_range(0.0..1.0)).collect();
        let y = a.apply(&c_true);
        let opts = KaczmarzOptions { omega, delta: 1e-14, max_sweeps: Some(20_000), ..Default::default() };
        let (c, rep) = kaczmarz(&a, &y, &[0.0; 9], &opts).unwrap();
        assert!(rep.converged());
        let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(rep.residual_norm <= 1e-8 * y_norm);
        let pinv = pinv_solution(&dense, &y);
        for (p, q) in c.iter().zip(&pinv) {
            assert!((p - q).abs() < 1e-6, "ω = {omega}");
        }
        let c_norm: f64 = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        let true_norm: f64 = c_true.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(c_norm <= true_norm + 1e-9);
    }
}

#[test]
fn kaczmarz_row_hits_hyperplane() {
    let a = example_matrix().to_dense();
    let y = [1.0, 2.0, 0.5, 1.5, 1.0, 0.3];
    let mut c = vec![0.0; 9];
    for (j, &yj) in y.iter().enumerate() {
        c = project_row(&c, a.row(j), yj, 1.0).unwrap();
        let dot: f64 = a.row(j).iter().zip(&c).map(|(p, q)| p * q).sum();
        assert!((dot - yj).abs() < 1e-12);
    }
}

#[test]
fn art_on_small_phantom() {
    let a = example_matrix();
    let c_true = [0.0, 1.0, 0.5, 0.2, 0.9, 0.0, 0.3, 0.3, 0.7];
    let y = a.apply(&c_true);
    let delta = 1e-8;
    let opts = KaczmarzOptions { delta, max_sweeps: Some(50_000), ..Default::default() };
    let (c, rep) = kaczmarz_nonneg(&a, &y, &[0.0; 9], &opts).unwrap();
    assert!(c.iter().all(|&v| v >= 0.0));
    let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(rep.converged());
    assert!(rep.residual_norm <= delta * y_norm || rep.stop_reason == StopReason::TolStep);
    assert!(rep.residual_norm < 1e-6 * y_norm);
}

#[test]
fn shuffled_rows_still_fit_consistent_data() {
    let a = example_matrix();
    let y = a.apply(&[0.3, 0.1, 0.0, 1.0, 0.4, 0.2, 0.0, 0.6, 0.8]);
    let opts =
        KaczmarzOptions { delta: 1e-12, order: RowOrder::Shuffled(17), max_sweeps: Some(20_000), ..Default::default() };
    let (c, rep) = kaczmarz(&a, &y, &[0.0; 9], &opts).unwrap();
    let r: f64 = a.apply(&c).iter().zip(&y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    assert!(rep.converged());
    assert!(r < 1e-8);
}

fn random_dense(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DenseMatrix {
    DenseMatrix::from_row_major(m, n, (0..m * n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

#[test]
fn tikhonov_limits() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let a = random_dense(&mut rng, 20, 5);
        let y: Vec<f64> = (0..20).map(|_| rng.random_range(-2.0..2.0)).collect();
        let aty = a.apply_transpose(&y);
        let aty_norm = aty.iter().map(|v| v * v).sum::<f64>().sqrt();

        let (big, _) = tikhonov_cg(&a, &y, 1e6, &Regularizer::Identity, &CgOptions::default()).unwrap();
        assert!(big.iter().map(|v| v * v).sum::<f64>().sqrt() <= aty_norm / 1e6);

        let opts = CgOptions { tol: 1e-14, ..Default::default() };
        let (small, rep) = tikhonov_cg(&a, &y, 1e-10, &Regularizer::Identity, &opts).unwrap();
        assert!(rep.converged());
        let qr = least_squares_qr(&a, &y).unwrap();
        for (p, q) in small.iter().zip(&qr.coefficients) {
            assert!((p - q).abs() < 1e-5);
        }
    }
}

#[test]
fn tikhonov_tall_six_by_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_dense(&mut rng, 6, 3);
    let y: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
    let opts = CgOptions { tol: 1e-14, ..Default::default() };
    let (c, _) = tikhonov_cg(&a, &y, 1e-10, &Regularizer::Identity, &opts).unwrap();
    let qr = least_squares_qr(&a, &y).unwrap();
    assert!(c.iter().zip(&qr.coefficients).all(|(p, q)| (p - q).abs() < 1e-5));
}

#[test]
fn tikhonov_with_spd_penalty_matches_direct_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let a = random_dense(&mut rng, 8, 4);
    let y: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
    let l = random_dense(&mut rng, 4, 4);
    let lm = DMatrix::from_row_slice(4, 4, l.as_slice());
    let b = &lm * lm.transpose() + DMatrix::identity(4, 4);
    let bd = DenseMatrix::from_row_major(4, 4, b.transpose().iter().copied().collect()).unwrap();
    let gamma = 0.7;
    let (c, _) =
        tikhonov_cg(&a, &y, gamma, &Regularizer::Dense(bd), &CgOptions { tol: 1e-14, ..Default::default() }).unwrap();

    let am = DMatrix::from_row_slice(8, 4, a.as_slice());
    let lhs = am.transpose() * &am + b * gamma;
    let rhs = am.transpose() * nalgebra::DVector::from_column_slice(&y);
    let direct = lhs.lu().solve(&rhs).unwrap();
    assert!(c.iter().zip(direct.iter()).all(|(p, q)| (p - q).abs() < 1e-10));
}

#[test]
fn tikhonov_ignores_row_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = random_dense(&mut rng, 12, 6);
    let y: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
    let perm: Vec<usize> = (0..12).rev().collect();
    let pa = DenseMatrix::from_rows(&perm.iter().map(|&i| a.row(i).to_vec()).collect::<Vec<_>>()).unwrap();
    let py: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
    let opts = CgOptions { tol: 1e-14, ..Default::default() };
    let (c1, _) = tikhonov_cg(&a, &y, 0.1, &Regularizer::Identity, &opts).unwrap();
    let (c2, _) = tikhonov_cg(&pa, &py, 0.1, &Regularizer::Identity, &opts).unwrap();
    assert!(c1.iter().zip(&c2).all(|(p, q)| (p - q).abs() < 1e-10));
}

#[test]
fn qr_normal_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let a = random_dense(&mut rng, 20, 5);
    let y: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..1.0)).collect();
    let s = least_squares_qr(&a, &y).unwrap();
    let r: Vec<f64> = a.apply(&s.coefficients).iter().zip(&y).map(|(p, q)| p - q).collect();
    assert!(a.apply_transpose(&r).iter().all(|v| v.abs() < 1e-8));
    let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!((rn - s.residual_norm).abs() < 1e-12);
}

#[test]
fn qr_rejects_oversized_input() {
    let a = DenseMatrix::zeros(10_001, 1_000);
    assert!(least_squares_qr(&a, &vec![0.0; 10_001]).is_err());
}

#[test]
fn radon_matrix_at_full_scale() {
    let g = ParallelGeometry::new(1.0 / 100.0, 100, 300, 1.0).unwrap();
    let grid = Grid::square(256, 1.0);
    let a = build_radon_matrix(grid, &g.lines()).unwrap();
    assert_eq!((a.nrows(), a.ncols()), (60300, 65536));
    assert!((a.nnz() as f64) < 0.01 * 60300.0 * 65536.0);
}

/// Length of the chord of `line` inside `[-e, e]²` by slab clipping.
fn clipped_length(line: LineParam, e: f64) -> f64 {
    let (sin, cos) = line.theta.sin_cos();
    let (px, py) = (line.t * cos, line.t * sin);
    let (dx, dy) = (-sin, cos);
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (p, d) in [(px, dx), (py, dy)] {
        if d.abs() < 1e-15 {
            if p.abs() > e {
                return 0.0;
            }
        } else {
            let (a, b) = ((-e - p) / d, (e - p) / d);
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
    }
    (hi - lo).max(0.0)
}

proptest! {
    #[test]
    fn row_sums_are_chord_lengths(t in -1.6..1.6f64, theta in 0.0..std::f64::consts::PI, n in 1usize..24) {
        let line = LineParam::new(t, theta);
        let a = build_radon_matrix(Grid::square(n, 1.0), &[line]).unwrap();
        let sum: f64 = a.row(0).1.iter().sum();
        prop_assert!((sum - clipped_length(line, 1.0)).abs() < 1e-10);
        prop_assert!(a.row(0).1.iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn matrix_text_dump_round_trips() {
    let a = example_matrix();
    let back = SparseMatrix::from_text(&a.to_text()).unwrap();
    assert_eq!(back.nnz(), a.nnz());
    let (x, y) = (back.to_dense(), a.to_dense());
    assert!(x.as_slice().iter().zip(y.as_slice()).all(|(p, q)| (p - q).abs() <= 1e-15 * q.abs()));
}
