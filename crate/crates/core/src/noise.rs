//! Seeded additive Gaussian noise.
//!
//! Variates come from ChaCha20 seeded with `seed_from_u64(seed)`. Each
//! standard normal is `Φ⁻¹(u)` with `u = ((next_u64 >> 11) + 0.5)·2⁻⁵³`, so
//! the stream is reproducible across platforms.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::projector::{FanSinogram, Sinogram};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseReport {
    /// Standard deviation of each added variate.
    pub sigma: f64,
    /// Realized `‖noise‖₂ / ‖data‖₂`, zero for zero data.
    pub realized_ratio: f64,
}

/// Deterministic stream of standard normal variates.
pub struct NormalStream {
    rng: ChaCha20Rng,
    normal: Normal,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha20Rng::seed_from_u64(seed), normal: Normal::new(0.0, 1.0).expect("standard normal") }
    }

    pub fn next_uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        let u = self.next_uniform();
        self.normal.inverse_cdf(u)
    }
}

/// Adds `σ·ε` in place with `σ = level·‖values‖₂/√n`, so the expected noise
/// energy is `level·‖values‖₂`.
pub fn add_noise_in_place(values: &mut [f64], level: f64, seed: u64) -> Result<NoiseReport> {
    if !(level >= 0.0) || !level.is_finite() {
        return Err(Error::InvalidArgument(format!("noise level must be ≥ 0, got {level}")));
    }
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if level == 0.0 || values.is_empty() || norm == 0.0 {
        return Ok(NoiseReport { sigma: 0.0, realized_ratio: 0.0 });
    }
    let sigma = level * norm / (values.len() as f64).sqrt();
    let mut stream = NormalStream::new(seed);
    let mut energy = 0.0;
    for v in values.iter_mut() {
        let e = sigma * stream.next_normal();
        energy += e * e;
        *v += e;
    }
    Ok(NoiseReport { sigma, realized_ratio: energy.sqrt() / norm })
}

pub fn add_noise(sinogram: &Sinogram, level: f64, seed: u64) -> Result<(Sinogram, NoiseReport)> {
    let mut out = sinogram.clone();
    let report = add_noise_in_place(out.values_mut(), level, seed)?;
    Ok((out, report))
}

pub fn add_noise_fan(sinogram: &FanSinogram, level: f64, seed: u64) -> Result<(FanSinogram, NoiseReport)> {
    let mut out = sinogram.clone();
    let report = add_noise_in_place(out.values_mut(), level, seed)?;
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ParallelGeometry;
    use crate::phantom::{analytic_sinogram, Phantom};

    fn ball_sino() -> Sinogram {
        analytic_sinogram(&Phantom::unit_ball(), &ParallelGeometry::new(0.01, 100, 150, 1.0).unwrap())
    }

    #[test]
    fn zero_level_is_identity() {
        let s = ball_sino();
        let (n, r) = add_noise(&s, 0.0, 99).unwrap();
        assert_eq!(n, s);
        assert_eq!(r.realized_ratio, 0.0);
    }

    #[test]
    fn deterministic() {
        let s = ball_sino();
        let (a, _) = add_noise(&s, 0.1, 5).unwrap();
        let (b, _) = add_noise(&s, 0.1, 5).unwrap();
        assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
        let (c, _) = add_noise(&s, 0.1, 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn realized_ratio_concentrates() {
        let s = ball_sino();
        assert_eq!((s.rows(), s.cols()), (201, 150));
        for seed in 0..20 {
            let (n, r) = add_noise(&s, 0.1, seed).unwrap();
            assert!((0.08..=0.12).contains(&r.realized_ratio), "seed {seed}: {}", r.realized_ratio);
            let diff: f64 = n.values().iter().zip(s.values()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            assert!((diff / s.l2_norm() - r.realized_ratio).abs() < 1e-12);
        }
    }

    #[test]
    fn variates_look_standard() {
        let mut st = NormalStream::new(1);
        let xs: Vec<f64> = (0..200_000).map(|_| st.next_normal()).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.01);
        assert!((var - 1.0).abs() < 0.02);
    }

    #[test]
    fn rejects_negative_level() {
        assert!(add_noise(&ball_sino(), -0.1, 0).is_err());
    }
}
