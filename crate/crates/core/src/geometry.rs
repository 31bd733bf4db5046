//! Lines in the plane and the two sampling schemes used to acquire Radon data.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};

/// Relative slack allowed when checking coverage conditions such as `M·d ≥ r`.
const COVERAGE_SLACK: f64 = 1e-12;

/// The line `{ t·n_θ + s·n_θ^⊥ : s ∈ ℝ }` with `n_θ = (cos θ, sin θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineParam {
    pub t: f64,
    pub theta: f64,
}

impl LineParam {
    pub fn new(t: f64, theta: f64) -> Self {
        Self { t, theta }
    }

    /// Equivalent parametrization with `θ ∈ [0, π)`.
    ///
    /// The angle is first reduced modulo `2π`; angles in `[π, 2π)` are folded
    /// back with `l(t, θ + π) = l(-t, θ)`.
    pub fn canonical(self) -> Self {
        let mut theta = self.theta.rem_euclid(TAU);
        // rem_euclid may round a tiny negative angle up to exactly 2π
        if theta >= TAU {
            theta = 0.0;
        }
        let mut t = self.t;
        if theta >= PI {
            theta -= PI;
            t = -t;
        }
        if theta >= PI {
            theta = 0.0;
        }
        Self { t, theta }
    }

    pub fn point(self, s: f64) -> (f64, f64) {
        line_point(self, s)
    }
}

/// Point at arc length `s` on `line`: `t·n_θ + s·n_θ^⊥`.
pub fn line_point(line: LineParam, s: f64) -> (f64, f64) {
    let (sin, cos) = line.theta.sin_cos();
    (line.t * cos - s * sin, line.t * sin + s * cos)
}

/// Coordinates `(t, s)` of `(x, y)` in the frame `(n_θ, n_θ^⊥)`.
pub fn project_point(x: f64, y: f64, theta: f64) -> (f64, f64) {
    let (sin, cos) = theta.sin_cos();
    (x * cos + y * sin, -x * sin + y * cos)
}

/// Parallel-beam line for the fan beam with fan angle `alpha` and source angle
/// `beta` on a circle of radius `source_radius`.
pub fn fan_to_parallel(alpha: f64, beta: f64, source_radius: f64) -> Result<LineParam> {
    if !(alpha.abs() < FRAC_PI_2) {
        return Err(Error::InvalidArgument(format!("fan angle {alpha} outside (-π/2, π/2)")));
    }
    Ok(LineParam::new(source_radius * alpha.sin(), alpha + beta - FRAC_PI_2).canonical())
}

/// Parallel beam sampling `t_j = j·d` (`j = -M..=M`), `θ_k = k·π/N` (`k < N`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelGeometry {
    spacing: f64,
    half_count: usize,
    angles: usize,
    radius: f64,
}

impl ParallelGeometry {
    /// Validates `d > 0`, `M ≥ 1`, `N ≥ 1`, `r > 0` and the coverage `M·d ≥ r`.
    pub fn new(spacing: f64, half_count: usize, angles: usize, radius: f64) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidGeometry(format!("radial spacing {spacing} must be positive")));
        }
        if half_count == 0 || angles == 0 {
            return Err(Error::InvalidGeometry("need M ≥ 1 and N ≥ 1".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidGeometry(format!("support radius {radius} must be positive")));
        }
        let reach = half_count as f64 * spacing;
        if reach < radius * (1.0 - COVERAGE_SLACK) {
            return Err(Error::InvalidGeometry(format!("M·d = {reach} does not cover the support radius {radius}")));
        }
        Ok(Self { spacing, half_count, angles, radius })
    }

    /// Geometry coupled to the bandwidth: `d = π/L`, `M = r·L/π`, `N = 3M`.
    ///
    /// `N = 3M` stands in for the optimal relation `N = π·M`, which is not an
    /// integer. `L` must be a positive multiple of `π` and `r` a positive integer.
    pub fn from_bandwidth(bandwidth: f64, radius: f64) -> Result<Self> {
        let ratio = bandwidth / PI;
        let multiple = ratio.round();
        if !(bandwidth > 0.0) || multiple < 1.0 || (ratio - multiple).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidGeometry(format!("bandwidth {bandwidth} is not a positive multiple of π")));
        }
        if !(radius >= 1.0) || radius.fract() != 0.0 {
            return Err(Error::InvalidGeometry(format!("support radius {radius} must be a positive integer")));
        }
        let half_count = (radius * multiple) as usize;
        Self::new(PI / bandwidth, half_count, 3 * half_count, radius)
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn half_count(&self) -> usize {
        self.half_count
    }

    pub fn angle_count(&self) -> usize {
        self.angles
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Number of radial samples, `2M + 1`.
    pub fn offset_count(&self) -> usize {
        2 * self.half_count + 1
    }

    /// Bandwidth matched to the spacing, `π/d`.
    pub fn nyquist_bandwidth(&self) -> f64 {
        PI / self.spacing
    }

    /// `t_j` for `j ∈ -M..=M`.
    pub fn offset(&self, j: i64) -> f64 {
        j as f64 * self.spacing
    }

    /// Offset of the sample stored at row `row` (`row = j + M`).
    pub fn offset_at_row(&self, row: usize) -> f64 {
        self.offset(row as i64 - self.half_count as i64)
    }

    pub fn angle(&self, k: usize) -> f64 {
        k as f64 * PI / self.angles as f64
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.angles).map(|k| self.angle(k)).collect()
    }

    /// All sampled lines, row-major in `(j, k)`.
    pub fn lines(&self) -> Vec<LineParam> {
        let mut lines = Vec::with_capacity(self.offset_count() * self.angles);
        for row in 0..self.offset_count() {
            let t = self.offset_at_row(row);
            for k in 0..self.angles {
                lines.push(LineParam::new(t, self.angle(k)));
            }
        }
        lines
    }
}

/// Fan beam sampling with the source on a circle of radius `D`.
///
/// `α_j = j·Δα` for `j = -q..=q` and `β_k = k·Δβ` for `k < p`, with
/// `Δα = φ/(2q)` and `Δβ = 2π/p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanGeometry {
    source_radius: f64,
    opening: f64,
    sources: usize,
    half_rays: usize,
    radius: f64,
}

impl FanGeometry {
    /// Validates the parameters and the coverage condition `r ≤ D·sin(φ/2)`.
    pub fn new(source_radius: f64, opening: f64, sources: usize, half_rays: usize, radius: f64) -> Result<Self> {
        if !(source_radius > 0.0 && source_radius.is_finite()) {
            return Err(Error::InvalidGeometry(format!("source radius {source_radius} must be positive")));
        }
        if !(opening > 0.0 && opening < PI) {
            return Err(Error::InvalidGeometry(format!("fan opening {opening} outside (0, π)")));
        }
        if sources == 0 || half_rays == 0 {
            return Err(Error::InvalidGeometry("need p ≥ 1 and q ≥ 1".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidGeometry(format!("support radius {radius} must be positive")));
        }
        let reach = source_radius * (opening / 2.0).sin();
        if radius > reach * (1.0 + COVERAGE_SLACK) {
            return Err(Error::InvalidGeometry(format!(
                "fan does not cover the support: r = {radius} > D·sin(φ/2) = {reach}"
            )));
        }
        Ok(Self { source_radius, opening, sources, half_rays, radius })
    }

    pub fn source_radius(&self) -> f64 {
        self.source_radius
    }

    pub fn opening(&self) -> f64 {
        self.opening
    }

    pub fn source_count(&self) -> usize {
        self.sources
    }

    pub fn half_rays(&self) -> usize {
        self.half_rays
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn ray_count(&self) -> usize {
        2 * self.half_rays + 1
    }

    pub fn alpha_step(&self) -> f64 {
        self.opening / (2 * self.half_rays) as f64
    }

    pub fn beta_step(&self) -> f64 {
        TAU / self.sources as f64
    }

    pub fn alpha(&self, j: i64) -> f64 {
        j as f64 * self.alpha_step()
    }

    pub fn alpha_at_row(&self, row: usize) -> f64 {
        self.alpha(row as i64 - self.half_rays as i64)
    }

    pub fn beta(&self, k: usize) -> f64 {
        k as f64 * self.beta_step()
    }

    /// Sampling conditions for bandwidth `L` that the data violate:
    /// `q ≥ φ·D·L/(2π)`, `p ≥ 2D·r·L/(D + r)` and `D ≥ 3r`.
    pub fn sampling_warnings(&self, bandwidth: f64) -> Vec<String> {
        let (d, r) = (self.source_radius, self.radius);
        let mut out = Vec::new();
        let q_min = self.opening * d * bandwidth / TAU;
        if (self.half_rays as f64) < q_min * (1.0 - 1e-9) {
            out.push(format!("q = {} below {q_min:.2} for L = {bandwidth}", self.half_rays));
        }
        let p_min = 2.0 * d * r * bandwidth / (d + r);
        if (self.sources as f64) < p_min * (1.0 - 1e-9) {
            out.push(format!("p = {} below {p_min:.2} for L = {bandwidth}", self.sources));
        }
        if d < 3.0 * r * (1.0 - 1e-12) {
            out.push(format!("D = {d} below 3r = {}", 3.0 * r));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: (f64, f64), b: (f64, f64), tol: f64) -> bool {
        (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol
    }

    #[test]
    fn line_point_examples() {
        assert!(close(line_point(LineParam::new(1.0, 0.0), 0.0), (1.0, 0.0), 1e-15));
        assert!(close(line_point(LineParam::new(0.0, 0.0), 1.0), (0.0, 1.0), 1e-15));
        assert!(close(line_point(LineParam::new(1.0, FRAC_PI_2), 1.0), (-1.0, 1.0), 1e-15));
    }

    #[test]
    fn project_point_examples() {
        assert!(close(project_point(1.0, 0.0, 0.0), (1.0, 0.0), 1e-15));
        assert!(close(project_point(0.0, 1.0, FRAC_PI_2), (1.0, 0.0), 1e-15));
        for theta in [0.0, 0.3, 1.7, -2.2, 5.0] {
            let (t, s) = project_point(3.0, 4.0, theta);
            assert!((t * t + s * s - 25.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn fan_to_parallel_examples() {
        let l = fan_to_parallel(0.0, FRAC_PI_2, 3.0).unwrap();
        assert_eq!((l.t, l.theta), (0.0, 0.0));
        let l = fan_to_parallel(PI / 6.0, FRAC_PI_2, 2.0).unwrap();
        assert!((l.t - 1.0).abs() < 1e-15 && (l.theta - PI / 6.0).abs() < 1e-15);
        let l = fan_to_parallel(0.0, 0.0, 3.0).unwrap();
        assert_eq!(l.t, 0.0);
        assert!((l.theta - FRAC_PI_2).abs() < 1e-15);
        assert!(fan_to_parallel(FRAC_PI_2, 0.0, 1.0).is_err());
        assert!(fan_to_parallel(-2.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn coupled_geometry() {
        let g = ParallelGeometry::from_bandwidth(50.0 * PI, 1.0).unwrap();
        assert!((g.spacing() - 0.02).abs() < 1e-15);
        assert_eq!((g.half_count(), g.angle_count()), (50, 150));
        let g = ParallelGeometry::from_bandwidth(PI, 1.0).unwrap();
        assert_eq!((g.spacing(), g.half_count(), g.angle_count()), (1.0, 1, 3));
        let g = ParallelGeometry::from_bandwidth(10.0 * PI, 2.0).unwrap();
        assert_eq!((g.half_count(), g.angle_count()), (20, 60));
        assert!(ParallelGeometry::from_bandwidth(3.0, 1.0).is_err());
        assert!(ParallelGeometry::from_bandwidth(0.0, 1.0).is_err());
        assert!(ParallelGeometry::from_bandwidth(-PI, 1.0).is_err());
        assert!(ParallelGeometry::from_bandwidth(PI, 1.5).is_err());
    }

    #[test]
    fn constructors_reject_uncovered_support() {
        assert!(ParallelGeometry::new(0.1, 5, 10, 1.0).is_err());
        assert!(ParallelGeometry::new(0.1, 10, 10, 1.0).is_ok());
        assert!(FanGeometry::new(3.0, PI / 3.0, 270, 90, 1.5).is_ok());
        assert!(FanGeometry::new(3.0, PI / 3.0, 270, 90, 1.6).is_err());
        assert!(FanGeometry::new(3.0, PI, 270, 90, 1.0).is_err());
    }

    #[test]
    fn fan_spacings_and_warnings() {
        let g = FanGeometry::new(3.0, PI / 3.0, 270, 90, 1.0).unwrap();
        assert!((g.alpha_step() - PI / 540.0).abs() < 1e-15);
        assert!((g.beta_step() - TAU / 270.0).abs() < 1e-15);
        assert_eq!(g.alpha(-90), -PI / 6.0);
        assert!(g.sampling_warnings(180.0).is_empty());
        assert_eq!(g.sampling_warnings(400.0).len(), 2);
        let close = FanGeometry::new(2.0, PI / 3.0, 6, 8, 1.0).unwrap();
        assert!(close.sampling_warnings(1.0).iter().any(|w| w.contains("3r")));
    }

    proptest! {
        #[test]
        fn canonical_is_idempotent(t in -5.0..5.0f64, theta in -20.0..20.0f64) {
            let once = LineParam::new(t, theta).canonical();
            prop_assert!(once.theta >= 0.0 && once.theta < PI);
            prop_assert_eq!(once.canonical(), once);
        }

        #[test]
        fn canonical_describes_the_same_line(t in -5.0..5.0f64, theta in -20.0..20.0f64, s in -3.0..3.0f64) {
            let line = LineParam::new(t, theta);
            let canon = line.canonical();
            // a point on the original line projects to offset `canon.t`
            let (x, y) = line.point(s);
            let (tc, _) = project_point(x, y, canon.theta);
            prop_assert!((tc - canon.t).abs() < 1e-9);
        }

        #[test]
        fn project_then_place_is_identity(x in -10.0..10.0f64, y in -10.0..10.0f64, theta in -7.0..7.0f64) {
            let (t, s) = project_point(x, y, theta);
            let (px, py) = line_point(LineParam::new(t, theta), s);
            prop_assert!((px - x).abs() <= 1e-12 && (py - y).abs() <= 1e-12);
        }

        #[test]
        fn central_fan_ray_has_zero_offset(beta in 0.0..TAU, d in 0.5..10.0f64) {
            prop_assert_eq!(fan_to_parallel(0.0, beta, d).unwrap().t, 0.0);
        }
    }
}
