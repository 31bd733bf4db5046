//! Analytic phantoms: weighted superpositions of ellipses whose Radon
//! transform is available in closed form.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{fan_to_parallel, FanGeometry, ParallelGeometry};
use crate::projector::{FanSinogram, Grid, Image, Sinogram};

const SHEPP_LOGAN_TABLE: &str = include_str!("../data/shepp_logan.txt");
const THORAX_TABLE: &str = include_str!("../data/thorax.txt");

/// Anything with pointwise values and a closed-form Radon transform.
pub trait AnalyticObject: Sync {
    fn value(&self, x: f64, y: f64) -> f64;

    /// Line integral along `l(t, θ)`.
    fn radon(&self, t: f64, theta: f64) -> f64;

    /// Radius of a disk centred at the origin holding the object.
    fn support_radius(&self) -> f64;
}

/// `ρ·χ` of the ellipse with semi-axes `a` (along the rotated x axis) and `b`,
/// centre `(h, k)` and rotation `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub k: f64,
    pub phi: f64,
    pub rho: f64,
}

impl Ellipse {
    pub fn new(a: f64, b: f64, h: f64, k: f64, phi: f64, rho: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidArgument(format!("ellipse semi-axes must be positive, got a = {a}, b = {b}")));
        }
        if ![h, k, phi, rho].iter().all(|v| v.is_finite()) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument("ellipse parameters must be finite".into()));
        }
        Ok(Self { a, b, h, k, phi, rho })
    }

    /// Disk of radius `radius` centred at the origin with unit weight.
    pub fn disk(radius: f64) -> Self {
        Self { a: radius, b: radius, h: 0.0, k: 0.0, phi: 0.0, rho: 1.0 }
    }

    /// Boundary points count as inside.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (sin, cos) = self.phi.sin_cos();
        let (dx, dy) = (x - self.h, y - self.k);
        let u = (dx * cos + dy * sin) / self.a;
        let v = (-dx * sin + dy * cos) / self.b;
        u * u + v * v <= 1.0
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        if self.contains(x, y) {
            self.rho
        } else {
            0.0
        }
    }

    /// `c_{a,b,φ}(θ) = sqrt(a² cos²(θ-φ) + b² sin²(θ-φ))`, the half-width of
    /// the centred ellipse's shadow on the `θ` axis.
    pub fn shadow_half_width(&self, theta: f64) -> f64 {
        let (sin, cos) = (theta - self.phi).sin_cos();
        (self.a * self.a * cos * cos + self.b * self.b * sin * sin).sqrt()
    }

    /// `ρ · (2ab/c²)·sqrt(c² - τ²)` for `|τ| ≤ c`, zero otherwise, with
    /// `τ = t - h cos θ - k sin θ`.
    pub fn radon(&self, t: f64, theta: f64) -> f64 {
        let (sin, cos) = theta.sin_cos();
        let tau = t - self.h * cos - self.k * sin;
        let c = self.shadow_half_width(theta);
        let c2 = c * c;
        let rest = c2 - tau * tau;
        if rest < 0.0 {
            return 0.0;
        }
        self.rho * 2.0 * self.a * self.b / c2 * rest.sqrt()
    }

    /// Distance from the origin to the farthest point of the ellipse.
    pub fn reach(&self) -> f64 {
        self.h.hypot(self.k) + self.a.max(self.b)
    }

    pub fn l1_norm(&self) -> f64 {
        self.rho.abs() * PI * self.a * self.b
    }

    pub fn shifted(&self, dx: f64, dy: f64) -> Self {
        Self { h: self.h + dx, k: self.k + dy, ..*self }
    }

    /// Rotation by `angle` about the origin.
    pub fn rotated(&self, angle: f64) -> Self {
        let (sin, cos) = angle.sin_cos();
        Self { h: self.h * cos - self.k * sin, k: self.h * sin + self.k * cos, phi: self.phi + angle, ..*self }
    }
}

/// Modified angle `atan((b/a) tan θ)` in `[0, π)` appearing in the scaling
/// rule for `f(x/a, y/b)`, with the branch chosen by the signs of `sin θ`
/// and `cos θ`. Expects `θ ∈ [0, π)`.
pub fn scaled_angle(a: f64, b: f64, theta: f64) -> f64 {
    let (sin, cos) = theta.sin_cos();
    let prod = sin * cos;
    if sin == 0.0 {
        0.0
    } else if cos == 0.0 {
        FRAC_PI_2
    } else if prod > 0.0 {
        (b / a * theta.tan()).atan()
    } else {
        (b / a * theta.tan()).atan() + PI
    }
}

/// Ordered list of weighted ellipses inside `B_r(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Phantom {
    ellipses: Vec<Ellipse>,
    support_radius: f64,
}

impl Phantom {
    /// Every ellipse must satisfy `sqrt(h² + k²) + max(a, b) ≤ r`.
    pub fn new(ellipses: Vec<Ellipse>, support_radius: f64) -> Result<Self> {
        if !(support_radius > 0.0) {
            return Err(Error::InvalidArgument(format!("support radius {support_radius} must be positive")));
        }
        for (i, e) in ellipses.iter().enumerate() {
            if e.reach() > support_radius * (1.0 + 1e-12) {
                return Err(Error::InvalidArgument(format!(
                    "ellipse {} reaches {:.6} outside the support radius {support_radius}",
                    i + 1,
                    e.reach()
                )));
            }
        }
        Ok(Self { ellipses, support_radius })
    }

    pub fn empty(support_radius: f64) -> Self {
        Self { ellipses: Vec::new(), support_radius }
    }

    pub fn unit_ball() -> Self {
        Self { ellipses: vec![Ellipse::disk(1.0)], support_radius: 1.0 }
    }

    /// `shepp-logan` (10 ellipses), `thorax` (7 ellipses) or `unit-ball`.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "shepp-logan" => Self::parse(SHEPP_LOGAN_TABLE, 1.0),
            "thorax" => Self::parse(THORAX_TABLE, 1.0),
            "unit-ball" => Ok(Self::unit_ball()),
            other => Err(Error::UnknownPhantom(other.to_string())),
        }
    }

    /// Parses one ellipse per line as `a b h k phi rho`; `#` starts a comment.
    pub fn parse(text: &str, support_radius: f64) -> Result<Self> {
        let mut ellipses = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields = line
                .split_whitespace()
                .map(|f| f.parse::<f64>().map_err(|e| Error::Parse { line: idx + 1, message: format!("`{f}`: {e}") }))
                .collect::<Result<Vec<_>>>()?;
            if fields.len() != 6 {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected 6 fields `a b h k phi rho`, found {}", fields.len()),
                });
            }
            let e = Ellipse::new(fields[0], fields[1], fields[2], fields[3], fields[4], fields[5])
                .map_err(|e| Error::Parse { line: idx + 1, message: e.to_string() })?;
            ellipses.push(e);
        }
        Self::new(ellipses, support_radius)
    }

    pub fn load(path: &Path, support_radius: f64) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?, support_radius)
    }

    pub fn ellipses(&self) -> &[Ellipse] {
        &self.ellipses
    }

    pub fn l1_norm(&self) -> f64 {
        self.ellipses.iter().map(Ellipse::l1_norm).sum()
    }
}

impl AnalyticObject for Phantom {
    fn value(&self, x: f64, y: f64) -> f64 {
        self.ellipses.iter().map(|e| e.value(x, y)).sum()
    }

    fn radon(&self, t: f64, theta: f64) -> f64 {
        self.ellipses.iter().map(|e| e.radon(t, theta)).sum()
    }

    fn support_radius(&self) -> f64 {
        self.support_radius
    }
}

impl AnalyticObject for Ellipse {
    fn value(&self, x: f64, y: f64) -> f64 {
        Ellipse::value(self, x, y)
    }

    fn radon(&self, t: f64, theta: f64) -> f64 {
        Ellipse::radon(self, t, theta)
    }

    fn support_radius(&self) -> f64 {
        self.reach()
    }
}

/// Smooth test object `amplitude · exp(-‖x‖²/width)`.
///
/// Not compactly supported; `support_radius` is where the profile has decayed
/// below `exp(-10)` of its peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBlob {
    pub amplitude: f64,
    pub width: f64,
}

impl GaussianBlob {
    pub fn new(amplitude: f64, width: f64) -> Self {
        Self { amplitude, width }
    }
}

impl AnalyticObject for GaussianBlob {
    fn value(&self, x: f64, y: f64) -> f64 {
        self.amplitude * (-(x * x + y * y) / self.width).exp()
    }

    fn radon(&self, t: f64, _theta: f64) -> f64 {
        self.amplitude * (PI * self.width).sqrt() * (-t * t / self.width).exp()
    }

    fn support_radius(&self) -> f64 {
        (10.0 * self.width).sqrt()
    }
}

/// Radon transform sampled on a parallel beam geometry.
pub fn analytic_sinogram<O: AnalyticObject + ?Sized>(object: &O, geometry: &ParallelGeometry) -> Sinogram {
    let angles = geometry.angles();
    let mut values = Vec::with_capacity(geometry.offset_count() * angles.len());
    for row in 0..geometry.offset_count() {
        let t = geometry.offset_at_row(row);
        values.extend(angles.iter().map(|&theta| object.radon(t, theta)));
    }
    Sinogram::from_values(*geometry, values).expect("shape matches geometry by construction")
}

/// Fan beam transform `Df(α, β) = Rf(D sin α, α + β - π/2)`.
pub fn analytic_fan_sinogram<O: AnalyticObject + ?Sized>(object: &O, geometry: &FanGeometry) -> FanSinogram {
    let mut values = Vec::with_capacity(geometry.ray_count() * geometry.source_count());
    for row in 0..geometry.ray_count() {
        let alpha = geometry.alpha_at_row(row);
        for k in 0..geometry.source_count() {
            let line = fan_to_parallel(alpha, geometry.beta(k), geometry.source_radius())
                .expect("fan opening below π keeps |α| < π/2");
            values.push(object.radon(line.t, line.theta));
        }
    }
    FanSinogram::from_values(*geometry, values).expect("shape matches geometry by construction")
}

/// Samples `object` at pixel centres.
pub fn rasterize<O: AnalyticObject + ?Sized>(object: &O, grid: Grid) -> Image {
    Image::from_fn(grid, |x, y| object.value(x, y))
}
