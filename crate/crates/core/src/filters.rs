//! Low-pass reconstruction filters `F_L(S) = |S|·W(S/L)` and their
//! convolution kernels `κ_L = F⁻¹F_L`.
//!
//! With the inverse transform `F⁻¹g(t) = (1/2π)∫ g(S) e^{iSt} dS` and `F_L`
//! even and supported in `[-L, L]`,
//!
//! ```text
//! κ_L(t) = (1/π) ∫_0^L F_L(S) cos(St) dS.
//! ```
//!
//! Ram-Lak, Shepp-Logan and cosine kernels have closed forms; Hamming and
//! Gaussian kernels are integrated numerically with composite Simpson.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Minimum number of Simpson panels on `[0, L]`.
pub const MIN_SIMPSON_PANELS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterKind {
    RamLak,
    SheppLogan,
    Cosine,
    /// `β + (1 - β) cos(πS)` with `β ∈ [1/2, 1]`.
    Hamming(f64),
    /// `exp(-(πS/β)²)` with `β > 1`.
    Gaussian(f64),
}

impl FilterKind {
    /// Window `W(s)`, zero for `|s| > 1`.
    pub fn window(&self, s: f64) -> f64 {
        let s = s.abs();
        if s > 1.0 {
            return 0.0;
        }
        match *self {
            FilterKind::RamLak => 1.0,
            FilterKind::SheppLogan => sinc(PI * s / 2.0),
            FilterKind::Cosine => (PI * s / 2.0).cos(),
            FilterKind::Hamming(beta) => beta + (1.0 - beta) * (PI * s).cos(),
            FilterKind::Gaussian(beta) => (-(PI * s / beta).powi(2)).exp(),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            FilterKind::Hamming(beta) if !(0.5..=1.0).contains(&beta) => {
                Err(Error::InvalidArgument(format!("Hamming parameter {beta} outside [1/2, 1]")))
            }
            FilterKind::Gaussian(beta) if !(beta > 1.0 && beta.is_finite()) => {
                Err(Error::InvalidArgument(format!("Gaussian parameter {beta} must exceed 1")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterKind::RamLak => f.write_str("ram-lak"),
            FilterKind::SheppLogan => f.write_str("shepp-logan"),
            FilterKind::Cosine => f.write_str("cosine"),
            FilterKind::Hamming(b) => write!(f, "hamming:{b}"),
            FilterKind::Gaussian(b) => write!(f, "gaussian:{b}"),
        }
    }
}

impl FromStr for FilterKind {
    type Err = Error;

    /// `ram-lak`, `shepp-logan`, `cosine`, `hamming:<beta>` or `gaussian:<beta>`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let beta = |p: Option<&str>| -> Result<f64> {
            let p = p.ok_or_else(|| {
                Error::InvalidArgument(format!("filter `{name}` needs a parameter, e.g. `{name}:0.5`"))
            })?;
            p.parse::<f64>().map_err(|e| Error::InvalidArgument(format!("bad filter parameter `{p}`: {e}")))
        };
        let kind = match (name, param) {
            ("ram-lak", None) => FilterKind::RamLak,
            ("shepp-logan", None) => FilterKind::SheppLogan,
            ("cosine", None) => FilterKind::Cosine,
            ("hamming", p) => FilterKind::Hamming(beta(p)?),
            ("gaussian", p) => FilterKind::Gaussian(beta(p)?),
            _ => return Err(Error::InvalidArgument(format!("unknown filter `{s}`"))),
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// Filter family plus bandwidth `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    kind: FilterKind,
    bandwidth: f64,
}

impl FilterSpec {
    pub fn new(kind: FilterKind, bandwidth: f64) -> Result<Self> {
        kind.validate()?;
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::InvalidArgument(format!("bandwidth {bandwidth} must be positive")));
        }
        Ok(Self { kind, bandwidth })
    }

    pub fn kind(&self) -> FilterKind {
        self.kind
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn window(&self, s: f64) -> f64 {
        self.kind.window(s)
    }

    /// `F_L(S) = |S|·W(S/L)`.
    pub fn response(&self, freq: f64) -> f64 {
        freq.abs() * self.window(freq / self.bandwidth)
    }

    /// `κ_L(t) = F⁻¹F_L(t)` at an arbitrary offset.
    pub fn kernel(&self, t: f64) -> f64 {
        let l = self.bandwidth;
        match self.kind {
            FilterKind::RamLak => ramp_kernel(l, t),
            FilterKind::SheppLogan => {
                let x = l * t;
                l * l / (PI * PI) * (one_minus_cos_over(PI / 2.0 + x) + one_minus_cos_over(PI / 2.0 - x))
            }
            FilterKind::Cosine => {
                let a = PI / (2.0 * l);
                0.5 * (ramp_kernel(l, t + a) + ramp_kernel(l, t - a))
            }
            FilterKind::Hamming(_) | FilterKind::Gaussian(_) => self.kernel_by_quadrature(t),
        }
    }

    /// `(1/π)∫_0^L F_L(S) cos(St) dS` by composite Simpson; the panel count
    /// grows with `L·|t|` to keep ≥ 64 panels per period of the cosine.
    pub fn kernel_by_quadrature(&self, t: f64) -> f64 {
        let l = self.bandwidth;
        let periods = (l * t.abs() / (2.0 * PI)).ceil() as usize;
        let mut panels = MIN_SIMPSON_PANELS.max(64 * periods);
        panels += panels % 2;
        let h = l / panels as f64;
        let f = |s: f64| s * self.kind.window(s / l) * (s * t).cos();
        let mut acc = f(0.0) + f(l);
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(i as f64 * h);
        }
        acc * h / 3.0 / PI
    }

    /// Samples `κ_L(jπ/L)` for `j = -count..=count`.
    ///
    /// Ram-Lak, Shepp-Logan and cosine use their closed-form sample values;
    /// Hamming and Gaussian fall back to quadrature.
    pub fn kernel_samples(&self, count: usize) -> KernelSamples {
        let l = self.bandwidth;
        let l2 = l * l;
        let pi3 = PI * PI * PI;
        let half: Vec<f64> = (0..=count)
            .map(|j| {
                let jf = j as f64;
                let q = 1.0 - 4.0 * jf * jf;
                match self.kind {
                    FilterKind::RamLak => {
                        if j == 0 {
                            l2 / (2.0 * PI)
                        } else if j % 2 == 0 {
                            0.0
                        } else {
                            -2.0 * l2 / (pi3 * jf * jf)
                        }
                    }
                    FilterKind::SheppLogan => 4.0 * l2 / (pi3 * q),
                    FilterKind::Cosine => {
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        2.0 * l2 / (PI * PI) * (sign / q - 2.0 * (1.0 + 4.0 * jf * jf) / (PI * q * q))
                    }
                    FilterKind::Hamming(_) | FilterKind::Gaussian(_) => self.kernel_by_quadrature(jf * PI / l),
                }
            })
            .collect();
        let mut values = Vec::with_capacity(2 * count + 1);
        values.extend(half.iter().rev());
        values.extend(&half[1..]);
        KernelSamples { values, count }
    }
}

/// `κ_L(jπ/L)` for `j = -count..=count`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSamples {
    values: Vec<f64>,
    count: usize,
}

impl KernelSamples {
    pub fn count(&self) -> usize {
        self.count
    }

    /// Sample at signed index `j`; zero beyond the table.
    pub fn get(&self, j: i64) -> f64 {
        if j.unsigned_abs() as usize > self.count {
            0.0
        } else {
            self.values[(j + self.count as i64) as usize]
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Ram-Lak kernel `(1/π)∫_0^L S cos(St) dS = (L²/π)·G(Lt)` with
/// `G(x) = sin x / x + (cos x - 1)/x²`.
fn ramp_kernel(l: f64, t: f64) -> f64 {
    let x = l * t;
    let g = if x.abs() < 0.5 {
        // G(x) = Σ (-1)^n x^{2n} / ((2n)! (2n + 2))
        let x2 = x * x;
        let mut term = 1.0;
        let mut sum = 0.5;
        for n in 1..8 {
            let nf = n as f64;
            term *= -x2 / ((2.0 * nf - 1.0) * (2.0 * nf));
            sum += term / (2.0 * nf + 2.0);
        }
        sum
    } else {
        x.sin() / x + (x.cos() - 1.0) / (x * x)
    };
    l * l / PI * g
}

/// `(1 - cos x)/x`, continuous at zero.
fn one_minus_cos_over(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        x / 2.0 * (1.0 - x2 / 12.0 + x2 * x2 / 360.0)
    } else {
        (1.0 - x.cos()) / x
    }
}
