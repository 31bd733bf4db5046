//! Interpolation of uniformly sampled functions, zero outside the samples.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpMethod {
    /// Value at the closer sample; a query halfway between two samples takes
    /// the left one.
    Nearest,
    /// Piecewise linear spline.
    Linear,
}

impl FromStr for InterpMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nearest" => Ok(Self::Nearest),
            "linear" => Ok(Self::Linear),
            other => {
                Err(Error::InvalidArgument(format!("unknown interpolation `{other}` (expected nearest or linear)")))
            }
        }
    }
}

impl fmt::Display for InterpMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Nearest => "nearest",
            Self::Linear => "linear",
        })
    }
}

/// Samples `values[i]` taken at `first + i·spacing`.
#[derive(Debug, Clone, Copy)]
pub struct SampledRow<'a> {
    values: &'a [f64],
    first: f64,
    spacing: f64,
}

impl<'a> SampledRow<'a> {
    pub fn new(values: &'a [f64], first: f64, spacing: f64) -> Self {
        Self { values, first, spacing }
    }

    /// Interpolated value at `t`; zero outside `[t_first, t_last]`.
    #[inline]
    pub fn eval(&self, t: f64, method: InterpMethod) -> f64 {
        let n = self.values.len();
        if n == 0 {
            return 0.0;
        }
        let pos = (t - self.first) / self.spacing;
        let last = (n - 1) as f64;
        if !(pos >= 0.0 && pos <= last) {
            return 0.0;
        }
        let m = (pos.floor() as usize).min(n - 1);
        let frac = pos - m as f64;
        if m + 1 >= n {
            return self.values[m];
        }
        match method {
            InterpMethod::Nearest => {
                if frac <= 0.5 {
                    self.values[m]
                } else {
                    self.values[m + 1]
                }
            }
            InterpMethod::Linear => frac * self.values[m + 1] + (1.0 - frac) * self.values[m],
        }
    }
}

/// Interpolates samples taken at `i·spacing`, `i = 0..values.len()`.
pub fn interpolate(values: &[f64], spacing: f64, t: f64, method: InterpMethod) -> f64 {
    SampledRow::new(values, 0.0, spacing).eval(t, method)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let v = [0.0, 1.0];
        assert_eq!(interpolate(&v, 1.0, 0.25, InterpMethod::Linear), 0.25);
        assert_eq!(interpolate(&v, 1.0, 0.5, InterpMethod::Nearest), 0.0);
        assert_eq!(interpolate(&v, 1.0, 0.51, InterpMethod::Nearest), 1.0);
        assert_eq!(interpolate(&v, 1.0, 1.0, InterpMethod::Linear), 1.0);
        for m in [InterpMethod::Nearest, InterpMethod::Linear] {
            assert_eq!(interpolate(&v, 1.0, -0.1, m), 0.0);
            assert_eq!(interpolate(&v, 1.0, 1.5, m), 0.0);
            assert_eq!(interpolate(&v, 1.0, f64::NAN, m), 0.0);
        }
    }

    #[test]
    fn offset_rows() {
        let v = [1.0, 3.0, 5.0];
        let row = SampledRow::new(&v, -0.2, 0.2);
        assert!((row.eval(0.1, InterpMethod::Linear) - 4.0).abs() < 1e-12);
        assert_eq!(row.eval(-0.2, InterpMethod::Nearest), 1.0);
    }

    #[test]
    fn parses_names() {
        assert_eq!("linear".parse::<InterpMethod>().unwrap(), InterpMethod::Linear);
        assert!("cubic".parse::<InterpMethod>().is_err());
    }

    proptest! {
        #[test]
        fn linear_reproduces_affine(a in -3.0..3.0f64, b in -3.0..3.0f64, t in 0.0..9.0f64) {
            let v: Vec<f64> = (0..10).map(|i| a + b * i as f64).collect();
            prop_assert!((interpolate(&v, 1.0, t, InterpMethod::Linear) - (a + b * t)).abs() < 1e-12);
        }
    }
}
