//! Radial grids `log:a:b:N` and `lin:a:b:N` with phases from a ray count.

use std::fmt;
use std::str::FromStr;

use hml_core::poincare::ray_phase;
use num_complex::Complex64;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Lin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub spacing: Spacing,
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl FromStr for GridSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |m: &str| CliError::Usage(format!("grid `{s}`: {m}"));
        let parts: Vec<&str> = s.split(':').collect();
        let [kind, a, b, n] = parts.as_slice() else {
            return Err(bad("expected log:a:b:N or lin:a:b:N"));
        };
        let spacing = match *kind {
            "log" => Spacing::Log,
            "lin" => Spacing::Lin,
            _ => return Err(bad("spacing must be `log` or `lin`")),
        };
        let a: f64 = a.parse().map_err(|_| bad("a is not a number"))?;
        let b: f64 = b.parse().map_err(|_| bad("b is not a number"))?;
        let n: usize = n.parse().map_err(|_| bad("N is not a positive integer"))?;
        if n == 0 {
            return Err(bad("N must be positive"));
        }
        if !(a.is_finite() && b.is_finite()) || !(a > 0.0 && b > 0.0) {
            return Err(bad("radii must be positive and finite"));
        }
        Ok(GridSpec { spacing, a, b, n })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.spacing {
            Spacing::Log => "log",
            Spacing::Lin => "lin",
        };
        write!(f, "{kind}:{:e}:{:e}:{}", self.a, self.b, self.n)
    }
}

/// One grid point: every chart coordinate set to `r e^{iφ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub radius: f64,
    pub ray: usize,
    pub z: Vec<Complex64>,
}

impl GridSpec {
    pub fn radii(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.a];
        }
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                let s = i as f64 / last;
                match self.spacing {
                    Spacing::Log => (self.a.ln() + s * (self.b.ln() - self.a.ln())).exp(),
                    Spacing::Lin => self.a + s * (self.b - self.a),
                }
            })
            .collect()
    }

    /// Radius-major points over `rays` phases in `m` coordinates.
    pub fn points(&self, rays: usize, m: usize) -> Vec<GridPoint> {
        let mut out = Vec::with_capacity(self.n * rays);
        for r in self.radii() {
            for j in 0..rays {
                let z = vec![Complex64::from_polar(r, ray_phase(j, rays)); m];
                out.push(GridPoint {
                    index: out.len(),
                    radius: r,
                    ray: j,
                    z,
                });
            }
        }
        out
    }
}
