use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{HmlError, Result};

/// A singular point of the operator on the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingularPoint {
    Finite(Complex64),
    Infinity,
}

impl fmt::Display for SingularPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingularPoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            SingularPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Ordinary differential operator `Σ_j P_j(z) θ^j` with `θ = z d/dz` and
/// rational polynomial coefficients `P_j`.
#[derive(Debug, Clone)]
pub struct PFOperator {
    theta_coefficients: Vec<Vec<BigRational>>,
    float_coefficients: Vec<Vec<f64>>,
    singular_points: Vec<SingularPoint>,
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

/// Horner evaluation of a real polynomial at a complex point.
pub(crate) fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Complex roots of a real polynomial (ascending coefficients, nonzero leading term).
fn real_poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    match deg {
        0 => Vec::new(),
        1 => vec![Complex64::new(-coeffs[0] / coeffs[1], 0.0)],
        _ => {
            let lead = coeffs[deg];
            let mut c = DMatrix::<f64>::zeros(deg, deg);
            for i in 1..deg {
                c[(i, i - 1)] = 1.0;
            }
            for i in 0..deg {
                c[(i, deg - 1)] = -coeffs[i] / lead;
            }
            c.complex_eigenvalues().iter().copied().collect()
        }
    }
}

impl PFOperator {
    /// Builds and validates an operator. `theta_coefficients[j]` lists the
    /// ascending z-coefficients of the polynomial multiplying `θ^j`.
    pub fn new(theta_coefficients: Vec<Vec<BigRational>>, singular_points: Vec<SingularPoint>) -> Result<Self> {
        if theta_coefficients.len() < 2 {
            return Err(HmlError::config(
                "pf_operator",
                "need at least the θ^0 and θ^1 coefficients",
            ));
        }
        let theta_coefficients: Vec<_> = theta_coefficients.into_iter().map(trim).collect();
        let leading = theta_coefficients.last().unwrap();
        if leading.is_empty() {
            return Err(HmlError::config("pf_operator", "leading θ-coefficient is zero"));
        }
        if leading[0].is_zero() {
            return Err(HmlError::config(
                "pf_operator",
                "leading θ-coefficient vanishes at the basepoint z = 0",
            ));
        }
        let float_coefficients: Vec<Vec<f64>> = theta_coefficients
            .iter()
            .map(|p| p.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect())
            .collect();
        if float_coefficients.iter().flatten().any(|c| !c.is_finite()) {
            return Err(HmlError::config("pf_operator", "coefficient not representable"));
        }
        let op = PFOperator {
            theta_coefficients,
            float_coefficients,
            singular_points,
        };
        for root in real_poly_roots(op.float_coefficients.last().unwrap()) {
            let listed = op.singular_points.iter().any(|s| match s {
                SingularPoint::Finite(p) => (p - root).norm() <= 1e-9 * root.norm().max(1e-300),
                SingularPoint::Infinity => false,
            });
            if !listed {
                return Err(HmlError::config(
                    "singular_points",
                    format!("root {root} of the leading coefficient is not listed"),
                ));
            }
        }
        Ok(op)
    }

    /// The trivial first-order operator `θ`.
    pub fn theta() -> Self {
        let one = BigRational::from_integer(1.into());
        PFOperator::new(
            vec![vec![], vec![one]],
            vec![SingularPoint::Finite(Complex64::new(0.0, 0.0)), SingularPoint::Infinity],
        )
        .expect("θ is a valid operator")
    }

    pub fn order(&self) -> usize {
        self.theta_coefficients.len() - 1
    }

    pub fn theta_coefficients(&self) -> &[Vec<BigRational>] {
        &self.theta_coefficients
    }

    pub(crate) fn float_coefficients(&self) -> &[Vec<f64>] {
        &self.float_coefficients
    }

    pub fn singular_points(&self) -> &[SingularPoint] {
        &self.singular_points
    }

    /// Finite singular points other than the origin.
    pub fn finite_nonzero_singularities(&self) -> Vec<Complex64> {
        self.singular_points
            .iter()
            .filter_map(|s| match s {
                SingularPoint::Finite(z) if z.norm() > 0.0 => Some(*z),
                _ => None,
            })
            .collect()
    }

    /// All finite singular points, the origin included.
    pub fn finite_singularities(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0)];
        out.extend(self.finite_nonzero_singularities());
        out
    }

    /// Radius of convergence of power series at the origin.
    pub fn convergence_radius(&self) -> f64 {
        self.finite_nonzero_singularities()
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// `P_j(z)` for every `j`.
    pub fn eval_coefficients(&self, z: Complex64) -> Vec<Complex64> {
        self.float_coefficients.iter().map(|p| horner(p, z)).collect()
    }

    /// Matrix `A(z)` of the companion system `θY = A(z) Y` for
    /// `Y = (y, θy, ..., θ^{N-1} y)`.
    pub fn companion(&self, z: Complex64) -> DMatrix<Complex64> {
        let n = self.order();
        let p = self.eval_coefficients(z);
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            a[(i, i + 1)] = Complex64::new(1.0, 0.0);
        }
        for j in 0..n {
            a[(n - 1, j)] = -p[j] / p[n];
        }
        a
    }

    /// Distance from `z` to the nearest finite singular point (origin included).
    pub fn distance_to_singularities(&self, z: Complex64) -> f64 {
        self.finite_singularities()
            .iter()
            .map(|s| (z - s).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Applies the operator to a θ-jet `(y, θy, ..., θ^N y)` of length `N + 1`.
    pub fn apply_to_jet(&self, z: Complex64, jet: &DVector<Complex64>) -> Complex64 {
        self.eval_coefficients(z)
            .iter()
            .zip(jet.iter())
            .map(|(p, y)| p * y)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn unlisted_root_is_rejected() {
        // (1 - 2z) θ: root z = 1/2 must be listed
        let err = PFOperator::new(
            vec![vec![], vec![r(1), r(-2)]],
            vec![SingularPoint::Finite(Complex64::new(0.0, 0.0))],
        )
        .unwrap_err();
        assert!(err.to_string().contains("singular_points"));
    }

    #[test]
    fn companion_last_row() {
        let op = PFOperator::new(
            vec![vec![r(3)], vec![r(0), r(1)], vec![r(1), r(-2)]],
            vec![SingularPoint::Finite(Complex64::new(0.5, 0.0)), SingularPoint::Infinity],
        )
        .unwrap();
        let a = op.companion(Complex64::new(0.25, 0.0));
        assert!((a[(1, 0)] - Complex64::new(-6.0, 0.0)).norm() < 1e-15);
        assert!((a[(1, 1)] - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
        assert_eq!(a[(0, 1)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn trivial_operator_has_order_one() {
        assert_eq!(PFOperator::theta().order(), 1);
    }
}
