//! Transport of solution jets along paths: adaptive Dormand–Prince on the
//! companion system, plus local Taylor expansions about regular points.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::operator::PFOperator;
use super::path::PathPlan;
use crate::error::{HmlError, Result};

pub const DEFAULT_TOL: f64 = 1e-12;

const MIN_STEP: f64 = 1e-13;
const MAX_STEPS: usize = 2_000_000;

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `dY/ds = (b - a)/z(s) · A(z(s)) Y` for `z(s) = a + s (b - a)`, `s ∈ [0, 1]`.
fn integrate_segment(
    op: &PFOperator,
    a: Complex64,
    b: Complex64,
    mut y: DMatrix<Complex64>,
    tol: f64,
) -> Result<DMatrix<Complex64>> {
    let d = b - a;
    if d.norm() == 0.0 {
        return Ok(y);
    }
    let rhs = |s: f64, y: &DMatrix<Complex64>| -> DMatrix<Complex64> {
        let z = a + d * s;
        op.companion(z) * y * (d / z)
    };
    // initial step from the local singularity distance
    let dist = op.distance_to_singularities(a).min(op.distance_to_singularities(b));
    let mut h = (0.05 * dist / d.norm()).clamp(1e-6, 0.1);
    let mut s = 0.0;
    let mut steps = 0;
    let mut k: Vec<DMatrix<Complex64>> = Vec::with_capacity(7);
    while s < 1.0 {
        steps += 1;
        if steps > MAX_STEPS || h < MIN_STEP {
            return Err(HmlError::PathTooClose {
                point: format!("{}", a + d * s),
            });
        }
        let h_eff = h.min(1.0 - s);
        k.clear();
        k.push(rhs(s, &y));
        for i in 1..7 {
            let mut yi = y.clone();
            for (j, kj) in k.iter().enumerate() {
                if A[i][j] != 0.0 {
                    yi += kj * Complex64::new(h_eff * A[i][j], 0.0);
                }
            }
            k.push(rhs(s + C[i] * h_eff, &yi));
        }
        let mut y5 = y.clone();
        let mut err = DMatrix::<Complex64>::zeros(y.nrows(), y.ncols());
        for i in 0..7 {
            if B5[i] != 0.0 {
                y5 += &k[i] * Complex64::new(h_eff * B5[i], 0.0);
            }
            err += &k[i] * Complex64::new(h_eff * (B5[i] - B4[i]), 0.0);
        }
        // per-column relative error
        let mut e = 0.0f64;
        for j in 0..y.ncols() {
            let scale = y
                .column(j)
                .iter()
                .chain(y5.column(j).iter())
                .map(|c| c.norm())
                .fold(0.0, f64::max)
                .max(f64::MIN_POSITIVE);
            let ej = err.column(j).iter().map(|c| c.norm()).fold(0.0, f64::max);
            e = e.max(ej / (tol * scale));
        }
        if e <= 1.0 {
            s += h_eff;
            y = y5;
        }
        let factor = if e == 0.0 { 5.0 } else { 0.9 * e.powf(-0.2) };
        h = h_eff * factor.clamp(0.2, 5.0);
    }
    Ok(y)
}

/// Transports a matrix whose columns are solution jets.
pub fn integrate_matrix(
    op: &PFOperator,
    initial: &DMatrix<Complex64>,
    path: &PathPlan,
    tol: f64,
) -> Result<DMatrix<Complex64>> {
    if initial.nrows() != op.order() {
        return Err(HmlError::Dimension(format!(
            "jet has {} rows, operator order {}",
            initial.nrows(),
            op.order()
        )));
    }
    path.validate(op)?;
    let mut y = initial.clone();
    for (a, b) in path.segments() {
        y = integrate_segment(op, a, b, y, tol)?;
    }
    Ok(y)
}

/// Transports one solution jet `(y, θy, ..., θ^{N-1} y)` along `path`.
pub fn integrate_along(
    op: &PFOperator,
    initial: &DVector<Complex64>,
    path: &PathPlan,
    tol: f64,
) -> Result<DVector<Complex64>> {
    let m = DMatrix::from_column_slice(initial.len(), 1, initial.as_slice());
    let out = integrate_matrix(op, &m, path, tol)?;
    Ok(DVector::from_column_slice(out.as_slice()))
}

/// Re-expands a real polynomial about `c` in the variable `u = (z - c)/ρ`.
fn recenter(p: &[f64], c: Complex64, rho: f64) -> Vec<Complex64> {
    let n = p.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    // synthetic division repeated: Taylor coefficients at c
    let mut work: Vec<Complex64> = p.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    for m in 0..n {
        let deg = work.len();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut quotient = vec![Complex64::new(0.0, 0.0); deg.saturating_sub(1)];
        for i in (0..deg).rev() {
            acc = acc * c + work[i];
            if i > 0 {
                quotient[i - 1] = acc;
            }
        }
        out[m] = acc * rho.powi(m as i32);
        work = quotient;
    }
    out
}

/// Taylor expansion of the transport matrix about a regular point `c`:
/// `Y(z) = U(z - c) Y(c)` for θ-jets `Y`, valid for `|z - c| ≤ ρ/2`.
#[derive(Debug, Clone)]
pub struct LocalExpansion {
    center: Complex64,
    radius: f64,
    coeffs: Vec<DMatrix<Complex64>>,
}

pub const LOCAL_ORDER: usize = 64;

impl LocalExpansion {
    pub fn new(op: &PFOperator, center: Complex64) -> Result<Self> {
        let rho = op.distance_to_singularities(center);
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(HmlError::OutsideChart(format!("{center} is singular")));
        }
        let n = op.order();
        let fc = op.float_coefficients();
        // D(z) = z P_N(z)
        let mut dpoly = vec![0.0];
        dpoly.extend_from_slice(&fc[n]);
        let dt = recenter(&dpoly, center, rho);
        let pn = recenter(&fc[n], center, rho);
        let pj: Vec<Vec<Complex64>> = (0..n).map(|j| recenter(&fc[j], center, rho)).collect();
        let deg_m = pj.iter().map(Vec::len).chain([pn.len()]).max().unwrap_or(1);
        let mt: Vec<DMatrix<Complex64>> = (0..deg_m)
            .map(|i| {
                let mut m = DMatrix::zeros(n, n);
                for r in 0..n - 1 {
                    m[(r, r + 1)] = pn.get(i).copied().unwrap_or_default() * rho;
                }
                for j in 0..n {
                    m[(n - 1, j)] = -pj[j].get(i).copied().unwrap_or_default() * rho;
                }
                m
            })
            .collect();
        let d0 = dt[0];
        let mut coeffs: Vec<DMatrix<Complex64>> = vec![DMatrix::identity(n, n)];
        for k in 0..LOCAL_ORDER {
            let mut acc = DMatrix::<Complex64>::zeros(n, n);
            for (i, mi) in mt.iter().enumerate().take(k + 1) {
                acc += mi * &coeffs[k - i];
            }
            for i in 1..dt.len().min(k + 2) {
                acc -= &coeffs[k + 1 - i] * (dt[i] * (k + 1 - i) as f64);
            }
            coeffs.push(acc / (d0 * (k + 1) as f64));
        }
        Ok(LocalExpansion {
            center,
            radius: rho,
            coeffs,
        })
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Transport matrix from the center to `z`.
    pub fn transport_to(&self, z: Complex64) -> Result<DMatrix<Complex64>> {
        let u = (z - self.center) / self.radius;
        if u.norm() > 0.5 {
            return Err(HmlError::OutsideChart(format!(
                "{z} is outside the local expansion about {}",
                self.center
            )));
        }
        let mut acc = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * u + c;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picard_fuchs::operator::SingularPoint;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    /// (1 - z) θ - z/2: solution (1 - z)^{-1/2}, θ-jet z/2 (1-z)^{-3/2}
    fn sqrt_op() -> PFOperator {
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        PFOperator::new(
            vec![vec![r(0, 1), r(-1, 2)], vec![r(1, 1), r(-1, 1)]],
            vec![
                SingularPoint::Finite(Complex64::new(0.0, 0.0)),
                SingularPoint::Finite(Complex64::new(1.0, 0.0)),
                SingularPoint::Infinity,
            ],
        )
        .unwrap()
    }

    fn exact(z: Complex64) -> Complex64 {
        (Complex64::new(1.0, 0.0) - z).powf(-0.5)
    }

    #[test]
    fn first_order_transport_matches_closed_form() {
        let op = sqrt_op();
        let a = Complex64::new(0.2, 0.1);
        let b = Complex64::new(-0.5, 0.6);
        let plan = PathPlan::plan(&op, a, b, 0.05).unwrap();
        let y = integrate_along(&op, &DVector::from_element(1, exact(a)), &plan, 1e-12).unwrap();
        assert!((y[0] - exact(b)).norm() < 1e-10);
    }

    #[test]
    fn local_expansion_matches_closed_form() {
        let op = sqrt_op();
        let c = Complex64::new(0.3, 0.2);
        let loc = LocalExpansion::new(&op, c).unwrap();
        let z = c + Complex64::new(0.05, -0.1);
        let u = loc.transport_to(z).unwrap();
        assert!((u[(0, 0)] * exact(c) - exact(z)).norm() < 1e-13);
    }

    #[test]
    fn recenter_shifts_polynomial() {
        // 1 + 2z + 3z^2 about c = 1 with ρ = 2: 6 + 8(z-1) + 3(z-1)^2
        let q = recenter(&[1.0, 2.0, 3.0], Complex64::new(1.0, 0.0), 2.0);
        assert!((q[0] - 6.0).norm() < 1e-14);
        assert!((q[1] - 16.0).norm() < 1e-14);
        assert!((q[2] - 12.0).norm() < 1e-14);
    }
}
