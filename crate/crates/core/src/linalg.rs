//! Dense complex helpers shared by the numerical modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{HmlError, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Relative size of the anti-Hermitian part tolerated before symmetrizing.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Frobenius norm.
pub fn fnorm(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Norm of `(M - M^*)/2` relative to the norm of `M`.
pub fn anti_hermitian_ratio(m: &CMatrix) -> f64 {
    let n = fnorm(m);
    if n == 0.0 {
        return 0.0;
    }
    fnorm(&((m - m.adjoint()) * cz(0.5, 0.0))) / n
}

/// Symmetrized copy `(M + M^*)/2` after asserting the anti-Hermitian part is small.
pub fn hermitian_part(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    if m.nrows() != m.ncols() {
        return Err(HmlError::Dimension(format!(
            "{}x{} is not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let r = anti_hermitian_ratio(m);
    if !(r <= tol) {
        return Err(HmlError::NotHermitian(r));
    }
    Ok((m + m.adjoint()) * cz(0.5, 0.0))
}

/// Eigenvalues of `(M + M^*)/2` in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let h = (m + m.adjoint()) * cz(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Matrix absolute value `V |Λ| V^*` of the Hermitian part.
pub fn hermitian_abs(m: &CMatrix) -> CMatrix {
    if m.nrows() == 0 {
        return m.clone();
    }
    let h = (m + m.adjoint()) * cz(0.5, 0.0);
    let e = h.symmetric_eigen();
    let v = &e.eigenvectors;
    let d = CMatrix::from_diagonal(&e.eigenvalues.map(|l| cz(l.abs(), 0.0)));
    v * d * v.adjoint()
}

/// Real trace of a square matrix.
pub fn trace_re(m: &CMatrix) -> f64 {
    m.trace().re
}

pub fn inverse(m: &CMatrix, what: &str) -> Result<CMatrix> {
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| HmlError::Singular(what.to_string()))
}

/// Relative difference `‖a − b‖ / max(‖a‖, ‖b‖)`, zero when both vanish.
pub fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = fnorm(&(a - b));
    let s = fnorm(a).max(fnorm(b));
    if s == 0.0 {
        d
    } else {
        d / s
    }
}
