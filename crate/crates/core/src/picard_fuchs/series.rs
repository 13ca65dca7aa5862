//! Power-series and Frobenius solutions at the origin.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::operator::PFOperator;
use crate::error::{HmlError, Result};

/// Default truncation order of series at the origin.
pub const DEFAULT_SERIES_ORDER: usize = 200;

/// Fraction of the convergence radius inside which series are evaluated directly.
pub const HANDOFF_FRACTION: f64 = 0.5;

/// Holomorphic solution `Σ a_k z^k` at the origin, normalized by `a_0 = 1`.
///
/// Exact coefficients are kept for re-checking; evaluation uses the rescaled
/// coefficients `b_k = a_k R^k`, with `R` the convergence radius, which stay
/// representable in `f64` long after `a_k` itself overflows.
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    pub basepoint: Complex64,
    pub coefficients: Vec<BigRational>,
    pub scaled: Vec<f64>,
    pub scale: f64,
    pub truncation_order: usize,
    /// Estimated truncation error at the handoff radius `HANDOFF_FRACTION · R`.
    pub tail_bound: f64,
}

/// `I_d(s) = Σ_j c_{j,d} s^j`, the part of the operator shifting degree by `d`.
fn shifted_indicial(op: &PFOperator, d: usize, s: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    let mut pow = BigRational::from_integer(1.into());
    for p in op.theta_coefficients() {
        if let Some(c) = p.get(d) {
            acc += c * &pow;
        }
        pow *= s;
    }
    acc
}

fn max_shift(op: &PFOperator) -> usize {
    op.theta_coefficients()
        .iter()
        .map(|p| p.len().saturating_sub(1))
        .max()
        .unwrap_or(0)
}

fn geometric_tail(scaled: &[f64], fraction: f64) -> f64 {
    let n = scaled.len();
    let window = &scaled[n.saturating_sub(11)..];
    let ratios: Vec<f64> = window
        .windows(2)
        .filter(|w| w[0] != 0.0)
        .map(|w| (w[1] / w[0]).abs())
        .collect();
    let last = scaled.last().map_or(0.0, |c| c.abs());
    if ratios.is_empty() {
        return last * fraction.powi(n as i32);
    }
    let rho = ratios.iter().sum::<f64>() / ratios.len() as f64 * fraction;
    if rho >= 1.0 {
        return f64::INFINITY;
    }
    last * fraction.powi(n as i32) * rho / (1.0 - rho)
}

/// Holomorphic solution at the MUM point `z = 0`.
pub fn series_seed(op: &PFOperator, order: usize) -> Result<SeriesSolution> {
    let zero = BigRational::zero();
    if !shifted_indicial(op, 0, &zero).is_zero() {
        return Err(HmlError::IndicialObstruction { index: 0 });
    }
    let dmax = max_shift(op);
    let scale = op.convergence_radius();
    let scale = if scale.is_finite() { scale } else { 1.0 };
    let mut a = vec![BigRational::from_integer(1.into())];
    let mut b = vec![1.0f64];
    for k in 1..=order {
        let kq = BigRational::from_integer(k.into());
        let lead = shifted_indicial(op, 0, &kq);
        if lead.is_zero() {
            return Err(HmlError::IndicialObstruction { index: k });
        }
        let mut rhs = BigRational::zero();
        let mut rhs_f = 0.0;
        for d in 1..=dmax.min(k) {
            let s = BigRational::from_integer((k - d).into());
            let idk = shifted_indicial(op, d, &s);
            rhs -= &idk * &a[k - d];
            rhs_f -= idk.to_f64().unwrap_or(f64::NAN) * scale.powi(d as i32) * b[k - d];
        }
        b.push(rhs_f / lead.to_f64().unwrap_or(f64::NAN));
        a.push(rhs / lead);
    }
    let tail_bound = geometric_tail(&b, HANDOFF_FRACTION);
    Ok(SeriesSolution {
        basepoint: Complex64::new(0.0, 0.0),
        coefficients: a,
        scaled: b,
        scale,
        truncation_order: order,
        tail_bound,
    })
}

impl SeriesSolution {
    /// Re-checks the recursion exactly; returns the first failing index.
    pub fn check_recursion(&self, op: &PFOperator) -> std::result::Result<(), usize> {
        let dmax = max_shift(op);
        for k in 0..self.coefficients.len() {
            let mut acc = BigRational::zero();
            for d in 0..=dmax.min(k) {
                let s = BigRational::from_integer((k - d).into());
                acc += shifted_indicial(op, d, &s) * &self.coefficients[k - d];
            }
            if !acc.is_zero() {
                return Err(k);
            }
        }
        Ok(())
    }

    /// Value of the truncated series at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let w = z / self.scale;
        self.scaled
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c)
    }

    /// `θ^r` of the truncated series at `z`.
    pub fn eval_theta(&self, z: Complex64, r: u32) -> Complex64 {
        let w = z / self.scale;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &c) in self.scaled.iter().enumerate().rev() {
            acc = acc * w + c * (k as f64).powi(r as i32);
        }
        acc
    }
}

/// Truncated power series in `ε` of fixed length.
type EpsSeries = Vec<f64>;

fn eps_mul(a: &[f64], b: &[f64]) -> EpsSeries {
    let n = a.len();
    let mut out = vec![0.0; n];
    for i in 0..n {
        if a[i] == 0.0 {
            continue;
        }
        for j in 0..n - i {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

fn eps_inv(a: &[f64]) -> EpsSeries {
    let n = a.len();
    let mut out = vec![0.0; n];
    out[0] = 1.0 / a[0];
    for k in 1..n {
        let mut s = 0.0;
        for j in 1..=k {
            s += a[j] * out[k - j];
        }
        out[k] = -s / a[0];
    }
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `p(s0 + ε)` as an ε-series for a real polynomial `p` in ascending order.
fn poly_shift(p: &[f64], s0: f64, len: usize) -> EpsSeries {
    let mut out = vec![0.0; len];
    for (m, o) in out.iter_mut().enumerate() {
        for (j, &c) in p.iter().enumerate().skip(m) {
            *o += c * binomial(j, m) * s0.powi((j - m) as i32);
        }
    }
    out
}

/// Frobenius basis at a point of maximal unipotent monodromy at the origin.
///
/// For an operator of order `N` with indicial polynomial `c ε^N`, the
/// solutions are the `ε^j` coefficients of `z^ε Σ_k a_k(ε) z^k`, i.e.
/// `ϖ_j = Σ_i (log z)^i / i! · f_{j-i}(z)`. They are returned divided by
/// `(2π i)^j`.
#[derive(Debug, Clone)]
pub struct FrobeniusBasis {
    order: usize,
    scale: f64,
    /// `jet_coeffs[r][k]` is the ε-series of `b_k(ε) (k + ε)^r`.
    jet_coeffs: Vec<Vec<EpsSeries>>,
}

impl FrobeniusBasis {
    pub fn new(op: &PFOperator, truncation: usize) -> Result<Self> {
        let n = op.order();
        let fc = op.float_coefficients();
        // per-shift polynomials I_d(s) in s, as float coefficient lists
        let dmax = max_shift(op);
        let shift_polys: Vec<Vec<f64>> = (0..=dmax)
            .map(|d| fc.iter().map(|p| p.get(d).copied().unwrap_or(0.0)).collect())
            .collect();
        let i0 = &shift_polys[0];
        if i0[..n].iter().any(|&c| c != 0.0) || i0[n] == 0.0 {
            return Err(HmlError::config(
                "pf_operator",
                "origin is not a point of maximal unipotent monodromy",
            ));
        }
        let scale = op.convergence_radius();
        let scale = if scale.is_finite() { scale } else { 1.0 };
        let mut b: Vec<EpsSeries> = vec![{
            let mut one = vec![0.0; n];
            one[0] = 1.0;
            one
        }];
        for k in 1..=truncation {
            let lead = poly_shift(i0, k as f64, n);
            if lead[0] == 0.0 {
                return Err(HmlError::IndicialObstruction { index: k });
            }
            let mut rhs = vec![0.0; n];
            for d in 1..=dmax.min(k) {
                let term = eps_mul(&poly_shift(&shift_polys[d], (k - d) as f64, n), &b[k - d]);
                let sd = scale.powi(d as i32);
                for (r, t) in rhs.iter_mut().zip(term) {
                    *r -= sd * t;
                }
            }
            b.push(eps_mul(&rhs, &eps_inv(&lead)));
        }
        let mut jet_coeffs = Vec::with_capacity(n);
        for r in 0..n {
            let row = b
                .iter()
                .enumerate()
                .map(|(k, bk)| {
                    // (k + ε)^r
                    let pw: EpsSeries = (0..n)
                        .map(|m| {
                            if m > r {
                                0.0
                            } else {
                                binomial(r, m) * (k as f64).powi((r - m) as i32)
                            }
                        })
                        .collect();
                    eps_mul(bk, &pw)
                })
                .collect();
            jet_coeffs.push(row);
        }
        Ok(FrobeniusBasis {
            order: n,
            scale,
            jet_coeffs,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Jet matrix: entry `(r, j)` is `θ^r ϖ_j(z) / (2πi)^j`, principal branch of `log z`.
    pub fn jets(&self, z: Complex64) -> DMatrix<Complex64> {
        let n = self.order;
        let w = z / self.scale;
        let log_z = z.ln();
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let mut out = DMatrix::zeros(n, n);
        for r in 0..n {
            // S_r[l] = Σ_k [ε^l](b_k (k+ε)^r) w^k
            let mut s = vec![Complex64::new(0.0, 0.0); n];
            for coeffs in self.jet_coeffs[r].iter().rev() {
                for l in 0..n {
                    s[l] = s[l] * w + coeffs[l];
                }
            }
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut lp = Complex64::new(1.0, 0.0);
                let mut fact = 1.0;
                for i in 0..=j {
                    if i > 0 {
                        lp *= log_z;
                        fact *= i as f64;
                    }
                    acc += lp / fact * s[j - i];
                }
                out[(r, j)] = acc / two_pi_i.powi(j as i32);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picard_fuchs::operator::SingularPoint;
    use num_bigint::BigInt;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn theta_operator_has_constant_solution() {
        let s = series_seed(&PFOperator::theta(), 10).unwrap();
        assert_eq!(s.coefficients[0], r(1));
        assert!(s.coefficients[1..].iter().all(Zero::is_zero));
    }

    #[test]
    fn obstruction_names_index() {
        // θ(θ - 2) - z: indicial roots 0 and 2, recursion breaks at k = 2
        let op = PFOperator::new(
            vec![vec![r(0), r(-1)], vec![r(-2)], vec![r(1)]],
            vec![SingularPoint::Finite(Complex64::new(0.0, 0.0)), SingularPoint::Infinity],
        )
        .unwrap();
        assert_eq!(
            series_seed(&op, 5).unwrap_err(),
            HmlError::IndicialObstruction { index: 2 }
        );
    }

    #[test]
    fn eps_inverse_round_trip() {
        let a = vec![2.0, 1.0, -3.0, 0.5];
        let p = eps_mul(&a, &eps_inv(&a));
        assert!((p[0] - 1.0).abs() < 1e-15);
        assert!(p[1..].iter().all(|x| x.abs() < 1e-14));
    }
}
