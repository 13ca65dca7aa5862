//! Exact complex-rational scalars and the small dense linear algebra the
//! exterior model needs (determinants, solves, rank).

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Gaussian rational `a + b i` with arbitrary precision parts.
pub type ExactComplex = Complex<BigRational>;

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn cq(re: BigRational, im: BigRational) -> ExactComplex {
    Complex::new(re, im)
}

pub fn cint(re: i64, im: i64) -> ExactComplex {
    Complex::new(rat(re, 1), rat(im, 1))
}

pub fn czero() -> ExactComplex {
    Complex::new(BigRational::zero(), BigRational::zero())
}

pub fn cone() -> ExactComplex {
    Complex::new(BigRational::one(), BigRational::zero())
}

/// `i^e` for any integer exponent.
pub fn i_pow(e: i64) -> ExactComplex {
    match e.rem_euclid(4) {
        0 => cint(1, 0),
        1 => cint(0, 1),
        2 => cint(-1, 0),
        _ => cint(0, -1),
    }
}

pub fn is_zero(z: &ExactComplex) -> bool {
    z.re.is_zero() && z.im.is_zero()
}

/// Positive real check on an exact value: imaginary part zero, real part > 0.
pub fn is_positive_real(z: &ExactComplex) -> bool {
    z.im.is_zero() && z.re.is_positive()
}

pub fn factorial(k: usize) -> BigRational {
    let mut acc = BigInt::one();
    for j in 2..=k {
        acc *= BigInt::from(j);
    }
    BigRational::from_integer(acc)
}

pub type ExactMatrix = Vec<Vec<ExactComplex>>;

/// Determinant by Gaussian elimination over `Q(i)`.
pub fn det(m: &ExactMatrix) -> ExactComplex {
    let n = m.len();
    if n == 0 {
        return cone();
    }
    let mut a = m.clone();
    let mut result = cone();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !is_zero(&a[r][col])) else {
            return czero();
        };
        if pivot != col {
            a.swap(pivot, col);
            result = -result;
        }
        let p = a[col][col].clone();
        result *= p.clone();
        for r in col + 1..n {
            if is_zero(&a[r][col]) {
                continue;
            }
            let factor = a[r][col].clone() / p.clone();
            for c in col..n {
                let sub = factor.clone() * a[col][c].clone();
                a[r][c] -= sub;
            }
        }
    }
    result
}

/// Outcome of an exact linear solve of a (possibly over-determined) system.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Unique(Vec<ExactComplex>),
    Inconsistent,
    Underdetermined { rank: usize },
}

/// Solves `A x = b` exactly. `A` has `rows` equations and `cols` unknowns.
pub fn solve(a: &ExactMatrix, b: &[ExactComplex], cols: usize) -> SolveOutcome {
    let rows = a.len();
    let mut aug: ExactMatrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !is_zero(&aug[i][c])) else {
            continue;
        };
        aug.swap(p, r);
        let inv = cone() / aug[r][c].clone();
        for k in c..=cols {
            aug[r][k] = aug[r][k].clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !is_zero(&aug[i][c]) {
                let f = aug[i][c].clone();
                for k in c..=cols {
                    let sub = f.clone() * aug[r][k].clone();
                    aug[i][k] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if aug[r..].iter().any(|row| !is_zero(&row[cols])) {
        return SolveOutcome::Inconsistent;
    }
    if pivots.len() < cols {
        return SolveOutcome::Underdetermined { rank: pivots.len() };
    }
    let mut x = vec![czero(); cols];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = aug[row][cols].clone();
    }
    SolveOutcome::Unique(x)
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(m: &ExactMatrix) -> Option<ExactMatrix> {
    let n = m.len();
    let mut cols = vec![vec![czero(); n]; n];
    for j in 0..n {
        let mut e = vec![czero(); n];
        e[j] = cone();
        match solve(m, &e, n) {
            SolveOutcome::Unique(x) => {
                for i in 0..n {
                    cols[i][j] = x[i].clone();
                }
            }
            _ => return None,
        }
    }
    Some(cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_of_gaussian_matrix() {
        // [[1, i], [-i, 2]] has det 2 - (i)(-i) = 2 - 1 = 1
        let m = vec![vec![cint(1, 0), cint(0, 1)], vec![cint(0, -1), cint(2, 0)]];
        assert_eq!(det(&m), cint(1, 0));
    }

    #[test]
    fn solve_detects_rank_deficiency() {
        let m = vec![vec![cint(1, 0), cint(2, 0)], vec![cint(2, 0), cint(4, 0)]];
        assert_eq!(
            solve(&m, &[cint(1, 0), cint(2, 0)], 2),
            SolveOutcome::Underdetermined { rank: 1 }
        );
        assert_eq!(solve(&m, &[cint(1, 0), cint(3, 0)], 2), SolveOutcome::Inconsistent);
    }

    #[test]
    fn inverse_round_trip() {
        let m = vec![vec![cint(2, 1), cint(0, 1)], vec![cint(1, 0), cint(3, -2)]];
        let inv = inverse(&m).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = czero();
                for k in 0..2 {
                    s += m[i][k].clone() * inv[k][j].clone();
                }
                assert_eq!(s, if i == j { cone() } else { czero() });
            }
        }
    }

    #[test]
    fn i_pow_cycles() {
        assert_eq!(i_pow(-1), cint(0, -1));
        assert_eq!(i_pow(6), cint(-1, 0));
    }
}
