//! Sign table for the Hodge–Riemann form.
//!
//! On a degree-`k` piece of type `(p, q)` the positive-definite Hermitian
//! form is `ε_k · i^{q-p} · Q(u, v̄)` with `ε_k = (-1)^{k(k+1)/2}` and `Q`
//! the cohomological pairing `∫ u ∧ v ∧ ω^{n-k}`. Every Gram matrix in the
//! crate goes through this table; positivity of each `g_p` validates it.

use num_complex::Complex64;

/// `(ε_k, q - p)` for a type `(p, k - p)` piece.
pub fn hodge_sign_parts(k: usize, p: usize) -> (i64, i64) {
    let eps = if (k * (k + 1) / 2).is_multiple_of(2) { 1 } else { -1 };
    (eps, k as i64 - 2 * p as i64)
}

/// `ε_k i^{q-p}` as a floating complex number.
pub fn hodge_sign(k: usize, p: usize) -> Complex64 {
    let (eps, e) = hodge_sign_parts(k, p);
    let unit = match e.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    unit * eps as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_one_top_piece_is_plus_i() {
        // k = 1, p = 1: ε = -1, i^{-1} = -i  →  +i
        assert_eq!(hodge_sign(1, 1), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn weight_three_top_piece_is_plus_i() {
        // k = 3, p = 3: ε = +1, i^{-3} = i
        assert_eq!(hodge_sign(3, 3), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn adjacent_pieces_alternate() {
        for k in 0..6 {
            for p in 1..=k {
                assert_eq!(hodge_sign(k, p), -hodge_sign(k, p - 1));
            }
        }
    }
}
