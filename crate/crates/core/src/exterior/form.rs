use std::collections::BTreeMap;

use super::exact::{cone, czero, is_zero, ExactComplex};
use crate::error::{HmlError, Result};

/// Index set of a monomial, stored as a bitmask (bit `i` set means index `i+1`).
pub type IndexMask = u32;

/// Constant-coefficient form of pure bidegree `(p, q)` on `C^n`.
///
/// Coefficients are stored against `dz_I ∧ dz̄_J` with `I` and `J` increasing.
/// All signs in this module follow from that single ordering: holomorphic
/// generators `dz_1 < ... < dz_n` precede antiholomorphic ones
/// `dz̄_1 < ... < dz̄_n`. A bidegree with `p > n` or `q > n` names the zero space.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantForm {
    n: usize,
    p: usize,
    q: usize,
    coeffs: BTreeMap<(IndexMask, IndexMask), ExactComplex>,
}

fn mask_from(indices: &[usize], n: usize) -> Result<IndexMask> {
    let mut mask = 0u32;
    for w in indices.windows(2) {
        if w[0] >= w[1] {
            return Err(HmlError::Dimension(format!(
                "index tuple {indices:?} is not strictly increasing"
            )));
        }
    }
    for &i in indices {
        if i == 0 || i > n {
            return Err(HmlError::Dimension(format!("index {i} outside 1..={n}")));
        }
        mask |= 1 << (i - 1);
    }
    Ok(mask)
}

pub fn mask_indices(mask: IndexMask) -> Vec<usize> {
    (0..32).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect()
}

/// All masks of size `k` in `{1..n}`, in increasing numeric order.
pub fn subsets(n: usize, k: usize) -> Vec<IndexMask> {
    (0u32..(1u32 << n)).filter(|m| m.count_ones() as usize == k).collect()
}

/// Sign of `dz_{a} ∧ dz̄_{b} ∧ dz_{c} ∧ dz̄_{d}` reordered to `dz_{a∪c} ∧ dz̄_{b∪d}`,
/// or `None` when an index repeats.
fn wedge_sign(n: usize, lhs: (IndexMask, IndexMask), rhs: (IndexMask, IndexMask)) -> Option<bool> {
    let (i1, j1) = lhs;
    let (i2, j2) = rhs;
    if i1 & i2 != 0 || j1 & j2 != 0 {
        return None;
    }
    // Combined generator masks, holomorphic first.
    let a = i1 as u64 | ((j1 as u64) << n);
    let b = i2 as u64 | ((j2 as u64) << n);
    let mut inversions = 0u32;
    let mut bits = b;
    while bits != 0 {
        let y = bits.trailing_zeros();
        bits &= bits - 1;
        inversions += (a >> (y + 1)).count_ones();
    }
    Some(inversions % 2 == 1)
}

impl ConstantForm {
    pub fn zero(n: usize, p: usize, q: usize) -> Self {
        ConstantForm {
            n,
            p,
            q,
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant function 1.
    pub fn one(n: usize) -> Self {
        let mut f = Self::zero(n, 0, 0);
        f.coeffs.insert((0, 0), cone());
        f
    }

    /// `c · dz_I ∧ dz̄_J` with 1-based increasing index tuples.
    pub fn monomial(n: usize, holo: &[usize], anti: &[usize], c: ExactComplex) -> Result<Self> {
        let i = mask_from(holo, n)?;
        let j = mask_from(anti, n)?;
        let mut f = Self::zero(n, holo.len(), anti.len());
        f.set_mask(i, j, c);
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn degree(&self) -> usize {
        self.p + self.q
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff_mask(&self, i: IndexMask, j: IndexMask) -> ExactComplex {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_else(czero)
    }

    pub fn coeff(&self, holo: &[usize], anti: &[usize]) -> Result<ExactComplex> {
        Ok(self.coeff_mask(mask_from(holo, self.n)?, mask_from(anti, self.n)?))
    }

    pub fn set_mask(&mut self, i: IndexMask, j: IndexMask, c: ExactComplex) {
        debug_assert_eq!(i.count_ones() as usize, self.p);
        debug_assert_eq!(j.count_ones() as usize, self.q);
        if is_zero(&c) {
            self.coeffs.remove(&(i, j));
        } else {
            self.coeffs.insert((i, j), c);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(IndexMask, IndexMask), &ExactComplex)> {
        self.coeffs.iter()
    }

    /// Monomial basis of the bidegree `(p, q)` space, in a fixed order.
    pub fn basis(n: usize, p: usize, q: usize) -> Vec<(IndexMask, IndexMask)> {
        if p > n || q > n {
            return Vec::new();
        }
        let mut out = Vec::new();
        for i in subsets(n, p) {
            for j in subsets(n, q) {
                out.push((i, j));
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.bidegree() != other.bidegree() || self.n != other.n {
            return Err(HmlError::DegreeMismatch(self.degree(), other.degree()));
        }
        let mut out = self.clone();
        for (&(i, j), c) in &other.coeffs {
            let s = out.coeff_mask(i, j) + c.clone();
            out.set_mask(i, j, s);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-cone()))
    }

    pub fn scale(&self, c: &ExactComplex) -> Self {
        let mut out = Self::zero(self.n, self.p, self.q);
        for (&(i, j), v) in &self.coeffs {
            out.set_mask(i, j, v.clone() * c.clone());
        }
        out
    }

    /// Graded-commutative exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(HmlError::Dimension(format!("forms on C^{} and C^{}", self.n, other.n)));
        }
        let n = self.n;
        let degree = self.degree() + other.degree();
        if degree > 2 * n {
            return Err(HmlError::DegreeOverflow { degree, n });
        }
        let mut out = Self::zero(n, self.p + other.p, self.q + other.q);
        for (&lhs, a) in &self.coeffs {
            for (&rhs, b) in &other.coeffs {
                if let Some(negative) = wedge_sign(n, lhs, rhs) {
                    let key = (lhs.0 | rhs.0, lhs.1 | rhs.1);
                    let term = a.clone() * b.clone();
                    let acc = out.coeff_mask(key.0, key.1);
                    let acc = if negative { acc - term } else { acc + term };
                    out.set_mask(key.0, key.1, acc);
                }
            }
        }
        Ok(out)
    }

    /// Complex conjugate: `conj(c dz_I ∧ dz̄_J) = (-1)^{pq} c̄ dz_J ∧ dz̄_I`.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.n, self.q, self.p);
        let flip = (self.p * self.q) % 2 == 1;
        for (&(i, j), c) in &self.coeffs {
            let v = if flip { -c.conj() } else { c.conj() };
            out.set_mask(j, i, v);
        }
        out
    }

    /// Coefficient vector against [`ConstantForm::basis`].
    pub fn to_vector(&self) -> Vec<ExactComplex> {
        Self::basis(self.n, self.p, self.q)
            .into_iter()
            .map(|(i, j)| self.coeff_mask(i, j))
            .collect()
    }

    pub fn from_vector(n: usize, p: usize, q: usize, v: &[ExactComplex]) -> Self {
        let mut out = Self::zero(n, p, q);
        for ((i, j), c) in Self::basis(n, p, q).into_iter().zip(v) {
            out.set_mask(i, j, c.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::exact::cint;
    use super::*;

    #[test]
    fn wedge_with_unit_is_identity() {
        let w = ConstantForm::monomial(2, &[1], &[2], cint(3, 1)).unwrap();
        assert_eq!(ConstantForm::one(2).wedge(&w).unwrap(), w);
    }

    #[test]
    fn disjoint_monomials_sign() {
        // dz1∧dz̄1 ∧ dz2∧dz̄2 = -dz1∧dz2∧dz̄1∧dz̄2 (one transposition of dz̄1, dz2)
        let a = ConstantForm::monomial(2, &[1], &[1], cint(1, 0)).unwrap();
        let b = ConstantForm::monomial(2, &[2], &[2], cint(1, 0)).unwrap();
        let w = a.wedge(&b).unwrap();
        assert_eq!(w.coeff(&[1, 2], &[1, 2]).unwrap(), cint(-1, 0));
    }

    #[test]
    fn odd_forms_anticommute() {
        let a = ConstantForm::monomial(3, &[1], &[], cint(1, 0)).unwrap();
        let b = ConstantForm::monomial(3, &[], &[2], cint(0, 1)).unwrap();
        assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap().scale(&cint(-1, 0)));
    }

    #[test]
    fn overflow_is_reported() {
        let a = ConstantForm::monomial(1, &[1], &[1], cint(1, 0)).unwrap();
        let b = ConstantForm::monomial(1, &[1], &[], cint(1, 0)).unwrap();
        let err = a.wedge(&b).unwrap_err();
        assert!(err.to_string().contains("degree exceeds 2n"));
    }

    #[test]
    fn conj_is_involution() {
        let a = ConstantForm::monomial(3, &[1, 3], &[2], cint(2, -5)).unwrap();
        assert_eq!(a.conj().conj(), a);
        assert_eq!(a.conj().bidegree(), (1, 2));
    }

    #[test]
    fn non_increasing_indices_rejected() {
        assert!(ConstantForm::monomial(3, &[2, 1], &[], cint(1, 0)).is_err());
    }
}
