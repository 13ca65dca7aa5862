use num_rational::BigRational;
use num_traits::{One, Zero};

use super::exact::{
    self, cint, cone, cq, czero, det, factorial, i_pow, inverse, is_zero, rat, ExactComplex, ExactMatrix, SolveOutcome,
};
use super::form::{mask_indices, ConstantForm, IndexMask};
use crate::convention;
use crate::error::{HmlError, Result};

/// Flat polarized Kähler torus `C^n / Λ` with constant Kähler form
/// `ω = (i/2) Σ h_{jk} dz_j ∧ dz̄_k`.
#[derive(Debug, Clone)]
pub struct KahlerModel {
    n: usize,
    hermitian: ExactMatrix,
    kahler_form: ConstantForm,
    /// `∫ ω_std^n / n!` for the standard form `h = I`.
    volume_normalization: BigRational,
}

/// Components `φ_0, ..., φ_r` with `φ_k` primitive of bidegree `(p-k, q-k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveDecomposition {
    pub components: Vec<ConstantForm>,
}

impl KahlerModel {
    pub fn standard(n: usize) -> Self {
        let h = (0..n)
            .map(|i| (0..n).map(|j| if i == j { cone() } else { czero() }).collect())
            .collect();
        Self::from_hermitian(h).expect("identity is positive definite")
    }

    /// Builds the model from a Hermitian matrix `h`; checks positivity with
    /// exact leading principal minors.
    pub fn from_hermitian(h: ExactMatrix) -> Result<Self> {
        let n = h.len();
        if n == 0 || n > 8 || h.iter().any(|row| row.len() != n) {
            return Err(HmlError::Dimension(
                "hermitian matrix must be n×n with 1 ≤ n ≤ 8".to_string(),
            ));
        }
        for i in 0..n {
            for j in 0..n {
                if h[i][j] != h[j][i].conj() {
                    return Err(HmlError::NotPolarized(format!("h[{i}][{j}] is not Hermitian")));
                }
            }
        }
        for k in 1..=n {
            let minor: ExactMatrix = h[..k].iter().map(|r| r[..k].to_vec()).collect();
            let d = det(&minor);
            if !exact::is_positive_real(&d) {
                return Err(HmlError::NotPolarized(format!(
                    "leading principal minor {k} is not positive"
                )));
            }
        }
        let half_i = cq(BigRational::zero(), rat(1, 2));
        let mut omega = ConstantForm::zero(n, 1, 1);
        for j in 0..n {
            for k in 0..n {
                omega.set_mask(1 << j, 1 << k, half_i.clone() * h[j][k].clone());
            }
        }
        Ok(KahlerModel {
            n,
            hermitian: h,
            kahler_form: omega,
            volume_normalization: BigRational::one(),
        })
    }

    /// Builds the model from a (1,1)-form `ω = Σ c_{jk} dz_j ∧ dz̄_k`, i.e. `h = -2i c`.
    pub fn from_kahler_form(omega: &ConstantForm) -> Result<Self> {
        if omega.bidegree() != (1, 1) {
            return Err(HmlError::NotPolarized("Kähler form must have bidegree (1,1)".into()));
        }
        let n = omega.n();
        let minus_two_i = cint(0, -2);
        let h = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| omega.coeff_mask(1 << j, 1 << k) * minus_two_i.clone())
                    .collect()
            })
            .collect();
        Self::from_hermitian(h)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kahler_form(&self) -> &ConstantForm {
        &self.kahler_form
    }

    pub fn hermitian(&self) -> &ExactMatrix {
        &self.hermitian
    }

    pub fn volume_normalization(&self) -> &BigRational {
        &self.volume_normalization
    }

    /// `∫ dz_1 ∧ ... ∧ dz_n ∧ dz̄_1 ∧ ... ∧ dz̄_n` under the normalization
    /// `∫ ω_std^n / n! = volume_normalization`.
    fn top_monomial_integral(&self) -> ExactComplex {
        // ω_std^n / n! = (i/2)^n (-1)^{n(n-1)/2} dz_{1..n} ∧ dz̄_{1..n}
        let n = self.n as i64;
        let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
        let mut factor = cint(sign, 0);
        for _ in 0..n {
            factor *= cq(BigRational::zero(), rat(1, 2));
        }
        cq(self.volume_normalization.clone(), BigRational::zero()) / factor
    }

    /// Integral over the torus; zero unless the form has bidegree `(n, n)`.
    pub fn integrate(&self, form: &ConstantForm) -> ExactComplex {
        if form.bidegree() != (self.n, self.n) {
            return czero();
        }
        let full: IndexMask = (1 << self.n) - 1;
        form.coeff_mask(full, full) * self.top_monomial_integral()
    }

    /// `L(a) = a ∧ ω`.
    pub fn lefschetz_l(&self, a: &ConstantForm) -> Result<ConstantForm> {
        a.wedge(&self.kahler_form)
    }

    /// `L^k(a)`; powers that leave the top degree are reported as overflow.
    pub fn lefschetz_pow(&self, a: &ConstantForm, k: usize) -> Result<ConstantForm> {
        let mut out = a.clone();
        for _ in 0..k {
            out = self.lefschetz_l(&out)?;
        }
        Ok(out)
    }

    pub fn omega_pow(&self, k: usize) -> Result<ConstantForm> {
        self.lefschetz_pow(&ConstantForm::one(self.n), k)
    }

    /// `∫ ω^n / n!` for this model's ω.
    pub fn volume(&self) -> Result<ExactComplex> {
        let top = self.omega_pow(self.n)?;
        let nf = factorial(self.n);
        Ok(self.integrate(&top) / cq(nf, BigRational::zero()))
    }

    /// Primitivity test: `L^{n-k+1} a = 0` (automatic when that power leaves the top degree).
    pub fn is_primitive(&self, a: &ConstantForm) -> Result<bool> {
        let k = a.degree();
        if k > self.n {
            return Ok(a.is_zero());
        }
        let power = self.n - k + 1;
        if k + 2 * power > 2 * self.n {
            return Ok(true);
        }
        Ok(self.lefschetz_pow(a, power)?.is_zero())
    }

    /// Exact Lefschetz decomposition `a = Σ_k L^k φ_k` for `p + q ≤ n`,
    /// solved as one linear system over the coefficients of all `φ_k`
    /// together with their primitivity constraints.
    pub fn lefschetz_decompose(&self, a: &ConstantForm) -> Result<PrimitiveDecomposition> {
        let n = self.n;
        let (p, q) = a.bidegree();
        if p + q > n || a.n() != n {
            return Err(HmlError::BidegreeOutOfRange { p, q, n });
        }
        let r = p.min(q);
        let target_basis = ConstantForm::basis(n, p, q);
        let target_index = |key: &(IndexMask, IndexMask)| target_basis.iter().position(|b| b == key);

        // Column blocks: one per φ_k.
        let blocks: Vec<Vec<(IndexMask, IndexMask)>> = (0..=r).map(|k| ConstantForm::basis(n, p - k, q - k)).collect();
        let unknowns: usize = blocks.iter().map(Vec::len).sum();

        let mut rows: ExactMatrix = vec![vec![czero(); unknowns]; target_basis.len()];
        let mut rhs: Vec<ExactComplex> = a.to_vector();

        let mut offset = 0;
        for (k, block) in blocks.iter().enumerate() {
            let deg = p + q - 2 * k;
            let prim_power = n - deg + 1;
            let prim_applies = deg + 2 * prim_power <= 2 * n;
            let prim_basis = if prim_applies {
                ConstantForm::basis(n, p - k + prim_power, q - k + prim_power)
            } else {
                Vec::new()
            };
            let mut prim_rows: ExactMatrix = vec![vec![czero(); unknowns]; prim_basis.len()];
            for (col, &(i, j)) in block.iter().enumerate() {
                let mut mono = ConstantForm::zero(n, p - k, q - k);
                mono.set_mask(i, j, cone());
                let lifted = self.lefschetz_pow(&mono, k)?;
                for (key, c) in lifted.terms() {
                    let row = target_index(key).expect("L^k lands in the target bidegree");
                    rows[row][offset + col] = c.clone();
                }
                if prim_applies {
                    let killed = self.lefschetz_pow(&mono, prim_power)?;
                    for (key, c) in killed.terms() {
                        let row = prim_basis.iter().position(|b| b == key).unwrap();
                        prim_rows[row][offset + col] = c.clone();
                    }
                }
            }
            rhs.extend(std::iter::repeat_with(czero).take(prim_rows.len()));
            rows.extend(prim_rows);
            offset += block.len();
        }

        match exact::solve(&rows, &rhs, unknowns) {
            SolveOutcome::Unique(x) => {
                let mut components = Vec::with_capacity(r + 1);
                let mut offset = 0;
                for (k, block) in blocks.iter().enumerate() {
                    let v = &x[offset..offset + block.len()];
                    components.push(ConstantForm::from_vector(n, p - k, q - k, v));
                    offset += block.len();
                }
                Ok(PrimitiveDecomposition { components })
            }
            SolveOutcome::Inconsistent => Err(HmlError::NotPolarized("Lefschetz system is inconsistent".into())),
            SolveOutcome::Underdetermined { rank } => Err(HmlError::NotPolarized(format!(
                "Lefschetz system is singular (rank {rank} < {unknowns})"
            ))),
        }
    }

    /// Reassembles `Σ L^k φ_k`.
    pub fn reconstruct(&self, d: &PrimitiveDecomposition) -> Result<ConstantForm> {
        let mut iter = d.components.iter().enumerate();
        let (_, first) = iter
            .next()
            .ok_or_else(|| HmlError::Dimension("empty decomposition".into()))?;
        let mut acc = first.clone();
        for (k, phi) in iter {
            acc = acc.add(&self.lefschetz_pow(phi, k)?)?;
        }
        Ok(acc)
    }

    /// `Q(a, b) = ∫ a ∧ b ∧ ω^{n-k}` for `a`, `b` of total degree `k ≤ n`.
    pub fn polarization_q(&self, a: &ConstantForm, b: &ConstantForm) -> Result<ExactComplex> {
        let k = a.degree();
        if b.degree() != k {
            return Err(HmlError::DegreeMismatch(k, b.degree()));
        }
        if k > self.n {
            return Err(HmlError::DegreeOverflow {
                degree: 2 * k,
                n: self.n,
            });
        }
        let top = a.wedge(b)?.wedge(&self.omega_pow(self.n - k)?)?;
        Ok(self.integrate(&top))
    }

    /// Hodge inner product on primitive `(p, q)` forms:
    /// `ε_k i^{q-p} Q(a, b̄)`, sesquilinear, with the sign `ε_k` from
    /// [`convention::hodge_sign`].
    pub fn hodge_inner(&self, a: &ConstantForm, b: &ConstantForm) -> Result<ExactComplex> {
        if a.bidegree() != b.bidegree() {
            return Err(HmlError::DegreeMismatch(a.degree(), b.degree()));
        }
        if !self.is_primitive(a)? || !self.is_primitive(b)? {
            return Err(HmlError::NotPrimitive);
        }
        let (p, q) = a.bidegree();
        let (sign, ipow) = convention::hodge_sign_parts(p + q, p);
        let raw = self.polarization_q(a, &b.conj())?;
        Ok(raw * i_pow(ipow) * cint(sign, 0))
    }

    /// Pointwise inner product of constant forms in the flat metric whose
    /// Kähler form is ω (Euclidean for `h = I`, so `|dz_j|^2 = 2`).
    pub fn pointwise_inner(&self, a: &ConstantForm, b: &ConstantForm) -> Result<ExactComplex> {
        if a.bidegree() != b.bidegree() {
            return Ok(czero());
        }
        let hinv = inverse(&self.hermitian).ok_or_else(|| HmlError::NotPolarized("h is singular".into()))?;
        // ⟨dz_i, dz_k⟩ = 2 (h^{-1})_{ki};  ⟨dz̄_j, dz̄_l⟩ = 2 (h^{-1})_{jl}
        let two = cint(2, 0);
        let holo = |i: usize, k: usize| two.clone() * hinv[k][i].clone();
        let anti = |j: usize, l: usize| two.clone() * hinv[j][l].clone();
        let gram = |x: &[usize], y: &[usize], f: &dyn Fn(usize, usize) -> ExactComplex| {
            let m: ExactMatrix = x
                .iter()
                .map(|&xi| y.iter().map(|&yi| f(xi - 1, yi - 1)).collect())
                .collect();
            det(&m)
        };
        let mut total = czero();
        for (&(i1, j1), ca) in a.terms() {
            let (ii, jj) = (mask_indices(i1), mask_indices(j1));
            for (&(i2, j2), cb) in b.terms() {
                let (kk, ll) = (mask_indices(i2), mask_indices(j2));
                let g = gram(&ii, &kk, &holo) * gram(&jj, &ll, &anti);
                if !is_zero(&g) {
                    total += ca.clone() * cb.conj() * g;
                }
            }
        }
        Ok(total)
    }

    /// `∫ ||φ||^2 dV` with `dV = ω^n / n!`.
    pub fn l2_norm_sq(&self, phi: &ConstantForm) -> Result<ExactComplex> {
        Ok(self.pointwise_inner(phi, phi)? * self.volume()?)
    }

    /// LHS − RHS of the primitive-norm identity
    /// `i^{q-p} Q(φ, φ̄) = (-1)^{k(k+1)/2} Σ_j (-1)^j (n-k+2j)! ∫ ||φ_j||^2 dV`,
    /// `k = p + q`, where `φ = Σ L^j φ_j`. Exact; zero when the identity holds.
    pub fn norm_identity_residual(&self, phi: &ConstantForm) -> Result<ExactComplex> {
        let n = self.n;
        let (p, q) = phi.bidegree();
        let k = p + q;
        if k > n || phi.n() != n {
            return Err(HmlError::BidegreeOutOfRange { p, q, n });
        }
        let lhs = self.polarization_q(phi, &phi.conj())? * i_pow(q as i64 - p as i64);
        let decomposition = self.lefschetz_decompose(phi)?;
        let mut sum = czero();
        for (j, comp) in decomposition.components.iter().enumerate() {
            let weight = factorial(n - k + 2 * j);
            let mut term = self.l2_norm_sq(comp)? * cq(weight, BigRational::zero());
            if j % 2 == 1 {
                term = -term;
            }
            sum += term;
        }
        let outer = if (k * (k + 1) / 2) % 2 == 0 { 1 } else { -1 };
        Ok(lhs - sum * cint(outer, 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(n: usize, i: &[usize], j: &[usize], re: i64, im: i64) -> ConstantForm {
        ConstantForm::monomial(n, i, j, cint(re, im)).unwrap()
    }

    #[test]
    fn l_of_one_is_omega_and_top_power_nonzero() {
        let m = KahlerModel::standard(3);
        let one = ConstantForm::one(3);
        assert_eq!(m.lefschetz_l(&one).unwrap(), *m.kahler_form());
        assert!(!m.omega_pow(3).unwrap().is_zero());
        assert_eq!(m.volume().unwrap(), cint(1, 0));
    }

    #[test]
    fn decompose_omega_on_surface() {
        let m = KahlerModel::standard(2);
        let d = m.lefschetz_decompose(m.kahler_form()).unwrap();
        assert!(d.components[0].is_zero());
        assert_eq!(d.components[1], ConstantForm::one(2));
    }

    #[test]
    fn primitive_form_decomposes_to_itself() {
        let m = KahlerModel::standard(2);
        let a = mono(2, &[1], &[2], 3, -1);
        let d = m.lefschetz_decompose(&a).unwrap();
        assert_eq!(d.components[0], a);
        assert!(d.components[1].is_zero());
    }

    #[test]
    fn q_of_odd_form_with_itself_vanishes() {
        let m = KahlerModel::standard(3);
        let a = mono(3, &[1, 2], &[3], 2, 1)
            .add(&mono(3, &[2, 3], &[1], -1, 4))
            .unwrap();
        assert!(is_zero(&m.polarization_q(&a, &a).unwrap()));
    }

    #[test]
    fn hodge_inner_rejects_non_primitive() {
        let m = KahlerModel::standard(2);
        let err = m.hodge_inner(m.kahler_form(), m.kahler_form()).unwrap_err();
        assert_eq!(err, HmlError::NotPrimitive);
    }

    #[test]
    fn degenerate_hermitian_rejected() {
        let h = vec![vec![cint(1, 0), cint(1, 0)], vec![cint(1, 0), cint(1, 0)]];
        assert!(matches!(KahlerModel::from_hermitian(h), Err(HmlError::NotPolarized(_))));
    }

    #[test]
    fn non_standard_model_volume_is_det() {
        // h = [[2, i], [-i, 1]], det = 1
        let h = vec![vec![cint(2, 0), cint(0, 1)], vec![cint(0, -1), cint(1, 0)]];
        let m = KahlerModel::from_hermitian(h).unwrap();
        assert_eq!(m.volume().unwrap(), cint(1, 0));
        let back = KahlerModel::from_kahler_form(m.kahler_form()).unwrap();
        assert_eq!(back.hermitian(), m.hermitian());
    }

    #[test]
    fn norm_identity_zero_on_omega() {
        let m = KahlerModel::standard(2);
        assert!(is_zero(&m.norm_identity_residual(m.kahler_form()).unwrap()));
        assert!(is_zero(
            &m.norm_identity_residual(&ConstantForm::zero(2, 1, 1)).unwrap()
        ));
    }
}
