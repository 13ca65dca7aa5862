//! Closed-form families used as oracles and test beds.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::FamilyModel;
use crate::convention::hodge_sign;
use crate::error::{HmlError, Result};
use crate::linalg::{cz, CMatrix};

fn require_upper(t: Complex64, what: &str) -> Result<()> {
    if t.im > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(HmlError::OutsideChart(format!("{what} needs Im t > 0, got {t}")))
    }
}

fn symplectic(n: usize) -> CMatrix {
    let mut q = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        q[(i, n + i)] = cz(1.0, 0.0);
        q[(n + i, i)] = cz(-1.0, 0.0);
    }
    q
}

/// Weight-1 family `Ω(t) = (1, t)` over the upper half plane.
#[derive(Debug, Clone)]
pub struct UpperHalfPlane {
    q: CMatrix,
}

impl Default for UpperHalfPlane {
    fn default() -> Self {
        UpperHalfPlane { q: symplectic(1) }
    }
}

impl FamilyModel for UpperHalfPlane {
    fn name(&self) -> &str {
        "upper-half-plane"
    }
    fn weight(&self) -> usize {
        1
    }
    fn moduli_dim(&self) -> usize {
        1
    }
    fn hodge_numbers(&self) -> Vec<usize> {
        vec![1, 1]
    }
    fn polarization(&self) -> &CMatrix {
        &self.q
    }
    fn raw_frame(&self, t: &[Complex64]) -> Result<CMatrix> {
        require_upper(t[0], self.name())?;
        Ok(CMatrix::from_row_slice(
            2,
            2,
            &[cz(1.0, 0.0), t[0], cz(0.0, 0.0), cz(1.0, 0.0)],
        ))
    }
    fn raw_frame_derivatives(&self, t: &[Complex64]) -> Result<Option<Vec<CMatrix>>> {
        require_upper(t[0], self.name())?;
        let mut d = CMatrix::zeros(2, 2);
        d[(0, 1)] = cz(1.0, 0.0);
        Ok(Some(vec![d]))
    }
    fn local_scale(&self, t: &[Complex64]) -> f64 {
        t[0].im
    }
}

/// Weight-2 symmetric square of [`UpperHalfPlane`]: `Ω(t) = (1, t, t²)`.
///
/// The pairing is the negative of the induced symmetric form so that the
/// top Gram matrix `Q(Ω, Ω̄) = 4 (Im t)²` is positive.
#[derive(Debug, Clone)]
pub struct Sym2 {
    q: CMatrix,
}

impl Default for Sym2 {
    fn default() -> Self {
        let mut q = CMatrix::zeros(3, 3);
        q[(0, 2)] = cz(-1.0, 0.0);
        q[(2, 0)] = cz(-1.0, 0.0);
        q[(1, 1)] = cz(2.0, 0.0);
        Sym2 { q }
    }
}

impl FamilyModel for Sym2 {
    fn name(&self) -> &str {
        "sym2"
    }
    fn weight(&self) -> usize {
        2
    }
    fn moduli_dim(&self) -> usize {
        1
    }
    fn hodge_numbers(&self) -> Vec<usize> {
        vec![1, 1, 1]
    }
    fn polarization(&self) -> &CMatrix {
        &self.q
    }
    fn raw_frame(&self, t: &[Complex64]) -> Result<CMatrix> {
        require_upper(t[0], self.name())?;
        let t = t[0];
        let (o, z) = (cz(1.0, 0.0), cz(0.0, 0.0));
        Ok(CMatrix::from_row_slice(
            3,
            3,
            &[o, t, t * t, z, o, t * 2.0, z, z, cz(2.0, 0.0)],
        ))
    }
    fn raw_frame_derivatives(&self, t: &[Complex64]) -> Result<Option<Vec<CMatrix>>> {
        require_upper(t[0], self.name())?;
        let t = t[0];
        let (o, z) = (cz(1.0, 0.0), cz(0.0, 0.0));
        Ok(Some(vec![CMatrix::from_row_slice(
            3,
            3,
            &[z, o, t * 2.0, z, z, cz(2.0, 0.0), z, z, z],
        )]))
    }
    fn local_scale(&self, t: &[Complex64]) -> f64 {
        t[0].im
    }
}

/// Weight-1 family over `H × H` with period matrix `[[t1, c], [c, t2]]`, `c` real.
#[derive(Debug, Clone)]
pub struct TwoParamAbelian {
    q: CMatrix,
    coupling: f64,
}

impl TwoParamAbelian {
    pub fn new(coupling: f64) -> Self {
        TwoParamAbelian {
            q: symplectic(2),
            coupling,
        }
    }
}

impl Default for TwoParamAbelian {
    fn default() -> Self {
        TwoParamAbelian::new(0.3)
    }
}

impl FamilyModel for TwoParamAbelian {
    fn name(&self) -> &str {
        "two-param-abelian"
    }
    fn weight(&self) -> usize {
        1
    }
    fn moduli_dim(&self) -> usize {
        2
    }
    fn hodge_numbers(&self) -> Vec<usize> {
        vec![2, 2]
    }
    fn polarization(&self) -> &CMatrix {
        &self.q
    }
    fn raw_frame(&self, t: &[Complex64]) -> Result<CMatrix> {
        require_upper(t[0], self.name())?;
        require_upper(t[1], self.name())?;
        let (o, z, c) = (cz(1.0, 0.0), cz(0.0, 0.0), cz(self.coupling, 0.0));
        Ok(CMatrix::from_row_slice(
            4,
            4,
            &[o, z, t[0], c, z, o, c, t[1], z, z, o, z, z, z, z, o],
        ))
    }
    fn raw_frame_derivatives(&self, t: &[Complex64]) -> Result<Option<Vec<CMatrix>>> {
        require_upper(t[0], self.name())?;
        require_upper(t[1], self.name())?;
        let mut d1 = CMatrix::zeros(4, 4);
        d1[(0, 2)] = cz(1.0, 0.0);
        let mut d2 = CMatrix::zeros(4, 4);
        d2[(1, 3)] = cz(1.0, 0.0);
        Ok(Some(vec![d1, d2]))
    }
    fn local_scale(&self, t: &[Complex64]) -> f64 {
        t[0].im.min(t[1].im)
    }
}

/// Weight-2 tensor product of two copies of [`UpperHalfPlane`]:
/// `Ω = (1, t2, t1, t1 t2)` with pairing `−Q₁ ⊗ Q₁`.
#[derive(Debug, Clone)]
pub struct TwoParamProduct {
    q: CMatrix,
}

impl Default for TwoParamProduct {
    fn default() -> Self {
        let q1 = symplectic(1);
        TwoParamProduct { q: -q1.kronecker(&q1) }
    }
}

impl FamilyModel for TwoParamProduct {
    fn name(&self) -> &str {
        "two-param-product"
    }
    fn weight(&self) -> usize {
        2
    }
    fn moduli_dim(&self) -> usize {
        2
    }
    fn hodge_numbers(&self) -> Vec<usize> {
        vec![1, 2, 1]
    }
    fn polarization(&self) -> &CMatrix {
        &self.q
    }
    fn raw_frame(&self, t: &[Complex64]) -> Result<CMatrix> {
        require_upper(t[0], self.name())?;
        require_upper(t[1], self.name())?;
        let (o, z) = (cz(1.0, 0.0), cz(0.0, 0.0));
        let (t1, t2) = (t[0], t[1]);
        Ok(CMatrix::from_row_slice(
            4,
            4,
            &[o, t2, t1, t1 * t2, z, z, o, t2, z, o, z, t1, z, z, z, o],
        ))
    }
    fn raw_frame_derivatives(&self, t: &[Complex64]) -> Result<Option<Vec<CMatrix>>> {
        require_upper(t[0], self.name())?;
        require_upper(t[1], self.name())?;
        let (o, z) = (cz(1.0, 0.0), cz(0.0, 0.0));
        let (t1, t2) = (t[0], t[1]);
        let d1 = CMatrix::from_row_slice(4, 4, &[z, z, o, t2, z, z, z, z, z, z, z, o, z, z, z, z]);
        let d2 = CMatrix::from_row_slice(4, 4, &[z, o, z, t1, z, z, z, o, z, z, z, z, z, z, z, z]);
        Ok(Some(vec![d1, d2]))
    }
    fn local_scale(&self, t: &[Complex64]) -> f64 {
        t[0].im.min(t[1].im)
    }
}

/// Polarized Hodge structure that does not vary: a real flat basis in
/// which every Hodge piece is spanned by constant vectors.
#[derive(Debug, Clone)]
pub struct ConstantVhs {
    name: String,
    weight: usize,
    moduli_dim: usize,
    hodge: Vec<usize>,
    q: CMatrix,
    frame: CMatrix,
}

fn sign_of(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

impl ConstantVhs {
    /// `hodge[p] = h^{p,k−p}`; must satisfy `h^{p,q} = h^{q,p}`.
    pub fn new(name: &str, weight: usize, hodge: Vec<usize>, moduli_dim: usize) -> Result<Self> {
        let k = weight;
        if hodge.len() != k + 1 || (0..=k).any(|p| hodge[p] != hodge[k - p]) {
            return Err(HmlError::config(
                "hodge_numbers",
                format!("{hodge:?} is not a Hodge symmetric list for weight {k}"),
            ));
        }
        let n: usize = hodge.iter().sum();
        let mut q = CMatrix::zeros(n, n);
        // rows of each Hodge piece, filled per p
        let mut rows: Vec<Vec<Vec<Complex64>>> = vec![Vec::new(); k + 1];
        let mut next = 0;
        for p in (0..=k).rev() {
            let qd = k - p;
            if p < qd {
                continue;
            }
            let s_sign = hodge_sign(k, p);
            for _ in 0..hodge[p] {
                if p == qd {
                    let a = next;
                    next += 1;
                    q[(a, a)] = cz(sign_of(s_sign.re), 0.0);
                    let mut v = vec![cz(0.0, 0.0); n];
                    v[a] = cz(1.0, 0.0);
                    rows[p].push(v);
                } else {
                    let (a, b) = (next, next + 1);
                    next += 2;
                    if k % 2 == 1 {
                        let s = sign_of((s_sign * cz(0.0, -2.0)).re);
                        q[(a, b)] = cz(s, 0.0);
                        q[(b, a)] = cz(-s, 0.0);
                    } else {
                        let s = sign_of(s_sign.re);
                        q[(a, a)] = cz(s, 0.0);
                        q[(b, b)] = cz(s, 0.0);
                    }
                    let mut v = vec![cz(0.0, 0.0); n];
                    v[a] = cz(1.0, 0.0);
                    v[b] = cz(0.0, 1.0);
                    let w: Vec<Complex64> = v.iter().map(|c| c.conj()).collect();
                    rows[p].push(v);
                    rows[qd].push(w);
                }
            }
        }
        let mut frame = CMatrix::zeros(n, n);
        let mut r = 0;
        for p in (0..=k).rev() {
            for v in &rows[p] {
                for (j, c) in v.iter().enumerate() {
                    frame[(r, j)] = *c;
                }
                r += 1;
            }
        }
        Ok(ConstantVhs {
            name: name.to_string(),
            weight,
            moduli_dim,
            hodge,
            q,
            frame,
        })
    }
}

impl FamilyModel for ConstantVhs {
    fn name(&self) -> &str {
        &self.name
    }
    fn weight(&self) -> usize {
        self.weight
    }
    fn moduli_dim(&self) -> usize {
        self.moduli_dim
    }
    fn hodge_numbers(&self) -> Vec<usize> {
        self.hodge.clone()
    }
    fn polarization(&self) -> &CMatrix {
        &self.q
    }
    fn raw_frame(&self, _t: &[Complex64]) -> Result<CMatrix> {
        Ok(self.frame.clone())
    }
    fn raw_frame_derivatives(&self, _t: &[Complex64]) -> Result<Option<Vec<CMatrix>>> {
        let n = self.frame.nrows();
        Ok(Some(vec![CMatrix::zeros(n, n); self.moduli_dim]))
    }
    fn local_scale(&self, _t: &[Complex64]) -> f64 {
        1.0
    }
}

/// Pullback along `t = c·s`.
#[derive(Debug, Clone)]
pub struct Reparameterized {
    inner: Arc<dyn FamilyModel>,
    factor: Complex64,
    name: String,
}

impl Reparameterized {
    pub fn new(inner: Arc<dyn FamilyModel>, factor: Complex64) -> Result<Self> {
        if factor.norm() == 0.0 {
            return Err(HmlError::Dimension("reparameterization factor is zero".into()));
        }
        let name = format!("{}*{}", inner.name(), factor);
        Ok(Reparameterized { inner, factor, name })
    }

    fn map(&self, s: &[Complex64]) -> Vec<Complex64> {
        s.iter().map(|x| x * self.factor).collect()
    }
}

impl FamilyModel for Reparameterized {
    fn name(&self) -> &str {
        &self.name
    }
    fn weight(&self) -> usize {
        self.inner.weight()
    }
    fn moduli_dim(&self) -> usize {
        self.inner.moduli_dim()
    }
    fn hodge_numbers(&self) -> Vec<usize> {
        self.inner.hodge_numbers()
    }
    fn polarization(&self) -> &CMatrix {
        self.inner.polarization()
    }
    fn raw_frame(&self, s: &[Complex64]) -> Result<CMatrix> {
        self.inner.raw_frame(&self.map(s))
    }
    fn raw_frame_derivatives(&self, s: &[Complex64]) -> Result<Option<Vec<CMatrix>>> {
        Ok(self
            .inner
            .raw_frame_derivatives(&self.map(s))?
            .map(|d| d.into_iter().map(|m| m * self.factor).collect()))
    }
    fn local_scale(&self, s: &[Complex64]) -> f64 {
        self.inner.local_scale(&self.map(s)) / self.factor.norm()
    }
    fn localized(&self, s: &[Complex64]) -> Result<Option<Arc<dyn FamilyModel>>> {
        Ok(match self.inner.localized(&self.map(s))? {
            Some(view) => Some(Arc::new(Reparameterized::new(view, self.factor)?)),
            None => None,
        })
    }
}

/// A family over a product of upper half planes pulled back to the punctured
/// polydisc by `t_i = log q_i / (2πi)`.
#[derive(Debug, Clone)]
pub struct PunctureCoordinate {
    inner: Arc<dyn FamilyModel>,
    name: String,
}

impl PunctureCoordinate {
    pub fn new(inner: Arc<dyn FamilyModel>) -> Result<Self> {
        let name = format!("{}@q", inner.name());
        Ok(PunctureCoordinate { inner, name })
    }

    fn t_of(q: &[Complex64]) -> Result<Vec<Complex64>> {
        q.iter()
            .map(|qi| {
                let r = qi.norm();
                if !(r > 0.0 && r < 1.0) {
                    return Err(HmlError::OutsideChart(format!("|q| must lie in (0, 1), got {r}")));
                }
                Ok(qi.ln() / cz(0.0, 2.0 * PI))
            })
            .collect()
    }
}

impl FamilyModel for PunctureCoordinate {
    fn name(&self) -> &str {
        &self.name
    }
    fn weight(&self) -> usize {
        self.inner.weight()
    }
    fn moduli_dim(&self) -> usize {
        self.inner.moduli_dim()
    }
    fn hodge_numbers(&self) -> Vec<usize> {
        self.inner.hodge_numbers()
    }
    fn polarization(&self) -> &CMatrix {
        self.inner.polarization()
    }
    fn raw_frame(&self, q: &[Complex64]) -> Result<CMatrix> {
        self.inner.raw_frame(&Self::t_of(q)?)
    }
    fn raw_frame_derivatives(&self, q: &[Complex64]) -> Result<Option<Vec<CMatrix>>> {
        let t = Self::t_of(q)?;
        Ok(self.inner.raw_frame_derivatives(&t)?.map(|d| {
            d.into_iter()
                .zip(q)
                .map(|(m, qi)| m * (cz(1.0, 0.0) / (cz(0.0, 2.0 * PI) * qi)))
                .collect()
        }))
    }
    fn local_scale(&self, q: &[Complex64]) -> f64 {
        q.iter().map(|x| x.norm()).fold(f64::INFINITY, f64::min)
    }
}

/// Hides closed-form derivatives so the finite-difference path is exercised.
#[derive(Debug, Clone)]
pub struct FdOnly(pub Arc<dyn FamilyModel>);

impl FamilyModel for FdOnly {
    fn name(&self) -> &str {
        self.0.name()
    }
    fn weight(&self) -> usize {
        self.0.weight()
    }
    fn moduli_dim(&self) -> usize {
        self.0.moduli_dim()
    }
    fn hodge_numbers(&self) -> Vec<usize> {
        self.0.hodge_numbers()
    }
    fn polarization(&self) -> &CMatrix {
        self.0.polarization()
    }
    fn raw_frame(&self, t: &[Complex64]) -> Result<CMatrix> {
        self.0.raw_frame(t)
    }
    fn local_scale(&self, t: &[Complex64]) -> f64 {
        self.0.local_scale(t)
    }
}
