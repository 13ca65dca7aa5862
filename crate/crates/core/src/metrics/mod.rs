//! Weil–Petersson, generalized Hodge and Hodge metrics, the Ricci form of the
//! Weil–Petersson metric and the complex Hessian of the BCOV torsion.
//!
//! All matrices are the raw coefficients `h_{αβ̄}` of `√−1 Σ h_{αβ̄} dt^α ∧ dt̄^β`;
//! the `1/2π` of the form normalization is left to reports.

mod family;
mod identities;

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{HmlError, Result};
use crate::fd::{ddbar_many, step_for};
use crate::linalg::{cz, fnorm, hermitian_part, inverse, min_eigenvalue, rel_diff, trace_re, CMatrix, HERMITIAN_TOL};
use crate::vhs::{FamilyModel, VhsPoint, DEFAULT_FD_STEP};

pub use family::{CyFamily, DEFAULT_IDENTITY_TOL};
pub use identities::{identity_suite_at, IdentityCheck, IdentityReport};

/// Tolerance on the two Weil–Petersson routes.
pub const WP_ROUTE_TOL: f64 = 1e-5;

/// Relative tolerance on the two BCOV routes when the family is primitive.
pub const PRIMITIVITY_ROUTE_TOL: f64 = 1e-8;

/// Lower-degree metrics below this norm count as vanishing.
pub const PRIMITIVITY_THRESHOLD: f64 = 1e-10;

/// Semidefiniteness slack relative to the trace.
pub const SEMIDEFINITE_TOL: f64 = 1e-8;

/// Everything computed at one parameter point.
#[derive(Debug, Clone)]
pub struct MetricPoint {
    pub t: Vec<Complex64>,
    pub n: usize,
    pub chi: i64,
    /// `−∂∂̄ log g_n` by finite differences.
    pub h_wp: CMatrix,
    /// `tr(A^n_α g_{n−1} A^{n*}_β g_n^{-1})`.
    pub h_wp_connection: CMatrix,
    /// Generalized Hodge metrics from the connection blocks, `k = 0..=n`.
    pub h_ph: Vec<CMatrix>,
    /// `Σ_p p·c₁(H^{p,k−p})` by finite differences, `k = 0..=n`.
    pub h_ph_chern: Vec<CMatrix>,
    /// `h_H[k] = h_PH[k] + h_PH[k−2] + …`.
    pub h_h: Vec<CMatrix>,
    /// Finite-difference Chern forms `c₁(H^{p,n−p})`, `p = 0..=n`.
    pub chern_top: Vec<CMatrix>,
    pub ric_wp: CMatrix,
    pub h_bcov: CMatrix,
    /// `(−1)^n h_H − (χ/12) h_WP`, present when the lower degrees vanish.
    pub h_bcov_primitive: Option<CMatrix>,
}

struct DegreeData {
    point: VhsPoint,
    chern: Vec<CMatrix>,
    ricci: Option<CMatrix>,
}

fn log_det_hermitian(m: &CMatrix) -> Option<f64> {
    if m.nrows() == 0 {
        return Some(0.0);
    }
    let h = (m + m.adjoint()) * cz(0.5, 0.0);
    h.cholesky()
        .map(|c| 2.0 * c.l_dirty().diagonal().iter().map(|d| d.re.ln()).sum::<f64>())
}

/// `log det(L⁻¹ m L⁻*)` for a reference factor `m₀ = L L*`. Near the reference
/// the diagonal stays close to one, so the result carries an absolute error
/// of order machine epsilon instead of epsilon times `|log det m|`.
struct RelativeLogDet {
    l_inv: Option<CMatrix>,
}

impl RelativeLogDet {
    fn new(m0: &CMatrix) -> Result<Self> {
        if m0.nrows() == 0 {
            return Ok(RelativeLogDet { l_inv: None });
        }
        let h = (m0 + m0.adjoint()) * cz(0.5, 0.0);
        let l = h
            .cholesky()
            .ok_or_else(|| HmlError::Singular("reference matrix not positive definite".into()))?
            .l();
        let l_inv = inverse(&l, "Cholesky factor")?;
        Ok(RelativeLogDet { l_inv: Some(l_inv) })
    }

    fn eval(&self, m: &CMatrix) -> Option<f64> {
        match &self.l_inv {
            None => Some(0.0),
            Some(li) => log_det_hermitian(&(li * m * li.adjoint())),
        }
    }
}

/// Center point, finite-difference Chern forms of every Hodge bundle and,
/// if asked, `−∂∂̄ log det h_WP`, all through one local view of the family.
fn degree_data(family: &dyn FamilyModel, t: &[Complex64], rel_step: f64, with_ricci: bool) -> Result<DegreeData> {
    let view: Option<Arc<dyn FamilyModel>> = family.localized(t)?;
    let fam: &dyn FamilyModel = view.as_deref().unwrap_or(family);
    let point = VhsPoint::evaluate(fam, t, DEFAULT_FD_STEP)?;
    let k = point.frame.weight;
    let top = point.block_metric(k);
    // a flat family has no Weil–Petersson metric to take the Ricci form of
    let ricci_live = with_ricci && trace_re(&top) > 0.0;
    let refs = point
        .gram
        .g
        .iter()
        .map(RelativeLogDet::new)
        .collect::<Result<Vec<_>>>()?;
    let wp_ref = if ricci_live {
        Some(RelativeLogDet::new(&top)?)
    } else {
        None
    };
    let f = |s: &[Complex64]| -> Result<Vec<f64>> {
        let pt = VhsPoint::evaluate(fam, s, DEFAULT_FD_STEP)?;
        let mut out = Vec::with_capacity(k + 2);
        for (p, r) in refs.iter().enumerate() {
            let ld = r
                .eval(&pt.gram.g[p])
                .ok_or_else(|| HmlError::Singular(format!("Gram block {p} degenerate on the stencil")))?;
            out.push(-ld);
        }
        if let Some(r) = &wp_ref {
            let wp = pt.block_metric(k);
            let ld = r
                .eval(&wp)
                .ok_or_else(|| HmlError::Singular("Weil-Petersson metric degenerate on the stencil".into()))?;
            out.push(-ld);
        }
        Ok(out)
    };
    let h = step_for(rel_step, fam.local_scale(t));
    let mut hess = ddbar_many(&f, t, h)?;
    let m = t.len();
    let ricci = if ricci_live {
        Some(hess.pop().expect("stencil returns the Ricci entry"))
    } else if with_ricci {
        Some(CMatrix::zeros(m, m))
    } else {
        None
    };
    Ok(DegreeData {
        point,
        chern: hess,
        ricci,
    })
}

fn check_semidefinite(h: &CMatrix, k: usize) -> Result<CMatrix> {
    let h = hermitian_part(h, HERMITIAN_TOL)?;
    let min_eig = min_eigenvalue(&h);
    if min_eig < -SEMIDEFINITE_TOL * trace_re(&h).abs() {
        return Err(HmlError::Semidefiniteness { k, min_eig });
    }
    Ok(h)
}

/// Generalized Hodge metric of one degree by both routes.
fn primitive_hodge(data: &DegreeData, k: usize, tol: f64) -> Result<(CMatrix, CMatrix)> {
    let conn = check_semidefinite(&data.point.generalized_hodge(), k)?;
    let m = conn.nrows();
    let chern = data
        .chern
        .iter()
        .enumerate()
        .fold(CMatrix::zeros(m, m), |acc, (p, c)| acc + c * cz(p as f64, 0.0));
    let chern = hermitian_part(&chern, HERMITIAN_TOL)?;
    let residual = rel_diff(&conn, &chern);
    if !(residual <= tol) {
        return Err(HmlError::ChernRouteMismatch { k, residual });
    }
    Ok((conn, chern))
}

fn wp_routes(data: &DegreeData) -> Result<(CMatrix, CMatrix)> {
    let k = data.point.frame.weight;
    let fd = hermitian_part(&data.chern[k], HERMITIAN_TOL)?;
    let conn = hermitian_part(&data.point.block_metric(k), HERMITIAN_TOL)?;
    let r = rel_diff(&fd, &conn);
    if !(r <= WP_ROUTE_TOL) {
        return Err(HmlError::WpRouteMismatch(r));
    }
    Ok((fd, conn))
}

/// `h_H[k] = h_PH[k] + h_PH[k−2] + …`.
pub fn hodge_sums(h_ph: &[CMatrix]) -> Vec<CMatrix> {
    let mut out: Vec<CMatrix> = Vec::with_capacity(h_ph.len());
    for k in 0..h_ph.len() {
        let below = if k >= 2 {
            out[k - 2].clone()
        } else {
            CMatrix::zeros(h_ph[k].nrows(), h_ph[k].ncols())
        };
        out.push(below + &h_ph[k]);
    }
    out
}

impl MetricPoint {
    pub fn evaluate(cy: &CyFamily, t: &[Complex64]) -> Result<Self> {
        let n = cy.dim();
        let chi = cy.euler_characteristic();
        let mut h_ph = Vec::with_capacity(n + 1);
        let mut h_ph_chern = Vec::with_capacity(n + 1);
        for k in 0..n {
            let data = degree_data(cy.degree(k), t, cy.rel_step, false)?;
            let (a, b) = primitive_hodge(&data, k, cy.identity_tol)?;
            h_ph.push(a);
            h_ph_chern.push(b);
        }
        let top = degree_data(cy.top(), t, cy.rel_step, true)?;
        let (a, b) = primitive_hodge(&top, n, cy.identity_tol)?;
        h_ph.push(a);
        h_ph_chern.push(b);
        let (h_wp, h_wp_connection) = wp_routes(&top)?;
        let ric_wp = hermitian_part(top.ricci.as_ref().expect("requested"), HERMITIAN_TOL)?;
        let h_h = hodge_sums(&h_ph);
        let (h_bcov, h_bcov_primitive) = bcov_routes(&h_h, &h_wp, n, chi, cy.primitive)?;
        Ok(MetricPoint {
            t: t.to_vec(),
            n,
            chi,
            h_wp,
            h_wp_connection,
            h_ph,
            h_ph_chern,
            h_h,
            chern_top: top.chern,
            ric_wp,
            h_bcov,
            h_bcov_primitive,
        })
    }

    pub fn moduli_dim(&self) -> usize {
        self.h_wp.nrows()
    }

    /// `h_H = h_H[n]`.
    pub fn hodge(&self) -> &CMatrix {
        &self.h_h[self.n]
    }
}

/// Full alternating route and, for a primitive family (declared or
/// observed), the short route `(−1)^n h_H − (χ/12) h_WP`.
fn bcov_routes(
    h_h: &[CMatrix],
    h_wp: &CMatrix,
    n: usize,
    chi: i64,
    declared_primitive: bool,
) -> Result<(CMatrix, Option<CMatrix>)> {
    let euler = cz(chi as f64 / 12.0, 0.0);
    let sign = |i: usize| cz(if i.is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0);
    let alternating = (1..=n).fold(CMatrix::zeros(h_wp.nrows(), h_wp.ncols()), |acc, i| {
        acc + &h_h[i] * sign(i)
    });
    let full = alternating - h_wp * euler;
    let primitive = (0..n).all(|k| fnorm(&h_h[k]) <= PRIMITIVITY_THRESHOLD);
    if !primitive && !declared_primitive {
        return Ok((full, None));
    }
    let short = &h_h[n] * sign(n) - h_wp * euler;
    let r = rel_diff(&full, &short);
    if !(r <= PRIMITIVITY_ROUTE_TOL) {
        return Err(HmlError::PrimitivityRouteMismatch(r));
    }
    Ok((full, Some(short)))
}

/// `−∂∂̄ log g_n` by finite differences at step `rel_step · local_scale`,
/// checked against the contraction of the top connection block.
pub fn weil_petersson_at(family: &dyn FamilyModel, t: &[Complex64], rel_step: f64) -> Result<CMatrix> {
    let data = degree_data(family, t, rel_step, false)?;
    Ok(wp_routes(&data)?.0)
}

/// `(h_PH[k], h_H[k])`.
pub fn generalized_hodge_at(cy: &CyFamily, t: &[Complex64], k: usize) -> Result<(CMatrix, CMatrix)> {
    if k > cy.dim() {
        return Err(HmlError::Dimension(format!("degree {k} above n = {}", cy.dim())));
    }
    let mut h_ph = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let data = degree_data(cy.degree(j), t, cy.rel_step, false)?;
        h_ph.push(primitive_hodge(&data, j, cy.identity_tol)?.0);
    }
    let h_h = hodge_sums(&h_ph);
    Ok((h_ph.pop().expect("k + 1 entries"), h_h[k].clone()))
}

/// The Hodge metric `h_PH[n]` of the middle-dimensional variation.
pub fn hodge_metric_at(cy: &CyFamily, t: &[Complex64]) -> Result<CMatrix> {
    let data = degree_data(cy.top(), t, cy.rel_step, false)?;
    Ok(primitive_hodge(&data, cy.dim(), cy.identity_tol)?.0)
}

/// `−∂∂̄ log det h_WP`, zero for a flat family.
pub fn ricci_wp_at(family: &dyn FamilyModel, t: &[Complex64], rel_step: f64) -> Result<CMatrix> {
    let data = degree_data(family, t, rel_step, true)?;
    hermitian_part(data.ricci.as_ref().expect("requested"), HERMITIAN_TOL)
}

/// `Σ_{i=1}^n (−1)^i h_H[i] − (χ/12) h_WP`.
pub fn bcov_hessian_at(cy: &CyFamily, t: &[Complex64]) -> Result<CMatrix> {
    Ok(MetricPoint::evaluate(cy, t)?.h_bcov)
}
