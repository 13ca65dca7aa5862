use num_complex::Complex64;

use super::connection::{commutation_residual, curvature_via_connection, lemma_a1_residual, VhsPoint, DEFAULT_FD_STEP};
use super::frame::{frame_at, gram_at};
use super::FamilyModel;
use crate::error::Result;
use crate::fd::ddbar_many;
use crate::linalg::{fnorm, hermitian_eigenvalues, CMatrix};

/// Tolerance for the weak form of the `∂̄ D` block structure.
pub const LEMMA_A1_TOL: f64 = 1e-6;

/// Tolerance for `A^p_α A^{p−1}_γ = A^p_γ A^{p−1}_α`.
pub const COMMUTATION_TOL: f64 = 1e-8;

/// Every engine-level check at one parameter point.
#[derive(Debug, Clone)]
pub struct VhsDiagnostics {
    /// `min_p λ_min(g_p) / λ_max(g_p)`; positive iff every Gram block is definite.
    pub gram_min_ratio: f64,
    pub first_relation: f64,
    pub transversality: f64,
    /// First Chern forms of the Hodge bundles from the connection.
    pub c1_connection: Vec<CMatrix>,
    /// The same from finite differences of `−log det g_p`.
    pub c1_fd: Vec<CMatrix>,
    /// `max_p ‖c1_connection − c1_fd‖ / max_p ‖c1_connection‖`.
    pub curvature_routes: f64,
    pub commutation: f64,
    pub lemma_a1: f64,
}

pub fn vhs_diagnostics_at(family: &dyn FamilyModel, t: &[Complex64], rel_step: f64) -> Result<VhsDiagnostics> {
    let view = family.localized(t)?;
    let fam: &dyn FamilyModel = view.as_deref().unwrap_or(family);
    let pt = VhsPoint::evaluate(fam, t, DEFAULT_FD_STEP)?;
    let k = pt.frame.weight;
    let gram_min_ratio = pt
        .gram
        .g
        .iter()
        .filter(|g| g.nrows() > 0)
        .map(|g| {
            let ev = hermitian_eigenvalues(g);
            let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            lo / hi
        })
        .fold(f64::INFINITY, f64::min);
    let c1_connection = curvature_via_connection(&pt.blocks, &pt.gram)?.c1;
    let h = rel_step * fam.local_scale(t);
    let f = |s: &[Complex64]| -> Result<Vec<f64>> {
        let g = gram_at(&frame_at(fam, s)?)?;
        Ok((0..=k).map(|p| -g.log_det(p)).collect())
    };
    let c1_fd = ddbar_many(&f, t, h)?;
    let scale = c1_connection.iter().map(fnorm).fold(0.0, f64::max);
    let diff = c1_connection
        .iter()
        .zip(&c1_fd)
        .map(|(a, b)| fnorm(&(a - b)))
        .fold(0.0, f64::max);
    let curvature_routes = if scale > 0.0 { diff / scale } else { diff };
    Ok(VhsDiagnostics {
        gram_min_ratio,
        first_relation: pt.frame.first_relation_residual(),
        transversality: pt.blocks.transversality_residual,
        c1_connection,
        c1_fd,
        curvature_routes,
        commutation: commutation_residual(&pt.blocks),
        lemma_a1: lemma_a1_residual(family, t, rel_step)?,
    })
}
