//! Variations of Hodge structure from period frames: Hodge-decomposed
//! frames, Gram matrices of the Hodge form, Gauss–Manin blocks and the
//! curvature of the Hodge bundles.

mod connection;
mod diagnostics;
mod frame;
mod pf_family;
mod synthetic;

use std::fmt::Debug;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::CMatrix;

pub use connection::{
    commutation_residual, connection_at, curvature_via_connection, lemma_a1_residual, ConnectionBlocks, Curvature,
    VhsPoint, DEFAULT_FD_STEP, TRANSVERSALITY_TOL,
};
pub use diagnostics::{vhs_diagnostics_at, VhsDiagnostics, COMMUTATION_TOL, LEMMA_A1_TOL};
pub use frame::{frame_at, gram_at, FilteredFrame, GramMatrices, FIRST_RELATION_TOL};
pub use pf_family::PfFamily;
pub use synthetic::{
    ConstantVhs, FdOnly, PunctureCoordinate, Reparameterized, Sym2, TwoParamAbelian, TwoParamProduct, UpperHalfPlane,
};

/// A polarized variation of Hodge structure of weight `k` over an
/// `m`-dimensional parameter chart, described by holomorphic frames.
///
/// `raw_frame` returns an `N × N` matrix whose rows, grouped in blocks for
/// `p = k, k−1, ..., 0` of sizes `h^{p,k−p}`, are flat coordinates of
/// holomorphic sections. The first `Σ_{p' ≥ p} h^{p',k−p'}` rows span `F^p`.
pub trait FamilyModel: Send + Sync + Debug {
    fn name(&self) -> &str;

    fn weight(&self) -> usize;

    fn moduli_dim(&self) -> usize;

    /// `h^{p,k−p}` indexed by `p`.
    fn hodge_numbers(&self) -> Vec<usize>;

    /// Constant flat pairing `Q` on `C^N`.
    fn polarization(&self) -> &CMatrix;

    fn raw_frame(&self, t: &[Complex64]) -> Result<CMatrix>;

    /// `∂_α` of the raw frame for every `α`, when known in closed form.
    fn raw_frame_derivatives(&self, _t: &[Complex64]) -> Result<Option<Vec<CMatrix>>> {
        Ok(None)
    }

    /// Natural length scale at `t` for finite-difference steps.
    fn local_scale(&self, t: &[Complex64]) -> f64;

    /// A view that evaluates points near `center` consistently with the
    /// value at `center` (used for finite-difference stencils).
    fn localized(&self, _center: &[Complex64]) -> Result<Option<Arc<dyn FamilyModel>>> {
        Ok(None)
    }
}

/// Row offset of the block for `p` in a raw frame.
pub fn block_offset(hodge: &[usize], p: usize) -> usize {
    hodge[p + 1..].iter().sum()
}

/// Rows of the block for `p`.
pub fn block_rows(m: &CMatrix, hodge: &[usize], p: usize) -> CMatrix {
    m.rows(block_offset(hodge, p), hodge[p]).into_owned()
}
