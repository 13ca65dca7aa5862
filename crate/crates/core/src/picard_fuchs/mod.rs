//! Picard–Fuchs operators in θ-form, their series and Frobenius solutions at
//! a point of maximal unipotent monodromy, and transport of solution jets.

mod operator;
mod path;
mod series;
mod transport;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub use operator::{PFOperator, SingularPoint};
pub use path::{segment_distance, PathPlan};
pub use series::{series_seed, FrobeniusBasis, SeriesSolution, DEFAULT_SERIES_ORDER, HANDOFF_FRACTION};
pub use transport::{integrate_along, integrate_matrix, LocalExpansion, DEFAULT_TOL, LOCAL_ORDER};

use crate::error::{HmlError, Result};

/// Relative determinant below which a period frame counts as degenerate.
pub const FRAME_DEGENERACY: f64 = 1e-13;

/// Checks a full-basis θ-jet matrix and returns it as a period frame.
///
/// Row `r` holds `θ^r` of every basis solution, so rows `0..=p` span
/// `F^{n-p}` in the flat basis.
pub fn derivative_frame(op: &PFOperator, t: Complex64, jet: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = op.order();
    if jet.nrows() != n || jet.ncols() != n {
        return Err(HmlError::Dimension(format!(
            "jet is {}x{}, expected {n}x{n}",
            jet.nrows(),
            jet.ncols()
        )));
    }
    let scale: f64 = jet.row_iter().map(|r| r.norm()).product();
    let det = jet.determinant().norm();
    if !(scale > 0.0) || det < FRAME_DEGENERACY * scale {
        return Err(HmlError::DegenerateFrame(format!("{t}")));
    }
    Ok(jet.clone())
}

/// Frobenius jets anywhere in the plane: direct series inside the handoff
/// disc, transport along the ray from the handoff circle outside it.
#[derive(Debug, Clone)]
pub struct PeriodSolver {
    op: PFOperator,
    frobenius: FrobeniusBasis,
    tol: f64,
}

/// Clearance of transport paths, in units of the convergence radius.
pub const PATH_CLEARANCE: f64 = 0.05;

impl PeriodSolver {
    pub fn new(op: PFOperator, series_order: usize, tol: f64) -> Result<Self> {
        let frobenius = FrobeniusBasis::new(&op, series_order)?;
        Ok(PeriodSolver { op, frobenius, tol })
    }

    pub fn operator(&self) -> &PFOperator {
        &self.op
    }

    pub fn handoff_radius(&self) -> f64 {
        HANDOFF_FRACTION * self.frobenius.scale()
    }

    /// θ-jets of the normalized Frobenius basis at `z`.
    pub fn jets(&self, z: Complex64) -> Result<DMatrix<Complex64>> {
        let r = z.norm();
        if r == 0.0 {
            return Err(HmlError::OutsideChart("z = 0 is singular".into()));
        }
        let handoff = self.handoff_radius();
        if r <= handoff || !handoff.is_finite() {
            return Ok(self.frobenius.jets(z));
        }
        let seed = z / r * handoff;
        let clearance = PATH_CLEARANCE * self.frobenius.scale();
        let plan = PathPlan::plan(&self.op, seed, z, clearance)?;
        integrate_matrix(&self.op, &self.frobenius.jets(seed), &plan, self.tol)
    }
}
