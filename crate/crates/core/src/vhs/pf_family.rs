use std::sync::Arc;

use num_complex::Complex64;

use super::FamilyModel;
use crate::error::{HmlError, Result};
use crate::linalg::{cz, CMatrix};
use crate::picard_fuchs::{LocalExpansion, PeriodSolver};

/// One-parameter family whose periods solve a Picard–Fuchs operator with a
/// point of maximal unipotent monodromy at `z = 0`.
///
/// Flat coordinates of `Ω` are `v_a = Σ_j B_{aj} ϖ̃_j` with `B` the configured
/// flat basis; raw frame row `r` is `θ^r Ω`, spanning `F^{n−r}` modulo `F^{n−r+1}`.
#[derive(Debug, Clone)]
pub struct PfFamily {
    name: String,
    weight: usize,
    solver: Arc<PeriodSolver>,
    flat_basis: CMatrix,
    q: CMatrix,
    local: Option<Arc<LocalData>>,
}

#[derive(Debug)]
struct LocalData {
    expansion: LocalExpansion,
    jets: CMatrix,
}

impl PfFamily {
    pub fn new(
        name: &str,
        weight: usize,
        solver: PeriodSolver,
        flat_basis: CMatrix,
        polarization: CMatrix,
    ) -> Result<Self> {
        let n = solver.operator().order();
        if n != weight + 1 {
            return Err(HmlError::config(
                "pf_operator",
                format!("order {n} does not match weight {weight} + 1"),
            ));
        }
        if flat_basis.shape() != (n, n) {
            return Err(HmlError::config("flat_basis", format!("expected {n}x{n}")));
        }
        if polarization.shape() != (n, n) {
            return Err(HmlError::config("polarization_matrix", format!("expected {n}x{n}")));
        }
        if flat_basis.determinant().norm() == 0.0 {
            return Err(HmlError::config("flat_basis", "matrix is singular"));
        }
        Ok(PfFamily {
            name: name.to_string(),
            weight,
            solver: Arc::new(solver),
            flat_basis,
            q: polarization,
            local: None,
        })
    }

    pub fn solver(&self) -> &PeriodSolver {
        &self.solver
    }

    fn jets(&self, z: Complex64) -> Result<CMatrix> {
        if let Some(local) = &self.local {
            if (z - local.expansion.center()).norm() <= 0.5 * local.expansion.radius() {
                return Ok(local.expansion.transport_to(z)? * &local.jets);
            }
        }
        self.solver.jets(z)
    }

    fn check(&self, t: &[Complex64]) -> Result<Complex64> {
        let z = t[0];
        let d = self.solver.operator().distance_to_singularities(z);
        if !(d > 0.0) || !z.is_finite() {
            return Err(HmlError::OutsideChart(format!("z = {z} is a singular point")));
        }
        Ok(z)
    }
}

impl FamilyModel for PfFamily {
    fn name(&self) -> &str {
        &self.name
    }
    fn weight(&self) -> usize {
        self.weight
    }
    fn moduli_dim(&self) -> usize {
        1
    }
    fn hodge_numbers(&self) -> Vec<usize> {
        vec![1; self.weight + 1]
    }
    fn polarization(&self) -> &CMatrix {
        &self.q
    }
    fn raw_frame(&self, t: &[Complex64]) -> Result<CMatrix> {
        let z = self.check(t)?;
        Ok(self.jets(z)? * self.flat_basis.transpose())
    }
    fn raw_frame_derivatives(&self, t: &[Complex64]) -> Result<Option<Vec<CMatrix>>> {
        // ∂_z θ^r Ω = θ^{r+1} Ω / z, the last row closed by the operator
        let z = self.check(t)?;
        let raw = self.raw_frame(t)?;
        let a = self.solver.operator().companion(z);
        Ok(Some(vec![a * raw * (cz(1.0, 0.0) / z)]))
    }
    fn local_scale(&self, t: &[Complex64]) -> f64 {
        self.solver.operator().distance_to_singularities(t[0])
    }
    fn localized(&self, center: &[Complex64]) -> Result<Option<Arc<dyn FamilyModel>>> {
        let z = self.check(center)?;
        let expansion = LocalExpansion::new(self.solver.operator(), z)?;
        let jets = self.solver.jets(z)?;
        let mut view = self.clone();
        view.local = Some(Arc::new(LocalData { expansion, jets }));
        Ok(Some(Arc::new(view)))
    }
}
