use std::sync::Arc;

use crate::error::{HmlError, Result};
use crate::fd::DEFAULT_REL_STEP;
use crate::vhs::{ConstantVhs, FamilyModel};

/// Default relative tolerance for identities checked through finite differences.
pub const DEFAULT_IDENTITY_TOL: f64 = 1e-5;

/// A family of Calabi–Yau `n`-folds seen through the primitive variations of
/// every degree `k ≤ n`. The degree-`n` piece carries the moduli dependence;
/// lower degrees are constant, as for the Hodge structure on `H^k`, `k < n`,
/// of a family with fixed Kähler class.
#[derive(Debug, Clone)]
pub struct CyFamily {
    name: String,
    dim: usize,
    euler: i64,
    degrees: Vec<Arc<dyn FamilyModel>>,
    pub rel_step: f64,
    pub identity_tol: f64,
    /// Whether the family is declared primitive: the short BCOV route is
    /// then always evaluated and a mismatch is an error.
    pub primitive: bool,
}

impl CyFamily {
    /// `primitive_lower[k]` lists `h_prim^{p,k−p}` for `p = 0..=k`, for `k < n`.
    pub fn new(top: Arc<dyn FamilyModel>, primitive_lower: Vec<Vec<usize>>, euler: i64) -> Result<Self> {
        let n = top.weight();
        if primitive_lower.len() != n {
            return Err(HmlError::Dimension(format!(
                "{} lower degrees given for n = {n}",
                primitive_lower.len()
            )));
        }
        let hodge = top.hodge_numbers();
        if hodge.first() != Some(&1) || hodge.last() != Some(&1) {
            return Err(HmlError::config(
                "hodge_numbers",
                format!("top degree needs h^{{n,0}} = h^{{0,n}} = 1, got {hodge:?}"),
            ));
        }
        let m = top.moduli_dim();
        let mut degrees: Vec<Arc<dyn FamilyModel>> = Vec::with_capacity(n + 1);
        for (k, h) in primitive_lower.into_iter().enumerate() {
            let name = format!("{}[H^{k}]", top.name());
            degrees.push(Arc::new(ConstantVhs::new(&name, k, h, m)?));
        }
        degrees.push(top.clone());
        Ok(CyFamily {
            name: top.name().to_string(),
            dim: n,
            euler,
            degrees,
            rel_step: DEFAULT_REL_STEP,
            identity_tol: DEFAULT_IDENTITY_TOL,
            primitive: true,
        })
    }

    /// Lower degrees from a full Hodge diamond `h[p][q]`, `0 ≤ p, q ≤ n`, via
    /// `h_prim^{p,q} = h^{p,q} − h^{p−1,q−1}`.
    pub fn from_diamond(top: Arc<dyn FamilyModel>, diamond: &[Vec<usize>], euler: i64) -> Result<Self> {
        let n = top.weight();
        if diamond.len() != n + 1 || diamond.iter().any(|r| r.len() != n + 1) {
            return Err(HmlError::config("hodge", format!("expected an {0}x{0} diamond", n + 1)));
        }
        let prim = |p: usize, q: usize| -> Result<usize> {
            let below = if p > 0 && q > 0 { diamond[p - 1][q - 1] } else { 0 };
            diamond[p][q]
                .checked_sub(below)
                .ok_or_else(|| HmlError::config("hodge", format!("h^{{{p},{q}}} < h^{{{},{}}}", p - 1, q - 1)))
        };
        let top_prim = (0..=n).map(|p| prim(p, n - p)).collect::<Result<Vec<_>>>()?;
        if top_prim != top.hodge_numbers() {
            return Err(HmlError::config(
                "hodge",
                format!(
                    "primitive middle Hodge numbers {top_prim:?} differ from the family's {:?}",
                    top.hodge_numbers()
                ),
            ));
        }
        let lower = (0..n)
            .map(|k| (0..=k).map(|p| prim(p, k - p)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        CyFamily::new(top, lower, euler)
    }

    /// Lower primitive cohomology reduced to `H^0`.
    pub fn with_trivial_lower(top: Arc<dyn FamilyModel>, euler: i64) -> Result<Self> {
        let n = top.weight();
        let lower = (0..n)
            .map(|k| {
                let mut h = vec![0; k + 1];
                if k == 0 {
                    h[0] = 1;
                }
                h
            })
            .collect();
        CyFamily::new(top, lower, euler)
    }

    /// Replaces the degree-`k` variation, `k < n`.
    pub fn with_lower_degree(mut self, k: usize, family: Arc<dyn FamilyModel>) -> Result<Self> {
        if k >= self.dim || family.weight() != k || family.moduli_dim() != self.moduli_dim() {
            return Err(HmlError::Dimension(format!(
                "degree {k} slot needs weight {k} over {} parameters",
                self.moduli_dim()
            )));
        }
        self.degrees[k] = family;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Complex dimension `n` of the fibres.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn moduli_dim(&self) -> usize {
        self.degrees[self.dim].moduli_dim()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.euler
    }

    /// Primitive variation of degree `k`.
    pub fn degree(&self, k: usize) -> &dyn FamilyModel {
        self.degrees[k].as_ref()
    }

    pub fn top(&self) -> &dyn FamilyModel {
        self.degrees[self.dim].as_ref()
    }

    pub fn top_arc(&self) -> Arc<dyn FamilyModel> {
        self.degrees[self.dim].clone()
    }
}
