use num_complex::Complex64;

use super::{block_rows, FamilyModel};
use crate::convention::hodge_sign;
use crate::error::{HmlError, Result};
use crate::linalg::{fnorm, hermitian_part, inverse, min_eigenvalue, CMatrix, HERMITIAN_TOL};

/// Relative tolerance for `Q`-orthogonality of non-dual Hodge pieces.
pub const FIRST_RELATION_TOL: f64 = 1e-8;

const DEGENERACY: f64 = 1e-13;

/// Frame adapted to the Hodge decomposition at one parameter point.
///
/// `blocks[p]` spans `H^{p,k−p}`: the raw block for `p` minus its projection
/// onto `F^{p+1}` with respect to the Hermitian form `Q(u, v̄)`. The raw rows
/// stay holomorphic; the projected rows are their representatives modulo `F^{p+1}`.
#[derive(Debug, Clone)]
pub struct FilteredFrame {
    pub t: Vec<Complex64>,
    pub weight: usize,
    pub hodge: Vec<usize>,
    pub raw: CMatrix,
    pub blocks: Vec<CMatrix>,
    pub q_flat: CMatrix,
    /// `Q(e_{p,i}, ē_{p,j})` without the Hodge sign.
    herm: Vec<CMatrix>,
    herm_inv: Vec<CMatrix>,
}

/// `Q(u_i, v̄_j)` for row sets `u`, `v`.
pub(crate) fn herm_pair(u: &CMatrix, q: &CMatrix, v: &CMatrix) -> CMatrix {
    u * q * v.adjoint()
}

impl FilteredFrame {
    /// Coefficients of the rows of `v` on the block for `p`.
    pub fn component(&self, v: &CMatrix, p: usize) -> CMatrix {
        herm_pair(v, &self.q_flat, &self.blocks[p]) * &self.herm_inv[p]
    }

    pub fn dimension(&self) -> usize {
        self.raw.nrows()
    }

    /// Largest relative `Q`-pairing between non-dual pieces.
    pub fn first_relation_residual(&self) -> f64 {
        let k = self.weight;
        let mut worst = 0.0f64;
        for p in 0..=k {
            for a in 0..=k {
                if a + p == k || self.hodge[p] == 0 || self.hodge[a] == 0 {
                    continue;
                }
                let pair = &self.blocks[p] * &self.q_flat * self.blocks[a].transpose();
                let scale = fnorm(&self.blocks[p]) * fnorm(&self.blocks[a]) * fnorm(&self.q_flat);
                worst = worst.max(fnorm(&pair) / scale);
            }
        }
        worst
    }
}

pub fn frame_at(family: &dyn FamilyModel, t: &[Complex64]) -> Result<FilteredFrame> {
    let hodge = family.hodge_numbers();
    let k = family.weight();
    if hodge.len() != k + 1 {
        return Err(HmlError::Dimension(format!(
            "{} Hodge numbers for weight {k}",
            hodge.len()
        )));
    }
    if t.len() != family.moduli_dim() {
        return Err(HmlError::Dimension(format!(
            "point has {} coordinates, family has {}",
            t.len(),
            family.moduli_dim()
        )));
    }
    let n: usize = hodge.iter().sum();
    let raw = family.raw_frame(t)?;
    let q = family.polarization().clone();
    if raw.shape() != (n, n) || q.shape() != (n, n) {
        return Err(HmlError::Dimension(format!(
            "frame {:?} and pairing {:?} for rank {n}",
            raw.shape(),
            q.shape()
        )));
    }
    let row_scale: f64 = raw.row_iter().map(|r| r.norm()).product();
    if n > 0 && !(raw.determinant().norm() > DEGENERACY * row_scale) {
        return Err(HmlError::DegenerateFrame(format_point(t)));
    }
    let mut blocks = vec![CMatrix::zeros(0, n); k + 1];
    let mut herm = vec![CMatrix::zeros(0, 0); k + 1];
    let mut herm_inv = vec![CMatrix::zeros(0, 0); k + 1];
    for p in (0..=k).rev() {
        let mut e = block_rows(&raw, &hodge, p);
        for a in p + 1..=k {
            if hodge[a] == 0 {
                continue;
            }
            let c = herm_pair(&e, &q, &blocks[a]) * &herm_inv[a];
            e -= c * &blocks[a];
        }
        let h = herm_pair(&e, &q, &e);
        herm_inv[p] = inverse(&h, &format!("Hodge form on block p = {p}"))
            .map_err(|_| HmlError::DegenerateFrame(format_point(t)))?;
        herm[p] = h;
        blocks[p] = e;
    }
    let frame = FilteredFrame {
        t: t.to_vec(),
        weight: k,
        hodge,
        raw,
        blocks,
        q_flat: q,
        herm,
        herm_inv,
    };
    let r = frame.first_relation_residual();
    if !(r <= FIRST_RELATION_TOL) {
        return Err(HmlError::NotPolarized(format!(
            "first Riemann-Hodge relation residual {r:e} at t = {}",
            format_point(t)
        )));
    }
    Ok(frame)
}

pub(crate) fn format_point(t: &[Complex64]) -> String {
    let parts: Vec<String> = t.iter().map(|c| format!("{}{:+}i", c.re, c.im)).collect();
    format!("({})", parts.join(", "))
}

/// Gram matrices `(g_p)_{ij̄} = ε_k i^{q−p} Q(e_{p,i}, ē_{p,j})`.
#[derive(Debug, Clone)]
pub struct GramMatrices {
    pub g: Vec<CMatrix>,
    pub g_inv: Vec<CMatrix>,
}

pub fn gram_at(frame: &FilteredFrame) -> Result<GramMatrices> {
    let k = frame.weight;
    let mut g = Vec::with_capacity(k + 1);
    let mut g_inv = Vec::with_capacity(k + 1);
    for p in 0..=k {
        let raw = &frame.herm[p] * hodge_sign(k, p);
        let gp = hermitian_part(&raw, HERMITIAN_TOL)?;
        if gp.nrows() > 0 {
            let min_eig = min_eigenvalue(&gp);
            if !(min_eig > 0.0) {
                return Err(HmlError::PolarizationSign { p, min_eig });
            }
        }
        g_inv.push(inverse(&gp, "Gram matrix")?);
        g.push(gp);
    }
    Ok(GramMatrices { g, g_inv })
}

impl GramMatrices {
    pub fn log_det(&self, p: usize) -> f64 {
        if self.g[p].nrows() == 0 {
            return 0.0;
        }
        match self.g[p].clone().cholesky() {
            Some(c) => 2.0 * c.l_dirty().diagonal().iter().map(|d| d.re.ln()).sum::<f64>(),
            None => f64::NAN,
        }
    }
}
