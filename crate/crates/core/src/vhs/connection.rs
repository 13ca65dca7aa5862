use num_complex::Complex64;

use super::frame::{format_point, frame_at, gram_at, FilteredFrame, GramMatrices};
use super::{block_rows, FamilyModel};
use crate::error::{HmlError, Result};
use crate::linalg::{cz, fnorm, CMatrix};

/// Default relative step for finite-difference frame derivatives.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Relative size of `∂F^p` outside `F^{p−1}` tolerated at any point.
pub const TRANSVERSALITY_TOL: f64 = 1e-8;

/// Gauss–Manin data in the adapted frame.
///
/// `a[p][α]` is the `h_p × h_{p−1}` matrix of `D_α : H^{p,q} → H^{p−1,q+1}`,
/// row `i` holding the coefficients of `D_α e_{p,i}` on `e_{p−1,·}`.
/// `b[p][α]` is the `h_p × h_p` part of `∂_α` staying in `H^{p,q}`.
/// `a[0]` is empty.
#[derive(Debug, Clone)]
pub struct ConnectionBlocks {
    pub weight: usize,
    pub moduli_dim: usize,
    pub a: Vec<Vec<CMatrix>>,
    pub b: Vec<Vec<CMatrix>>,
    pub transversality_residual: f64,
}

/// Frame, Gram matrices and connection blocks at one point.
#[derive(Debug, Clone)]
pub struct VhsPoint {
    pub frame: FilteredFrame,
    pub gram: GramMatrices,
    pub blocks: ConnectionBlocks,
}

/// `∂_α` of the raw frame: closed form when the family has one, otherwise
/// central differences with one Richardson extrapolation.
pub fn raw_derivatives(family: &dyn FamilyModel, t: &[Complex64], h_fd: f64) -> Result<Vec<CMatrix>> {
    if let Some(d) = family.raw_frame_derivatives(t)? {
        return Ok(d);
    }
    let h = (h_fd * family.local_scale(t)).max(1e-12);
    let central = |alpha: usize, h: f64| -> Result<CMatrix> {
        let mut tp = t.to_vec();
        let mut tm = t.to_vec();
        tp[alpha] += h;
        tm[alpha] -= h;
        Ok((family.raw_frame(&tp)? - family.raw_frame(&tm)?) * cz(0.5 / h, 0.0))
    };
    (0..t.len())
        .map(|alpha| {
            let d1 = central(alpha, h)?;
            let d2 = central(alpha, h / 2.0)?;
            Ok((d2 * cz(4.0, 0.0) - d1) * cz(1.0 / 3.0, 0.0))
        })
        .collect()
}

fn connection_from_frame(frame: &FilteredFrame, derivs: &[CMatrix], scale: f64) -> Result<ConnectionBlocks> {
    let k = frame.weight;
    let hodge = &frame.hodge;
    let m = derivs.len();
    let mut a = vec![Vec::new(); k + 1];
    let mut b = vec![Vec::new(); k + 1];
    let mut worst = 0.0f64;
    let mut worst_p = 0;
    for p in 0..=k {
        if hodge[p] == 0 {
            a[p] = vec![CMatrix::zeros(0, if p > 0 { hodge[p - 1] } else { 0 }); m];
            b[p] = vec![CMatrix::zeros(0, 0); m];
            continue;
        }
        let rows = block_rows(&frame.raw, hodge, p);
        for d in derivs {
            let dp = block_rows(d, hodge, p);
            if p > 0 {
                a[p].push(frame.component(&dp, p - 1));
            }
            b[p].push(frame.component(&dp, p));
            let mut outside = CMatrix::zeros(dp.nrows(), dp.ncols());
            for low in 0..p.saturating_sub(1) {
                if hodge[low] > 0 {
                    outside += frame.component(&dp, low) * &frame.blocks[low];
                }
            }
            let denom = fnorm(&dp).max(fnorm(&rows) / scale);
            let r = if denom > 0.0 { fnorm(&outside) / denom } else { 0.0 };
            if r > worst {
                worst = r;
                worst_p = p;
            }
        }
    }
    if !(worst <= TRANSVERSALITY_TOL) {
        return Err(HmlError::Transversality {
            p: worst_p,
            residual: worst,
        });
    }
    Ok(ConnectionBlocks {
        weight: k,
        moduli_dim: m,
        a,
        b,
        transversality_residual: worst,
    })
}

impl VhsPoint {
    pub fn evaluate(family: &dyn FamilyModel, t: &[Complex64], h_fd: f64) -> Result<Self> {
        let frame = frame_at(family, t)?;
        let gram = gram_at(&frame)?;
        let derivs = raw_derivatives(family, t, h_fd)?;
        if derivs.len() != family.moduli_dim() {
            return Err(HmlError::Dimension(format!(
                "{} derivatives at {}",
                derivs.len(),
                format_point(t)
            )));
        }
        let blocks = connection_from_frame(&frame, &derivs, family.local_scale(t))?;
        Ok(VhsPoint { frame, gram, blocks })
    }

    /// `(h_p)_{αβ̄} = tr(A^p_α g_{p−1} A^{p*}_β g_p^{-1})`, the contribution of
    /// `D : H^{p,q} → H^{p−1,q+1}` to the generalized Hodge metric.
    pub fn block_metric(&self, p: usize) -> CMatrix {
        let m = self.blocks.moduli_dim;
        let mut h = CMatrix::zeros(m, m);
        if p == 0 || self.frame.hodge[p] == 0 || self.frame.hodge[p - 1] == 0 {
            return h;
        }
        let g_low = &self.gram.g[p - 1];
        let g_inv = &self.gram.g_inv[p];
        for al in 0..m {
            let left = &self.blocks.a[p][al] * g_low;
            for be in 0..m {
                h[(al, be)] = (&left * self.blocks.a[p][be].adjoint() * g_inv).trace();
            }
        }
        h
    }

    /// `Σ_p` of [`VhsPoint::block_metric`].
    pub fn generalized_hodge(&self) -> CMatrix {
        let m = self.blocks.moduli_dim;
        (1..=self.frame.weight).fold(CMatrix::zeros(m, m), |acc, p| acc + self.block_metric(p))
    }
}

pub fn connection_at(family: &dyn FamilyModel, t: &[Complex64], h_fd: f64) -> Result<ConnectionBlocks> {
    Ok(VhsPoint::evaluate(family, t, h_fd)?.blocks)
}

/// Curvature of the Hodge bundles `H^{p,q}` with the Hodge metric.
///
/// `r[p][γ][δ]` is the `h_p × h_p` matrix `(R_p)_{ij̄γδ̄}` and `c1[p]` its
/// trace against `g_p^{-1}`, the first Chern form `−∂∂̄ log det g_p`.
#[derive(Debug, Clone)]
pub struct Curvature {
    pub r: Vec<Vec<Vec<CMatrix>>>,
    pub c1: Vec<CMatrix>,
}

/// Curvature from the connection blocks: the `D`-part out of `H^{p,q}` minus
/// the `∂̄`-part, where `∂̄_γ e_{p,i} = Σ_l (X^p_γ)_{il} e_{p+1,l}` with
/// `X^p_γ = g_p A^{p+1*}_γ g_{p+1}^{-1}`.
pub fn curvature_via_connection(blocks: &ConnectionBlocks, gram: &GramMatrices) -> Result<Curvature> {
    let k = blocks.weight;
    let m = blocks.moduli_dim;
    if gram.g.len() != k + 1 || blocks.a.len() != k + 1 {
        return Err(HmlError::Dimension(format!(
            "{} Gram blocks and {} connection blocks for weight {k}",
            gram.g.len(),
            blocks.a.len()
        )));
    }
    let mut r = Vec::with_capacity(k + 1);
    let mut c1 = Vec::with_capacity(k + 1);
    for p in 0..=k {
        let hp = gram.g[p].nrows();
        let mut rp = vec![vec![CMatrix::zeros(hp, hp); m]; m];
        let mut c = CMatrix::zeros(m, m);
        if hp > 0 {
            let x: Vec<CMatrix> = if p < k && gram.g[p + 1].nrows() > 0 {
                (0..m)
                    .map(|g| &gram.g[p] * blocks.a[p + 1][g].adjoint() * &gram.g_inv[p + 1])
                    .collect()
            } else {
                Vec::new()
            };
            for ga in 0..m {
                for de in 0..m {
                    let mut v = CMatrix::zeros(hp, hp);
                    if p > 0 && gram.g[p - 1].nrows() > 0 {
                        v += &blocks.a[p][ga] * &gram.g[p - 1] * blocks.a[p][de].adjoint();
                    }
                    if !x.is_empty() {
                        v -= &x[ga] * &gram.g[p + 1] * x[de].adjoint();
                    }
                    c[(ga, de)] = (&v * &gram.g_inv[p]).trace();
                    rp[ga][de] = v;
                }
            }
        }
        r.push(rp);
        c1.push(c);
    }
    Ok(Curvature { r, c1 })
}

/// Largest relative violation of `A^p_α A^{p−1}_γ = A^p_γ A^{p−1}_α`.
pub fn commutation_residual(blocks: &ConnectionBlocks) -> f64 {
    let m = blocks.moduli_dim;
    let mut worst = 0.0f64;
    for p in 2..=blocks.weight {
        for al in 0..m {
            for ga in 0..m {
                let lhs = &blocks.a[p][al] * &blocks.a[p - 1][ga];
                let rhs = &blocks.a[p][ga] * &blocks.a[p - 1][al];
                if lhs.is_empty() {
                    continue;
                }
                let scale = fnorm(&lhs).max(fnorm(&rhs));
                let d = fnorm(&(lhs - rhs));
                worst = worst.max(if scale > 0.0 { d / scale } else { d });
            }
        }
    }
    worst
}

/// Largest relative component of `∂̄_β D_α e_{p,i}` outside `H^{p,q} ⊕ H^{p−1,q+1}`,
/// with `∂̄_β` taken by central differences of step `rel_step · local_scale`
/// and one Richardson extrapolation.
pub fn lemma_a1_residual(family: &dyn FamilyModel, t: &[Complex64], rel_step: f64) -> Result<f64> {
    let view = family.localized(t)?;
    let fam: &dyn FamilyModel = match &view {
        Some(v) => v.as_ref(),
        None => family,
    };
    let center = VhsPoint::evaluate(fam, t, DEFAULT_FD_STEP)?;
    let k = center.frame.weight;
    let hodge = center.frame.hodge.clone();
    let m = t.len();
    let h = rel_step * fam.local_scale(t);
    // D_α e_{p,·} as rows in the flat basis
    let image = |pt: &VhsPoint, p: usize, al: usize| &pt.blocks.a[p][al] * &pt.frame.blocks[p - 1];
    let mut worst = 0.0f64;
    for be in 0..m {
        let shifted = |dz: Complex64| -> Result<VhsPoint> {
            let mut s = t.to_vec();
            s[be] += dz;
            VhsPoint::evaluate(fam, &s, DEFAULT_FD_STEP)
        };
        let mut stencil = Vec::new();
        for hh in [h, h / 2.0] {
            stencil.push([
                shifted(cz(hh, 0.0))?,
                shifted(cz(-hh, 0.0))?,
                shifted(cz(0.0, hh))?,
                shifted(cz(0.0, -hh))?,
            ]);
        }
        for p in 1..=k {
            if hodge[p] == 0 || hodge[p - 1] == 0 {
                continue;
            }
            for al in 0..m {
                let dbar = |pts: &[VhsPoint; 4], hh: f64| {
                    let dx = (image(&pts[0], p, al) - image(&pts[1], p, al)) * cz(0.5 / hh, 0.0);
                    let dy = (image(&pts[2], p, al) - image(&pts[3], p, al)) * cz(0.5 / hh, 0.0);
                    (dx + dy * cz(0.0, 1.0)) * cz(0.5, 0.0)
                };
                let d = (dbar(&stencil[1], h / 2.0) * cz(4.0, 0.0) - dbar(&stencil[0], h)) * cz(1.0 / 3.0, 0.0);
                let mut outside = CMatrix::zeros(d.nrows(), d.ncols());
                for a in 0..=k {
                    if a == p || a + 1 == p || hodge[a] == 0 {
                        continue;
                    }
                    outside += center.frame.component(&d, a) * &center.frame.blocks[a];
                }
                let v = image(&center, p, al);
                let denom = fnorm(&d).max(fnorm(&v) / fam.local_scale(t));
                if denom > 0.0 {
                    worst = worst.max(fnorm(&outside) / denom);
                }
            }
        }
    }
    Ok(worst)
}
