use num_complex::Complex64;

use super::{CyFamily, MetricPoint};
use crate::error::Result;
use crate::linalg::{cz, fnorm, min_eigenvalue, rel_diff, trace_re, CMatrix};

/// Tolerance for identities whose two sides come from the connection blocks
/// and the finite-difference Weil–Petersson route without further differencing.
pub const STRICT_TOL: f64 = 1e-8;

/// Tolerance for the definitional consistency of the BCOV assembly.
pub const WIRING_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub lhs: CMatrix,
    pub rhs: CMatrix,
}

impl IdentityCheck {
    fn new(name: &str, residual: f64, tolerance: f64, lhs: CMatrix, rhs: CMatrix) -> Self {
        IdentityCheck {
            name: name.to_string(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            lhs,
            rhs,
        }
    }

    fn equality(name: &str, lhs: CMatrix, rhs: CMatrix, tolerance: f64) -> Self {
        IdentityCheck::new(name, rel_diff(&lhs, &rhs), tolerance, lhs, rhs)
    }
}

#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub family: String,
    pub t: Vec<Complex64>,
    pub checks: Vec<IdentityCheck>,
    pub point: MetricPoint,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn scaled(m: &CMatrix, s: f64) -> CMatrix {
    m * cz(s, 0.0)
}

/// Every identity applicable to the family's dimension, evaluated at `t`.
pub fn identity_suite_at(cy: &CyFamily, t: &[Complex64]) -> Result<IdentityReport> {
    let pt = MetricPoint::evaluate(cy, t)?;
    Ok(report_for(cy, pt))
}

pub(crate) fn report_for(cy: &CyFamily, pt: MetricPoint) -> IdentityReport {
    let n = pt.n;
    let m = pt.moduli_dim() as f64;
    let tol = cy.identity_tol;
    let h_h = pt.hodge().clone();
    let wp = &pt.h_wp;
    let mut checks = vec![IdentityCheck::equality(
        "wp_routes",
        wp.clone(),
        pt.h_wp_connection.clone(),
        tol,
    )];
    for k in 0..=n {
        checks.push(IdentityCheck::equality(
            &format!("generalized_hodge_routes_k{k}"),
            pt.h_ph[k].clone(),
            pt.h_ph_chern[k].clone(),
            tol,
        ));
    }
    match n {
        // algebraic in the connection blocks; the difference route is checked by `wp_routes`
        2 => checks.push(IdentityCheck::equality(
            "n2_hodge",
            h_h.clone(),
            scaled(&pt.h_wp_connection, 2.0),
            STRICT_TOL,
        )),
        3 => checks.push(IdentityCheck::equality(
            "n3_hodge_ricci",
            h_h.clone(),
            scaled(wp, m + 3.0) + &pt.ric_wp,
            tol,
        )),
        4 => checks.push(IdentityCheck::equality(
            "n4_hodge_ricci",
            h_h.clone(),
            scaled(wp, 2.0 * m + 4.0) + scaled(&pt.ric_wp, 2.0),
            tol,
        )),
        _ => {}
    }
    if n >= 2 {
        let diff = &h_h - scaled(wp, 2.0);
        let scale = trace_re(wp).abs().max(f64::MIN_POSITIVE);
        let residual = (-min_eigenvalue(&diff)).max(0.0) / scale;
        checks.push(IdentityCheck::new(
            "hodge_dominates_twice_wp",
            residual,
            STRICT_TOL,
            h_h.clone(),
            scaled(wp, 2.0),
        ));
    }
    let c1_f1 = pt.chern_top[1..]
        .iter()
        .fold(CMatrix::zeros(wp.nrows(), wp.ncols()), |a, c| a + c);
    checks.push(IdentityCheck::equality(
        "c1_F1_is_wp",
        c1_f1,
        pt.h_wp_connection.clone(),
        tol,
    ));
    checks.push(IdentityCheck::equality(
        "c1_Fn_is_wp",
        pt.chern_top[n].clone(),
        pt.h_wp_connection.clone(),
        tol,
    ));
    let sign = |i: usize| if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    let alternating = (1..=n).fold(CMatrix::zeros(wp.nrows(), wp.ncols()), |a, i| {
        a + scaled(&pt.h_h[i], sign(i))
    });
    let euler = scaled(wp, pt.chi as f64 / 12.0);
    let lhs = &alternating - &pt.h_bcov;
    let scale = fnorm(&alternating).max(fnorm(&pt.h_bcov)).max(fnorm(&euler));
    let residual = if scale > 0.0 {
        fnorm(&(&lhs - &euler)) / scale
    } else {
        0.0
    };
    checks.push(IdentityCheck::new("bcov_wiring", residual, WIRING_TOL, lhs, euler));
    if let Some(short) = &pt.h_bcov_primitive {
        checks.push(IdentityCheck::equality(
            "bcov_primitive_route",
            pt.h_bcov.clone(),
            short.clone(),
            super::PRIMITIVITY_ROUTE_TOL,
        ));
    }
    IdentityReport {
        family: cy.name().to_string(),
        t: pt.t.clone(),
        checks,
        point: pt,
    }
}
