//! Frame, Gram, transversality, curvature and commutation checks on a grid.

use hml_core::vhs::{
    vhs_diagnostics_at, VhsDiagnostics, COMMUTATION_TOL, FIRST_RELATION_TOL, LEMMA_A1_TOL, TRANSVERSALITY_TOL,
};
use rayon::prelude::*;

use super::{point_columns, point_values, provenance_columns, provenance_values, Settings, Target};
use crate::report::{Table, Value};

/// Residual columns with their tolerances; the Gram check is a lower bound.
fn checks(d: &VhsDiagnostics, curvature_tol: f64) -> Vec<(&'static str, f64, f64, bool)> {
    let upper = |name, r: f64, tol: f64| (name, r, tol, r <= tol);
    vec![
        ("gram_min_ratio", d.gram_min_ratio, 0.0, d.gram_min_ratio > 0.0),
        upper("first_relation", d.first_relation, FIRST_RELATION_TOL),
        upper("transversality", d.transversality, TRANSVERSALITY_TOL),
        upper("curvature_routes", d.curvature_routes, curvature_tol),
        upper("commutation", d.commutation, COMMUTATION_TOL),
        upper("lemma_a1", d.lemma_a1, LEMMA_A1_TOL),
    ]
}

const NAMES: [&str; 6] = [
    "gram_min_ratio",
    "first_relation",
    "transversality",
    "curvature_routes",
    "commutation",
    "lemma_a1",
];

pub fn run(target: &Target, s: &Settings) -> Table {
    let m = target.cy.moduli_dim();
    let mut columns = point_columns(m);
    columns.extend(NAMES.iter().map(|n| n.to_string()));
    columns.extend(NAMES.iter().map(|n| format!("{n}_tol")));
    columns.extend(NAMES.iter().map(|n| format!("{n}_pass")));
    columns.extend(["error".to_string(), "pass".to_string()]);
    columns.extend(provenance_columns());
    let mut table = Table::new("vhs", columns);
    let points = s.grid.points(s.rays, m);
    let results: Vec<_> = points
        .par_iter()
        .map(|p| {
            target
                .chart
                .check(&p.z)
                .and_then(|_| vhs_diagnostics_at(target.cy.top(), &p.z, s.rel_step))
        })
        .collect();
    for (p, r) in points.iter().zip(results) {
        let mut row = point_values(p);
        match r {
            Ok(d) => {
                let c = checks(&d, s.identity_tol);
                row.extend(c.iter().map(|x| Value::Num(x.1)));
                row.extend(c.iter().map(|x| Value::Num(x.2)));
                row.extend(c.iter().map(|x| Value::Bool(x.3)));
                row.push(Value::Missing);
                row.push(c.iter().all(|x| x.3).into());
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(Value::Missing, 3 * NAMES.len()));
                row.push(e.to_string().into());
                row.push(false.into());
            }
        }
        row.extend(provenance_values(s, target));
        table.push(row);
    }
    table
}
