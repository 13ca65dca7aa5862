//! Metric entries and identity residuals on a grid.

use hml_core::linalg::CMatrix;
use hml_core::metrics::{identity_suite_at, IdentityReport, PRIMITIVITY_THRESHOLD};
use rayon::prelude::*;

use super::{point_columns, point_values, provenance_columns, provenance_values, Settings, Target};
use crate::report::{upper_columns, upper_values, Table, Value};

/// `(name, residual, tolerance, pass)` for every check at one point.
type Checks = Vec<(String, f64, f64, bool)>;

fn max_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn checks_of(rep: &IdentityReport, declared_primitive: bool) -> Checks {
    let mut out: Checks = rep
        .checks
        .iter()
        .map(|c| (c.name.clone(), c.residual, c.tolerance, c.pass))
        .collect();
    if declared_primitive {
        let n = rep.point.n;
        let r = rep.point.h_ph[..n].iter().map(max_entry).fold(0.0, f64::max);
        out.push((
            "lower_primitive".into(),
            r,
            PRIMITIVITY_THRESHOLD,
            r <= PRIMITIVITY_THRESHOLD,
        ));
    }
    out
}

pub fn run(target: &Target, s: &Settings) -> Table {
    let cy = target.cy;
    let (m, n) = (cy.moduli_dim(), cy.dim());
    let points = s.grid.points(s.rays, m);
    let results: Vec<_> = points
        .par_iter()
        .map(|p| target.chart.check(&p.z).and_then(|_| identity_suite_at(cy, &p.z)))
        .collect();
    // check names in first-seen order over the grid
    let mut names: Vec<String> = Vec::new();
    for r in results.iter().flatten() {
        for c in checks_of(r, cy.primitive) {
            if !names.contains(&c.0) {
                names.push(c.0);
            }
        }
    }
    let mut columns = point_columns(m);
    columns.extend(upper_columns("h_WP", m));
    for k in 0..=n {
        columns.extend(upper_columns(&format!("h_PH{k}"), m));
    }
    columns.extend(upper_columns("ric_WP", m));
    columns.extend(upper_columns("h_BCOV", m));
    columns.extend(names.iter().map(|c| format!("{c}_residual")));
    columns.extend(names.iter().map(|c| format!("{c}_tol")));
    columns.extend(names.iter().map(|c| format!("{c}_pass")));
    columns.extend(["error".to_string(), "pass".to_string()]);
    columns.extend(provenance_columns());
    let metric_width = (n + 4) * m * (m + 1);
    let mut table = Table::new("metrics", columns);
    for (p, r) in points.iter().zip(results) {
        let mut row = point_values(p);
        match r {
            Ok(rep) => {
                let pt = &rep.point;
                row.extend(upper_values(&pt.h_wp));
                for h in &pt.h_ph {
                    row.extend(upper_values(h));
                }
                row.extend(upper_values(&pt.ric_wp));
                row.extend(upper_values(&pt.h_bcov));
                let checks = checks_of(&rep, cy.primitive);
                let find = |name: &String| checks.iter().find(|c| &c.0 == name);
                row.extend(
                    names
                        .iter()
                        .map(|c| find(c).map_or(Value::Missing, |x| Value::Num(x.1))),
                );
                row.extend(
                    names
                        .iter()
                        .map(|c| find(c).map_or(Value::Missing, |x| Value::Num(x.2))),
                );
                row.extend(
                    names
                        .iter()
                        .map(|c| find(c).map_or(Value::Missing, |x| Value::Bool(x.3))),
                );
                row.push(Value::Missing);
                row.push(checks.iter().all(|c| c.3).into());
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(Value::Missing, metric_width + 3 * names.len()));
                row.push(e.to_string().into());
                row.push(false.into());
            }
        }
        row.extend(provenance_values(s, target));
        table.push(row);
    }
    table
}
