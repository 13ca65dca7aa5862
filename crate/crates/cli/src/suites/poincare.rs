//! Radial sweeps of `tr(ω_P^{-1} h)` toward the punctures.

use hml_core::metrics::MetricPoint;
use hml_core::poincare::{assemble_report, sample_from, sweep_points, DominationTarget, FIRST_DECADE, TREND_SLACK};
use rayon::prelude::*;

use super::{provenance_columns, provenance_values, Settings, Target};
use crate::report::{Table, Value};

pub fn targets(n: usize) -> Vec<DominationTarget> {
    let mut out: Vec<_> = (1..=n).map(DominationTarget::PrimitiveHodge).collect();
    out.push(DominationTarget::WeilPetersson);
    out.push(DominationTarget::BcovAbs);
    out
}

/// Per-sample values and per-target summaries.
pub fn run(target: &Target, s: &Settings) -> (Table, Table) {
    let cy = target.cy;
    let chart = target.chart;
    let points = sweep_points(chart, s.rays, s.decades as u32, FIRST_DECADE);
    let metrics: Vec<_> = points
        .par_iter()
        .map(|p| chart.check(&p.z).and_then(|_| MetricPoint::evaluate(cy, &p.z)))
        .collect();
    let goals = targets(cy.dim());

    let mut columns = vec!["decade".to_string(), "ray".into()];
    for i in 0..chart.m {
        columns.push(format!("z{i}_re"));
        columns.push(format!("z{i}_im"));
    }
    columns.extend(goals.iter().map(|g| format!("f[{}]", g.label())));
    columns.extend(["error".to_string(), "pass".to_string()]);
    columns.extend(provenance_columns());
    let mut samples = Table::new("poincare_samples", columns);
    let per_target: Vec<Vec<_>> = goals
        .iter()
        .map(|&g| {
            points
                .iter()
                .zip(&metrics)
                .map(|(p, r)| sample_from(chart, g, p.clone(), r))
                .collect()
        })
        .collect();
    for (i, p) in points.iter().enumerate() {
        let mut row: Vec<Value> = vec![(p.decade as usize).into(), p.ray.into()];
        for z in &p.z {
            row.push(z.re.into());
            row.push(z.im.into());
        }
        row.extend(per_target.iter().map(|t| Value::opt(t[i].f)));
        let error = per_target.iter().find_map(|t| t[i].error.clone());
        row.push(error.clone().map_or(Value::Missing, Value::Text));
        row.push(error.is_none().into());
        row.extend(provenance_values(s, target));
        samples.push(row);
    }

    let mut columns = vec!["target".to_string()];
    let decades: Vec<u32> = (FIRST_DECADE..FIRST_DECADE + s.decades as u32).collect();
    columns.extend(decades.iter().map(|d| format!("max_decade_{d}")));
    columns.extend(
        [
            "sup_f",
            "trend",
            "inner_excess",
            "inner_growth",
            "slack",
            "nonnegative",
            "failures",
            "pass",
        ]
        .iter()
        .map(|c| c.to_string()),
    );
    columns.extend(provenance_columns());
    let mut summary = Table::new("poincare_summary", columns);
    for (g, smp) in goals.iter().zip(per_target) {
        let rep = assemble_report(*g, smp);
        let mut row: Vec<Value> = vec![rep.target.clone().into()];
        row.extend(decades.iter().map(|d| {
            let v = rep.decade_max.iter().find(|x| x.0 == *d).map(|x| x.1);
            Value::opt(v.filter(|x| x.is_finite()))
        }));
        row.extend([
            Value::opt(Some(rep.sup_f).filter(|x| x.is_finite())),
            Value::opt(Some(rep.trend).filter(|x| x.is_finite())),
            Value::opt(Some(rep.inner_excess).filter(|x| x.is_finite())),
            Value::opt(Some(rep.inner_growth).filter(|x| x.is_finite())),
            TREND_SLACK.into(),
            rep.nonnegative.into(),
            rep.failures.into(),
            rep.pass.into(),
        ]);
        row.extend(provenance_values(s, target));
        summary.push(row);
    }
    (samples, summary)
}
