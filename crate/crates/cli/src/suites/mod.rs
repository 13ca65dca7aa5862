//! The verification suites. Rows are computed in parallel and emitted in
//! grid order.

pub mod exterior;
pub mod metrics;
pub mod poincare;
pub mod vhs;

use hml_core::metrics::CyFamily;
use hml_core::poincare::PoincareChart;

use crate::grid::{GridPoint, GridSpec};
use crate::report::Value;

/// Resolved settings for one run.
#[derive(Debug, Clone)]
pub struct Settings {
    pub grid: GridSpec,
    pub rays: usize,
    pub decades: usize,
    pub rel_step: f64,
    pub identity_tol: f64,
}

/// A family ready for evaluation with its chart and the config hash.
#[derive(Debug, Clone)]
pub struct Target<'a> {
    pub cy: &'a CyFamily,
    pub chart: &'a PoincareChart,
    pub config: &'a str,
}

pub(crate) fn point_columns(m: usize) -> Vec<String> {
    let mut out = vec!["index".to_string(), "radius".into(), "ray".into()];
    for i in 0..m {
        out.push(format!("z{i}_re"));
        out.push(format!("z{i}_im"));
    }
    out
}

pub(crate) fn point_values(p: &GridPoint) -> Vec<Value> {
    let mut out = vec![p.index.into(), p.radius.into(), p.ray.into()];
    for z in &p.z {
        out.push(z.re.into());
        out.push(z.im.into());
    }
    out
}

pub(crate) fn provenance_columns() -> Vec<String> {
    vec!["fd_rel_step".into(), "config".into()]
}

pub(crate) fn provenance_values(s: &Settings, t: &Target) -> Vec<Value> {
    vec![s.rel_step.into(), t.config.into()]
}
