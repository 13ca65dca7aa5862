//! The Poincaré metric on `(Δ*)^l × Δ^{m−l}` and radial sweeps of the trace
//! `f = tr(τ⁻¹ h)` of a metric `h` against it.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{HmlError, Result};
use crate::linalg::{cz, hermitian_abs, inverse, CMatrix};
use crate::metrics::{CyFamily, MetricPoint};

/// Largest growth of per-decade maxima accepted as bounded.
pub const TREND_SLACK: f64 = 1.05;

/// First sampled decade, `|z| = 10^{-3}`.
pub const FIRST_DECADE: u32 = 3;

/// Negative `f` tolerated as rounding, relative to the largest `|f|`.
const NEGATIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoincareChart {
    pub l: usize,
    pub m: usize,
}

impl PoincareChart {
    pub fn new(l: usize, m: usize) -> Result<Self> {
        if l > m {
            return Err(HmlError::Dimension(format!("{l} punctured factors in dimension {m}")));
        }
        Ok(PoincareChart { l, m })
    }

    pub fn check(&self, z: &[Complex64]) -> Result<()> {
        if z.len() != self.m {
            return Err(HmlError::Dimension(format!(
                "{} coordinates for m = {}",
                z.len(),
                self.m
            )));
        }
        for (i, zi) in z.iter().enumerate() {
            let r = zi.norm();
            if !(r < 1.0) {
                return Err(HmlError::OutsideChart(format!("|z_{}| = {r} is not below 1", i + 1)));
            }
            if i < self.l && r == 0.0 {
                return Err(HmlError::OutsideChart(format!("z_{} sits on the puncture", i + 1)));
            }
        }
        Ok(())
    }
}

/// `diag(1/(|z_i|² log²(1/|z_i|)), …, 1, …)`.
pub fn poincare_metric_at(chart: &PoincareChart, z: &[Complex64]) -> Result<CMatrix> {
    chart.check(z)?;
    let mut tau = CMatrix::identity(chart.m, chart.m);
    for i in 0..chart.l {
        let r = z[i].norm();
        let log = r.ln();
        tau[(i, i)] = cz(1.0 / (r * r * log * log), 0.0);
    }
    Ok(tau)
}

/// `tr(τ⁻¹ h)`.
pub fn trace_f_at(h: &CMatrix, tau: &CMatrix) -> Result<f64> {
    if h.shape() != tau.shape() {
        return Err(HmlError::Dimension(format!(
            "{:?} against {:?}",
            h.shape(),
            tau.shape()
        )));
    }
    Ok((inverse(tau, "Poincare metric")? * h).trace().re)
}

/// Metric swept against the Poincaré metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominationTarget {
    /// `h_PH[k]`.
    PrimitiveHodge(usize),
    WeilPetersson,
    /// `|H|`, the absolute value of the BCOV Hessian.
    BcovAbs,
}

impl DominationTarget {
    pub fn label(&self) -> String {
        match self {
            DominationTarget::PrimitiveHodge(k) => format!("h_PH[{k}]"),
            DominationTarget::WeilPetersson => "h_WP".into(),
            DominationTarget::BcovAbs => "|H|".into(),
        }
    }

    pub fn select(&self, pt: &MetricPoint) -> Result<CMatrix> {
        match *self {
            DominationTarget::PrimitiveHodge(k) => pt
                .h_ph
                .get(k)
                .cloned()
                .ok_or_else(|| HmlError::Dimension(format!("degree {k} above n = {}", pt.n))),
            DominationTarget::WeilPetersson => Ok(pt.h_wp.clone()),
            DominationTarget::BcovAbs => Ok(hermitian_abs(&pt.h_bcov)),
        }
    }
}

/// One point of a radial sweep: decade `d` and ray `j`.
#[derive(Debug, Clone)]
pub struct SamplePoint {
    pub decade: u32,
    pub ray: usize,
    pub z: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct Sample {
    pub point: SamplePoint,
    pub f: Option<f64>,
    pub error: Option<String>,
}

/// Phase of ray `j` of `rays`: `π(2j+1)/rays`, never on the positive real axis.
pub fn ray_phase(j: usize, rays: usize) -> f64 {
    PI * (2 * j + 1) as f64 / rays as f64
}

/// Sample points at `|z_i| = 10^{-d}` for the punctured coordinates, the
/// others at the origin, decades `first..first+decades`.
pub fn sweep_points(chart: &PoincareChart, rays: usize, decades: u32, first: u32) -> Vec<SamplePoint> {
    let mut out = Vec::with_capacity(rays * decades as usize);
    for d in first..first + decades {
        let r = 10f64.powi(-(d as i32));
        for j in 0..rays {
            let mut z = vec![cz(0.0, 0.0); chart.m];
            for zi in z.iter_mut().take(chart.l) {
                *zi = Complex64::from_polar(r, ray_phase(j, rays));
            }
            out.push(SamplePoint { decade: d, ray: j, z });
        }
    }
    out
}

/// `f` at a sample from an already evaluated metric point.
pub fn sample_from(
    chart: &PoincareChart,
    target: DominationTarget,
    point: SamplePoint,
    metric: &Result<MetricPoint>,
) -> Sample {
    let f = metric.as_ref().map_err(Clone::clone).and_then(|pt| {
        let tau = poincare_metric_at(chart, &point.z)?;
        trace_f_at(&target.select(pt)?, &tau)
    });
    match f {
        Ok(f) => Sample {
            point,
            f: Some(f),
            error: None,
        },
        Err(e) => Sample {
            point,
            f: None,
            error: Some(e.to_string()),
        },
    }
}

pub fn evaluate_sample(cy: &CyFamily, chart: &PoincareChart, target: DominationTarget, point: SamplePoint) -> Sample {
    let metric = chart.check(&point.z).and_then(|_| MetricPoint::evaluate(cy, &point.z));
    sample_from(chart, target, point, &metric)
}

#[derive(Debug, Clone)]
pub struct DominationReport {
    pub target: String,
    pub samples: Vec<Sample>,
    /// `(decade, max f)` in increasing decade order.
    pub decade_max: Vec<(u32, f64)>,
    pub sup_f: f64,
    /// Innermost over outermost decade maximum.
    pub trend: f64,
    /// Innermost decade maximum over the maximum of all other decades.
    pub inner_excess: f64,
    /// Largest ratio of consecutive maxima over the innermost three decades.
    pub inner_growth: f64,
    pub nonnegative: bool,
    pub failures: usize,
    pub pass: bool,
}

pub fn assemble_report(target: DominationTarget, samples: Vec<Sample>) -> DominationReport {
    let mut decades: Vec<u32> = samples.iter().map(|s| s.point.decade).collect();
    decades.sort_unstable();
    decades.dedup();
    let decade_max: Vec<(u32, f64)> = decades
        .iter()
        .map(|&d| {
            let m = samples
                .iter()
                .filter(|s| s.point.decade == d)
                .filter_map(|s| s.f)
                .fold(f64::NEG_INFINITY, f64::max);
            (d, m)
        })
        .collect();
    let sup_f = samples.iter().filter_map(|s| s.f).fold(f64::NEG_INFINITY, f64::max);
    let scale = samples.iter().filter_map(|s| s.f).map(f64::abs).fold(0.0, f64::max);
    let nonnegative = samples.iter().filter_map(|s| s.f).all(|f| f >= -NEGATIVITY_TOL * scale);
    let failures = samples.iter().filter(|s| s.f.is_none()).count();
    let ratio = |a: f64, b: f64| {
        if b > 0.0 {
            a / b
        } else if a <= 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    };
    let (trend, inner_excess, inner_growth) = match decade_max.as_slice() {
        [] => (f64::NAN, f64::NAN, f64::NAN),
        [(_, only)] => (1.0, ratio(*only, *only), 1.0),
        all => {
            let inner = all[all.len() - 1].1;
            let outer_max = all[..all.len() - 1]
                .iter()
                .map(|x| x.1)
                .fold(f64::NEG_INFINITY, f64::max);
            let tail = &all[all.len().saturating_sub(3)..];
            let growth = tail.windows(2).map(|w| ratio(w[1].1, w[0].1)).fold(0.0, f64::max);
            (ratio(inner, all[0].1), ratio(inner, outer_max), growth)
        }
    };
    let pass =
        failures == 0 && nonnegative && sup_f.is_finite() && inner_excess <= TREND_SLACK && inner_growth <= TREND_SLACK;
    DominationReport {
        target: target.label(),
        samples,
        decade_max,
        sup_f,
        trend,
        inner_excess,
        inner_growth,
        nonnegative,
        failures,
        pass,
    }
}

/// `f` on `rays × decades` points approaching the chart origin.
pub fn domination_sweep(
    cy: &CyFamily,
    chart: &PoincareChart,
    target: DominationTarget,
    rays: usize,
    decades: u32,
) -> Result<DominationReport> {
    if rays == 0 || decades == 0 {
        return Err(HmlError::Dimension(
            "sweep needs at least one ray and one decade".into(),
        ));
    }
    if chart.m != cy.moduli_dim() {
        return Err(HmlError::Dimension(format!(
            "chart of dimension {} for a family over {} parameters",
            chart.m,
            cy.moduli_dim()
        )));
    }
    let samples = sweep_points(chart, rays, decades, FIRST_DECADE)
        .into_iter()
        .map(|p| evaluate_sample(cy, chart, target, p))
        .collect();
    Ok(assemble_report(target, samples))
}
