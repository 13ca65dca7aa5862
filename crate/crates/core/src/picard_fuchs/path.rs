use num_complex::Complex64;

use super::operator::PFOperator;
use crate::error::{HmlError, Result};

/// Polyline in the parameter plane avoiding the operator's singular points.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPlan {
    pub waypoints: Vec<Complex64>,
    pub clearance: f64,
}

/// Distance from `p` to the segment `[a, b]`.
pub fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = ((p - a) * d.conj()).re / len2;
    let s = s.clamp(0.0, 1.0);
    (a + d * s - p).norm()
}

impl PathPlan {
    /// Validated polyline: every segment keeps `clearance` from every finite singular point.
    pub fn new(op: &PFOperator, waypoints: Vec<Complex64>, clearance: f64) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(HmlError::Dimension("path needs at least one waypoint".into()));
        }
        if !(clearance > 0.0) {
            return Err(HmlError::Dimension("clearance must be positive".into()));
        }
        let plan = PathPlan { waypoints, clearance };
        plan.validate(op)?;
        Ok(plan)
    }

    pub fn validate(&self, op: &PFOperator) -> Result<()> {
        for s in op.finite_singularities() {
            for w in self.segments() {
                if segment_distance(w.0, w.1, s) < self.clearance {
                    return Err(HmlError::PathTooClose { point: format!("{s}") });
                }
            }
            if self.waypoints.len() == 1 && (self.waypoints[0] - s).norm() < self.clearance {
                return Err(HmlError::PathTooClose { point: format!("{s}") });
            }
        }
        Ok(())
    }

    /// Straight path with detours around singular points closer than
    /// `clearance`; detours pass on the left of the direction of travel.
    pub fn plan(op: &PFOperator, from: Complex64, to: Complex64, clearance: f64) -> Result<Self> {
        let mut waypoints = vec![from];
        let d = to - from;
        if d.norm() > 0.0 {
            let u = d / d.norm();
            let normal = u * Complex64::new(0.0, 1.0);
            let mut blockers: Vec<(f64, Complex64)> = op
                .finite_singularities()
                .into_iter()
                .filter(|&s| segment_distance(from, to, s) < clearance)
                .map(|s| (((s - from) * u.conj()).re, s))
                .collect();
            blockers.sort_by(|a, b| a.0.total_cmp(&b.0));
            let r = 2.0 * clearance;
            for (_, s) in blockers {
                waypoints.push(s - u * r + normal * r);
                waypoints.push(s + u * r + normal * r);
            }
        }
        waypoints.push(to);
        PathPlan::new(op, waypoints, clearance)
    }

    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        self.waypoints.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn start(&self) -> Complex64 {
        self.waypoints[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.waypoints.last().unwrap()
    }

    pub fn reversed(&self) -> Self {
        let mut w = self.waypoints.clone();
        w.reverse();
        PathPlan {
            waypoints: w,
            clearance: self.clearance,
        }
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picard_fuchs::operator::SingularPoint;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn op_with_singularity_at_one() -> PFOperator {
        let r = |n: i64| BigRational::from_integer(BigInt::from(n));
        PFOperator::new(
            vec![vec![], vec![r(1), r(-1)]],
            vec![
                SingularPoint::Finite(Complex64::new(0.0, 0.0)),
                SingularPoint::Finite(Complex64::new(1.0, 0.0)),
                SingularPoint::Infinity,
            ],
        )
        .unwrap()
    }

    #[test]
    fn detour_keeps_clearance() {
        let op = op_with_singularity_at_one();
        let p = PathPlan::plan(&op, Complex64::new(0.5, 0.0), Complex64::new(2.0, 0.0), 0.1).unwrap();
        assert_eq!(p.waypoints.len(), 4);
        for (a, b) in p.segments() {
            assert!(segment_distance(a, b, Complex64::new(1.0, 0.0)) >= 0.1);
        }
        assert!(p.waypoints[1].im > 0.0);
    }

    #[test]
    fn endpoint_on_singularity_is_rejected() {
        let op = op_with_singularity_at_one();
        let err = PathPlan::plan(&op, Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0), 0.1).unwrap_err();
        assert!(err.to_string().contains("path too close to singularity"));
    }
}
