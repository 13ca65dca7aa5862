//! The mirror quintic: `θ⁴ − 5⁵ z (θ + 1/5)(θ + 2/5)(θ + 3/5)(θ + 4/5)`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::Result;
use crate::linalg::{cz, CMatrix};
use crate::picard_fuchs::{PFOperator, PeriodSolver, SingularPoint, DEFAULT_SERIES_ORDER, DEFAULT_TOL};
use crate::vhs::PfFamily;

pub const ZETA3: f64 = 1.202_056_903_159_594_3;

/// Conifold point `5⁻⁵`.
pub const CONIFOLD: f64 = 1.0 / 3125.0;

/// `h^{1,1}` of the quintic threefold mirror partner; `h^{2,1} = 1`.
pub const H11: usize = 101;

pub const EULER_CHARACTERISTIC: i64 = 200;

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// θ-coefficients `P_j(z)`, lowest degree first.
pub fn theta_coefficients() -> Vec<Vec<BigRational>> {
    vec![
        vec![int(0), int(-120)],
        vec![int(0), int(-1250)],
        vec![int(0), int(-4375)],
        vec![int(0), int(-6250)],
        vec![int(1), int(-3125)],
    ]
}

pub fn singular_points() -> Vec<SingularPoint> {
    vec![
        SingularPoint::Finite(cz(0.0, 0.0)),
        SingularPoint::Finite(cz(CONIFOLD, 0.0)),
        SingularPoint::Infinity,
    ]
}

pub fn operator() -> PFOperator {
    PFOperator::new(theta_coefficients(), singular_points()).expect("quintic operator is valid")
}

/// Integral symplectic periods in terms of the normalized Frobenius basis
/// `ϖ̃_j = ϖ_j / (2πi)^j`: `(1, t, ∂F/∂t, 2F − t ∂F/∂t)` up to the standard
/// constant terms `c₂·H/24 = 25/12`, `−11/2` and `−25 ζ(3) i / π³`.
pub fn flat_basis() -> CMatrix {
    let kappa = 5.0;
    let a = -11.0 / 2.0;
    let c = 25.0 / 12.0;
    let e = cz(0.0, -25.0 * ZETA3 / PI.powi(3));
    let o = cz(0.0, 0.0);
    #[rustfmt::skip]
    let m = CMatrix::from_row_slice(
        4,
        4,
        &[
            cz(1.0, 0.0), o, o, o,
            o, cz(1.0, 0.0), o, o,
            cz(c, 0.0), cz(a, 0.0), cz(-kappa, 0.0), o,
            e, cz(c, 0.0), o, cz(kappa, 0.0),
        ],
    );
    m
}

/// Symplectic pairing in the flat basis.
pub fn polarization() -> CMatrix {
    let mut q = CMatrix::zeros(4, 4);
    q[(3, 0)] = cz(1.0, 0.0);
    q[(0, 3)] = cz(-1.0, 0.0);
    q[(2, 1)] = cz(1.0, 0.0);
    q[(1, 2)] = cz(-1.0, 0.0);
    q
}

pub fn family() -> Result<PfFamily> {
    let solver = PeriodSolver::new(operator(), DEFAULT_SERIES_ORDER, DEFAULT_TOL)?;
    PfFamily::new("quintic", 3, solver, flat_basis(), polarization())
}
