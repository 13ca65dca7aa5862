//! Weil–Petersson, Hodge and generalized Hodge metrics on Calabi–Yau moduli
//! computed from period data, with the complex Hessian of the BCOV torsion
//! and residual checks of the identities relating them.

pub mod config;
pub mod convention;
pub mod error;
pub mod exterior;
pub mod fd;
pub mod linalg;
pub mod metrics;
pub mod picard_fuchs;
pub mod poincare;
pub mod quintic;
pub mod vhs;

pub use error::{HmlError, Result};
