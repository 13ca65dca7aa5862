//! Exact cohomology model of a flat polarized torus: wedge products, the
//! Lefschetz operator and decomposition, the polarization `Q`, the Hodge
//! inner product and the primitive-norm identity. No floating point.

pub mod exact;
mod form;
mod model;

pub use exact::ExactComplex;
pub use form::{mask_indices, subsets, ConstantForm, IndexMask};
pub use model::{KahlerModel, PrimitiveDecomposition};
