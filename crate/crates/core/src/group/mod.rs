//! Concrete groups: arithmetic, exponential and logarithm maps, metrics and
//! trace functionals.

pub mod algebra;
mod context;
mod density;
mod element;
pub mod linalg;
mod metric;
pub mod random;

pub use context::{GroupContext, GroupKind};
pub use density::DensityState;
pub use element::{AlgebraElement, GroupElement, Payload};
pub use metric::{matrix_norm, MetricKind};
