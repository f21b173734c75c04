// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exact;
pub mod field;
pub mod gallery;
pub mod harness;
pub mod io;
pub mod maxop;
pub mod norms;
pub mod profile;
pub mod regularity;
pub mod space;

pub use error::{Error, Result};
pub use field::ScalarField;
pub use space::{build_space, Geometry, MetricKind, MetricMeasureSpace, MetricSpec, SpaceKind};
