//! Exponential-utility certainty equivalents and indifference prices in a
//! discretized Bachelier model.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discrete;
pub mod dual;
pub mod error;
pub mod interp;
pub mod kernels;
pub mod limit;
pub mod mc;
pub mod model;
pub mod policy;
pub mod quadrature;

pub use error::{Error, Result};
pub use mc::{Estimate, McConfig, RngStreamSpec};
pub use model::{FrictionSchedule, GridSpec, ModelParams, PayoffSpec};
