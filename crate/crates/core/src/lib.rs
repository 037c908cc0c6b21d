//! Normal conformal and projective Cartan connections on 2-frame bundles,
//! computed at points of a coordinate chart from truncated Taylor data, with
//! dressing-field reductions and tractor calculus.

pub mod cli;
pub mod dressing;
pub mod error;
pub mod expr;
pub mod fields;
pub mod forms;
pub mod groups;
pub mod jets;
pub mod metric;
pub mod report;
pub mod scalar;
pub mod spec;
pub mod suites;
pub mod taylor;

pub use error::{Error, Result};
