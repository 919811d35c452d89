//! Reduction of semi-explicit DAE thermal models into hybrid reduced models:
//! a retained DAE core closed by a calibrated linear layer, plus a
//! reconstruction layer for the discarded states.

// NaN-rejecting guards are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dae;
pub mod error;
pub mod hybrid;
pub mod layer;
pub mod metrics;
pub mod mor;
mod serde_util;
pub mod sim;
pub mod thermal;

pub use error::{Error, Result};
