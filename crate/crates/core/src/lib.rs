//! Real-time dynamics of one-dimensional single-electron emitters coupled
//! self-consistently to electromagnetic environments through local
//! radiation-reaction potentials.
//!
//! Everything is in Hartree atomic units; see [`units`] for conversions.

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod drive;
pub mod environment;
pub mod error;
pub mod propagate;
pub mod quantum;
pub mod scenario;
pub mod theory;
pub mod units;

pub use error::{Error, Result};
