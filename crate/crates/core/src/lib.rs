//! Lieb-Robinson speed limits for state transfer and entanglement generation
//! on spin networks, with an exact small-system simulator to check them.

#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bessel;
pub mod control;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod lr;
pub mod qsl;
pub mod sim;
pub mod task;

pub use error::{Error, Result};
pub use graph::{Region, SpinGraph};
