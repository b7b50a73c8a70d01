// SPDX-License-Identifier: Apache-2.0

//! Numerical laboratory for self-avoiding walks, SLE and Brownian
//! restriction measures.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod brownian;
pub mod conformal;
pub mod curve;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod rng;
pub mod saw;
pub mod sle;
pub mod stats;

pub use error::{Error, Result};
