//! Spin-diffusion eigenmodes of alkali vapor cells and their pump-driven coupled dynamics.

// `!(x > 0.0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dynamics;
pub mod eigenmodes;
pub mod error;
pub mod figures;
pub mod gas;
pub mod optics;
pub mod output;
pub mod selftest;
pub mod signal;

pub use error::{Error, Result};
