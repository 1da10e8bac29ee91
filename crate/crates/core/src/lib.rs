//! Partition polynomials, their dilogarithm-driven phase structure, and the
//! zero attractors the polynomial zeros accumulate on.

pub mod cli;
pub mod curve;
pub mod error;
pub mod harness;
pub mod partition;
pub mod phase;
pub mod roots;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
