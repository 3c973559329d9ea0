//! Spectral solvers for a thin-layer polluted atmosphere and its hydrostatic
//! limit, with the diagnostics used to measure convergence between them.

pub mod analysis;
pub mod aniso;
pub mod error;
pub mod fields;
pub mod forcing;
pub mod harness;
pub mod hydro;
pub mod mms;
pub mod model;
mod ops;

pub use error::{Error, Result};
