//! Thermal characterization of single-zone, multi-room houses from
//! smart-thermostat time series.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every estimator:
//! comfort indices, free-floating period extraction, gray-box RC/RQ/RK
//! identification, deficiency classification, fixed-effects panel
//! regression and the synthetic generators that serve as their oracles.
//! File formats, reports and the command line live in the `thermokit` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod comfort;
pub mod deficiency;
pub mod error;
pub mod ffp;
pub mod ingest;
pub mod lsq;
pub mod panel;
pub mod stats;
pub mod synth;
pub mod thermal;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
