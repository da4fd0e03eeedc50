//! File formats, pipeline stages and command line for `thermokit-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod fmt;
pub mod io;
pub mod manifest;
pub mod mapping;
pub mod report;
pub mod schema;
pub mod stages;

pub use error::{Error, Result};
