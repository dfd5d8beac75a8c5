//! Parallel rendering, grid files, PNG output, configuration and the
//! `mcmullen` command line on top of [`mcmullen_core`].

pub mod cli;
pub mod config;
mod error;
pub mod gridio;
pub mod image;
pub mod render;
pub mod report;

pub use error::{exit, LabError};
