use std::io;
use std::path::PathBuf;

use mcmullen_core::cantor::CantorError;
use mcmullen_core::geometry::GeometryError;
use mcmullen_core::surgery::SurgeryError;
use mcmullen_core::{DynamicsError, GridError, TrichotomyError};
use thiserror::Error;

/// Process exit codes shared by every subcommand.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const INDETERMINATE: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: GridError },
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("payload value {0} has no palette entry")]
    Unmapped(i32),
    #[error("verdict palette is missing code {0}")]
    IncompletePalette(i32),
    #[error("png encoding failed: {0}")]
    Png(#[from] png::EncodingError),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Trichotomy(#[from] TrichotomyError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
    #[error(transparent)]
    Cantor(#[from] CantorError),
}

impl LabError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Io { .. } | LabError::Format { .. } | LabError::Png(_) | LabError::Pool(_) => exit::IO,
            _ => exit::USAGE,
        }
    }
}
