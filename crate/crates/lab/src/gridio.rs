//! Grid files on disk. The byte layout is defined by
//! [`FieldGrid::encode`](mcmullen_core::FieldGrid::encode).

use std::fs;
use std::path::Path;

use mcmullen_core::FieldGrid;
use sha2::{Digest, Sha256};

use crate::LabError;

pub fn write_grid(grid: &FieldGrid, path: &Path) -> Result<(), LabError> {
    fs::write(path, grid.encode()).map_err(|e| LabError::io(path, e))
}

pub fn read_grid(path: &Path) -> Result<FieldGrid, LabError> {
    let bytes = fs::read(path).map_err(|e| LabError::io(path, e))?;
    FieldGrid::decode(&bytes).map_err(|source| LabError::Format { path: path.into(), source })
}

/// Hex SHA-256 of the encoded grid, equal to the hash of the written file.
pub fn grid_sha256(grid: &FieldGrid) -> String {
    hex::encode(Sha256::digest(grid.encode()))
}
