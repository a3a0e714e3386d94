use std::io;

use thiserror::Error;

/// Errors produced anywhere in the simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid wavelength grid: {0}")]
    InvalidGrid(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("unit mismatch: expected {expected}, found {found}")]
    UnitMismatch { expected: String, found: String },

    #[error("wavelength grids differ")]
    GridMismatch,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("geometry error in {primitive}: {reason}")]
    Geometry { primitive: String, reason: String },

    #[error("scene parse error at `{path}`: {reason}")]
    SceneParse { path: String, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported Zernike index j={0}")]
    UnsupportedZernike(usize),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("slanted-edge analysis failed: {0}")]
    EdgeDetection(String),

    #[error("region out of bounds: {0}")]
    OutOfBounds(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
