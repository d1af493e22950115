//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The label map has a single label, so boundary directions are undefined.
    #[error("degenerate segmentation: label map has a single label")]
    DegenerateSegmentation,

    /// A nearest-site query was made against an empty site set.
    #[error("no boundary: site set is empty")]
    NoBoundary,

    /// Two rasters that must share dimensions do not.
    #[error("dimension mismatch: {0}x{1} vs {2}x{3} (width x height)")]
    DimensionMismatch(u32, u32, u32, u32),

    /// A configuration value violates its documented range.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A raster constructor was given inconsistent data.
    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    /// A file did not conform to its declared format.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
