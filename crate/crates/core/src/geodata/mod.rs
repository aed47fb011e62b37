//! Raster model, landscape ingestion and polyline rasterization.
//!
//! Coordinates are planar miles with a lower-left origin. Row 0 is the
//! southernmost row, so `y` grows with the row index.

mod ascii;
mod landscape;
mod raster;
mod rasterize;

use thiserror::Error;

pub use ascii::{parse_ascii_grid, parse_ascii_header, write_ascii_grid, AsciiHeader};
pub use landscape::{load_landscape, LandscapeStack, Layer};
pub use raster::{cell_area_acres, CellIndex, GridGeometry, Raster, ACRES_PER_SQ_MILE};
pub use rasterize::rasterize_polyline;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("raster must have at least one row and column")]
    EmptyRaster,
    #[error("cell size must be positive and finite, got {0}")]
    BadCellSize(f64),
    #[error("raster origin must be finite")]
    BadOrigin,
    #[error("expected {expected} values, found {found}")]
    ValueCount { expected: usize, found: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("point ({x}, {y}) lies outside the raster extent")]
    OutOfExtent { x: f64, y: f64 },
    #[error("polyline needs at least 2 vertices, got {0}")]
    DegeneratePolyline(usize),
    #[error("missing layer file {0}")]
    MissingLayer(String),
    #[error("{layer} header does not match the elevation header")]
    HeaderMismatch { layer: &'static str },
    #[error("unknown fuel code {code} at col {}, row {}", cell.col, cell.row)]
    UnknownFuel { code: i32, cell: CellIndex },
    #[error("{layer} value {value} out of range at col {}, row {}", cell.col, cell.row)]
    InvalidValue {
        layer: &'static str,
        cell: CellIndex,
        value: f64,
    },
    #[error("{layer}: {source}")]
    InLayer {
        layer: &'static str,
        #[source]
        source: Box<GeoError>,
    },
    #[error("{0}")]
    Io(String),
}
