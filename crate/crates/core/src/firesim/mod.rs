//! Deterministic single-ignition fire spread.
//!
//! Arrival times are shortest travel times over a 8- or 16-neighbour raster
//! graph. Edge traversal time is step length over the mean of the two
//! endpoint directional rates of spread; see [`directional_ros`].

mod fuel;
mod ros;
mod spread;

use thiserror::Error;

use crate::geodata::CellIndex;

pub use crate::compass::Bearing;

pub use fuel::{FuelCatalog, FuelModel};
pub use ros::{
    directional_ros, fuel_factor, fuel_moisture, slope_factor, wind_factor, CellSite,
    MoistureCoefficients, Neighborhood, SpreadParams, MAX_MOISTURE, MIN_MOISTURE,
};
pub use spread::{
    site_at, spread, to_fire_status, ArrivalTimeMatrix, FireStatusMatrix, ScenarioSpread, SpreadKernel,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FireError {
    #[error("ignition cell (col {}, row {}) is outside the landscape", .0.col, .0.row)]
    IgnitionOutOfBounds(CellIndex),
    #[error("fuel code {code}: {msg}")]
    BadFuel { code: i32, msg: String },
    #[error("invalid spread parameters: {0}")]
    BadParams(String),
    #[error("raster dimensions do not match")]
    DimensionMismatch,
}
