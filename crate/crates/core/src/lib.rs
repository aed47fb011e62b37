//! Scenario engine for ranking transmission lines by expected wildfire damage.
//!
//! The pipeline: load a landscape, a grid and a weather year; place ignition
//! points along every line; spread a fire from each point under 32 seasonal
//! and wind-shifted weather variants; price the burned area and burned line
//! mileage; average per line with scenario weights; rank.

// `!(x >= 0.0)` rejects NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compass;
pub mod firesim;
pub mod geodata;
pub mod weather;
pub mod damage;
pub mod gridmodel;
pub mod prioritize;
pub mod scenario;
pub mod config;
pub mod engine;
pub mod report;
