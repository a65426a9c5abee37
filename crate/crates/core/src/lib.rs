//! Room-occupancy forecasting from per-minute HVAC telemetry with a
//! from-scratch LSTM, and estimation of the energy an occupancy-driven
//! controller would save over the measured rule-based operation.

pub mod cli;
pub mod energy;
pub mod error;
mod fsutil;
pub mod lstm;
pub mod metrics;
pub mod pipeline;
pub mod plot;
pub mod synthgen;
pub mod timeseries;

pub use error::{Error, Result};
