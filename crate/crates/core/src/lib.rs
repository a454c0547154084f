//! Alpha-percolation model of quantum communication networks with
//! distributed quantum memories.

pub mod analysis;
pub mod cli;
pub mod engine;
pub mod error;
pub mod params;
pub mod quantum;
pub mod seed;
pub mod topology;

pub use error::{Error, Result};
pub use params::{ModelParams, RangeModel, Scenario};
