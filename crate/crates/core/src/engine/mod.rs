//! Fixed-point percolation machine: connection criterion, contraction,
//! isolation and reduction.

mod ordered;
mod report;
mod state;

pub use ordered::run_ordered;
pub use report::{giant_fraction, EngineKind, Event, Partition, RuleCounts, RunReport, Shortcut};
pub use state::{percolate, MergePolicy, PercolationState, ReductionMode};
