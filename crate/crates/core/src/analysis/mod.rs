//! Experiment harness: connectivity sweeps, threshold search and the
//! distillation complexity calculator.

mod complexity;
mod stats;
mod sweep;
mod threshold;

pub use complexity::{
    coherence_time, complexity_f, interpolate_f, ln_complexity_f, worst_case_n, ComplexityParams,
    Interpolation,
};
pub use stats::{bootstrap_mean_ci, mean_std};
pub use sweep::{
    aggregate, giant_at, log_grid, min_d0_for_target, min_d0_on_grid, sweep_connectivity,
    write_aggregate_csv, write_curve_csv, AggregatePoint, CurvePoint, SweepSpec,
};
pub use threshold::{crossing, find_threshold, giant_at_range, ThresholdEstimate, ThresholdSpec};

use crate::error::{validation, Result};

/// Worker pool capped at `jobs` threads (at least one).
pub(crate) fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| validation(format!("cannot start {jobs} workers: {e}")))
}
