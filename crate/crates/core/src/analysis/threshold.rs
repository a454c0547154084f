//! Percolation threshold of the base range on uniform point clouds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pool;
use super::stats::{bootstrap_mean_ci, mean_std};
use crate::engine::run_ordered;
use crate::error::{validation, Error, Result};
use crate::params::{ModelParams, Scenario};
use crate::seed::{self, Stream};
use crate::topology::{generate_uniform_points, PointCloud};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThresholdSpec {
    pub points: usize,
    pub box_side: f64,
    pub replicates: usize,
    /// Master seed; replicate `k` uses the cloud seeded by its sub-seed.
    pub seed: u64,
    /// Giant fraction that defines the crossing.
    pub target: f64,
    /// Absolute bisection tolerance on `r0`.
    pub tol: f64,
    /// Initial `(low, high)` bracket on `r0`.
    pub bracket: (f64, f64),
    pub resamples: usize,
    pub confidence: f64,
}

impl Default for ThresholdSpec {
    fn default() -> Self {
        ThresholdSpec {
            points: 2000,
            box_side: 1.0,
            replicates: 10,
            seed: 1,
            target: 0.5,
            tol: 1e-4,
            bracket: (1e-4, 0.5),
            resamples: 1000,
            confidence: 0.95,
        }
    }
}

impl ThresholdSpec {
    pub fn validate(&self) -> Result<()> {
        if self.points < 1 || self.replicates < 1 {
            return Err(validation("need at least one point and one replicate"));
        }
        if !(self.tol > 0.0) {
            return Err(validation(format!("tolerance must be positive, got {}", self.tol)));
        }
        if !(self.target > 0.0 && self.target <= 1.0) {
            return Err(validation(format!("target must be in (0, 1], got {}", self.target)));
        }
        let (lo, hi) = self.bracket;
        if !(lo > 0.0 && hi > lo) {
            return Err(validation(format!("bracket must satisfy 0 < low < high, got ({lo}, {hi})")));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(validation("confidence must be in (0, 1)"));
        }
        Ok(())
    }

    /// Cloud used by replicate `k`.
    pub fn cloud(&self, k: usize) -> Result<PointCloud> {
        let s = seed::derive(self.seed, Stream::Replicate, k as u64);
        generate_uniform_points(self.points, self.box_side, s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub alpha: f64,
    pub r0_th: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub replicates: usize,
}

impl ThresholdEstimate {
    /// Whether this interval lies strictly below `other`'s.
    pub fn separated_below(&self, other: &ThresholdEstimate) -> bool {
        self.ci_high < other.ci_low
    }
}

/// Giant fraction of `cloud` when every node starts with range `r0`.
pub fn giant_at_range(cloud: &PointCloud, params: &ModelParams, r0: f64) -> Result<f64> {
    let p = (*params).with_epsilon(params.epsilon_for_base_range(r0));
    Ok(run_ordered(cloud, &p, Scenario::Distributed)?.giant_fraction)
}

/// Smallest `r0` (to `tol`) at which the cloud's giant fraction reaches
/// `target`. The giant fraction is monotone in `r0`, so bisection applies.
pub fn crossing(cloud: &PointCloud, params: &ModelParams, target: f64, bracket: (f64, f64), tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    let (p_lo, p_hi) = (giant_at_range(cloud, params, lo)?, giant_at_range(cloud, params, hi)?);
    if p_lo >= target || p_hi < target {
        return Err(Error::NonBracketing {
            low: lo,
            high: hi,
            detail: format!("giant fraction {p_lo} .. {p_hi} against target {target}"),
        });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if giant_at_range(cloud, params, mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mean per-replicate crossing with a percentile bootstrap interval.
/// `params.alpha` selects the model; `epsilon` is driven by the search.
pub fn find_threshold(params: &ModelParams, spec: &ThresholdSpec, jobs: usize) -> Result<ThresholdEstimate> {
    spec.validate()?;
    params.validate()?;
    if spec.target <= 1.0 / spec.points as f64 {
        return Ok(ThresholdEstimate {
            alpha: params.alpha,
            r0_th: 0.0,
            ci_low: 0.0,
            ci_high: 0.0,
            replicates: spec.replicates,
        });
    }
    let crossings: Vec<f64> = pool(jobs)?.install(|| {
        (0..spec.replicates)
            .into_par_iter()
            .map(|k| crossing(&spec.cloud(k)?, params, spec.target, spec.bracket, spec.tol))
            .collect::<Result<_>>()
    })?;
    let (mean, _) = mean_std(&crossings);
    let (ci_low, ci_high) = bootstrap_mean_ci(&crossings, spec.resamples, spec.confidence, spec.seed);
    Ok(ThresholdEstimate {
        alpha: params.alpha,
        r0_th: mean,
        ci_low,
        ci_high,
        replicates: spec.replicates,
    })
}
