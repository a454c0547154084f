//! Giant-fraction curves over the decoherence length for the three memory
//! scenarios.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pool;
use super::stats::mean_std;
use crate::engine::run_ordered;
use crate::error::{validation, Error, Result};
use crate::params::{ModelParams, Scenario};
use crate::topology::SpatialNetwork;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Decoherence lengths, km, strictly increasing.
    pub d0_grid: Vec<f64>,
    pub scenarios: Vec<Scenario>,
    /// One network replicate per seed.
    pub seeds: Vec<u64>,
    /// Connectivity level reported by [`min_d0_on_grid`].
    pub target: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            d0_grid: log_grid(10.0, 10_000.0, 31),
            scenarios: Scenario::ALL.to_vec(),
            seeds: vec![1],
            target: 0.9,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d0_grid.is_empty() || self.d0_grid.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return Err(validation("d0 grid must be nonempty and positive"));
        }
        if self.d0_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(validation("d0 grid must be strictly increasing"));
        }
        if self.seeds.is_empty() {
            return Err(validation("at least one replicate seed is required"));
        }
        if self.scenarios.is_empty() {
            return Err(validation("at least one scenario is required"));
        }
        if !(self.target > 0.0 && self.target <= 1.0) {
            return Err(validation(format!("target must be in (0, 1], got {}", self.target)));
        }
        Ok(())
    }
}

/// `points` values spaced evenly in log between `lo` and `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![lo];
    }
    let step = (hi / lo).ln() / (points - 1) as f64;
    (0..points).map(|k| lo * (step * k as f64).exp()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub scenario: Scenario,
    pub d0_km: f64,
    pub seed: u64,
    pub p_inf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregatePoint {
    pub scenario: Scenario,
    pub d0_km: f64,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

/// Giant fraction of one network at one decoherence length.
pub fn giant_at<N: SpatialNetwork>(
    net: &N,
    params: &ModelParams,
    scenario: Scenario,
    d0: f64,
) -> Result<f64> {
    let p = (*params).with_d0(d0);
    Ok(run_ordered(net, &p, scenario)?.giant_fraction)
}

/// Runs every `(scenario, d0, seed)` cell. `build(seed)` yields the
/// replicate network for that seed. Rows come back in grid order
/// regardless of `jobs`.
pub fn sweep_connectivity<N, F>(
    build: F,
    params: &ModelParams,
    spec: &SweepSpec,
    jobs: usize,
) -> Result<Vec<CurvePoint>>
where
    N: SpatialNetwork + Send + Sync,
    F: Fn(u64) -> Result<N> + Sync,
{
    spec.validate()?;
    params.validate()?;
    pool(jobs)?.install(|| {
        let nets: Vec<N> = spec
            .seeds
            .par_iter()
            .map(|&s| build(s))
            .collect::<Result<_>>()?;
        let cells: Vec<(Scenario, f64, usize)> = spec
            .scenarios
            .iter()
            .flat_map(|&sc| {
                spec.d0_grid
                    .iter()
                    .flat_map(move |&d0| (0..spec.seeds.len()).map(move |k| (sc, d0, k)))
            })
            .collect();
        cells
            .into_par_iter()
            .map(|(scenario, d0_km, k)| {
                Ok(CurvePoint {
                    scenario,
                    d0_km,
                    seed: spec.seeds[k],
                    p_inf: giant_at(&nets[k], params, scenario, d0_km)?,
                })
            })
            .collect()
    })
}

/// Mean, standard deviation and count per `(scenario, d0)`, in input order.
pub fn aggregate(curve: &[CurvePoint]) -> Vec<AggregatePoint> {
    let mut out: Vec<(Scenario, f64, Vec<f64>)> = Vec::new();
    for p in curve {
        match out.iter_mut().find(|(s, d, _)| *s == p.scenario && *d == p.d0_km) {
            Some((_, _, v)) => v.push(p.p_inf),
            None => out.push((p.scenario, p.d0_km, vec![p.p_inf])),
        }
    }
    out.into_iter()
        .map(|(scenario, d0_km, v)| {
            let (mean, std) = mean_std(&v);
            AggregatePoint { scenario, d0_km, mean, std, n: v.len() }
        })
        .collect()
}

/// Smallest grid `d0` whose mean giant fraction reaches `target`.
pub fn min_d0_on_grid(agg: &[AggregatePoint], scenario: Scenario, target: f64) -> Option<f64> {
    agg.iter()
        .filter(|a| a.scenario == scenario && a.mean >= target)
        .map(|a| a.d0_km)
        .min_by(f64::total_cmp)
}

/// Bisects (in log `d0`) for the smallest decoherence length at which the
/// mean giant fraction over `nets` reaches `target`, to relative tolerance
/// `rel_tol`.
pub fn min_d0_for_target<N: SpatialNetwork + Sync>(
    nets: &[N],
    params: &ModelParams,
    scenario: Scenario,
    target: f64,
    bracket: (f64, f64),
    rel_tol: f64,
) -> Result<f64> {
    let mean_at = |d0: f64| -> Result<f64> {
        let v = nets
            .par_iter()
            .map(|n| giant_at(n, params, scenario, d0))
            .collect::<Result<Vec<_>>>()?;
        Ok(mean_std(&v).0)
    };
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo) || nets.is_empty() {
        return Err(validation("need 0 < low < high and at least one network"));
    }
    let (p_lo, p_hi) = (mean_at(lo)?, mean_at(hi)?);
    if p_lo >= target || p_hi < target {
        return Err(Error::NonBracketing {
            low: lo,
            high: hi,
            detail: format!("mean giant fraction {p_lo} .. {p_hi} against target {target}"),
        });
    }
    while hi / lo - 1.0 > rel_tol {
        let mid = (lo * hi).sqrt();
        if mean_at(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn write_curve_csv<W: Write>(out: W, rows: &[CurvePoint], comment: Option<&str>) -> Result<()> {
    let mut out = out;
    if let Some(c) = comment {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario", "d0_km", "seed", "p_inf"])?;
    for r in rows {
        w.write_record([
            r.scenario.as_str().to_owned(),
            r.d0_km.to_string(),
            r.seed.to_string(),
            r.p_inf.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_aggregate_csv<W: Write>(out: W, rows: &[AggregatePoint], comment: Option<&str>) -> Result<()> {
    let mut out = out;
    if let Some(c) = comment {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario", "d0_km", "mean", "std", "n"])?;
    for r in rows {
        w.write_record([
            r.scenario.as_str().to_owned(),
            r.d0_km.to_string(),
            r.mean.to_string(),
            r.std.to_string(),
            r.n.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
