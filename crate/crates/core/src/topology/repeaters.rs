use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::{EdgeListNetwork, NodeKind};
use crate::error::{validation, Result};
use crate::seed::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepeaterConfig {
    /// Mean spacing between repeaters along a cable, km.
    pub mean_segment_km: f64,
    pub seed: u64,
}

impl Default for RepeaterConfig {
    fn default() -> Self {
        RepeaterConfig {
            mean_segment_km: 50.0,
            seed: 0,
        }
    }
}

impl RepeaterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mean_segment_km > 0.0 && self.mean_segment_km.is_finite() {
            Ok(())
        } else {
            Err(validation(format!(
                "mean segment length must be positive, got {}",
                self.mean_segment_km
            )))
        }
    }
}

/// Cuts every cable at the points of a homogeneous Poisson process of
/// intensity `1 / mean_segment_km` and places a repeater at each cut.
///
/// Edge `k` (in insertion order) draws from its own sub-seed, so the result
/// depends only on the network and the config.
pub fn insert_repeaters(net: &EdgeListNetwork, cfg: &RepeaterConfig) -> Result<EdgeListNetwork> {
    cfg.validate()?;
    let gap = Exp::new(1.0 / cfg.mean_segment_km).expect("positive rate");
    let cuts = net
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let mut rng = seed::stream_rng(cfg.seed, Stream::Repeaters, k as u64);
            let mut points: Vec<f64> = Vec::new();
            let mut t = 0.0;
            loop {
                let next = t + gap.sample(&mut rng);
                if next >= e.length_km {
                    break points;
                }
                // Zero-length segments are not representable.
                if next > t {
                    points.push(next);
                    t = next;
                }
            }
        })
        .collect::<Vec<_>>();
    Ok(splice(net, &cuts))
}

/// Places exactly `count` repeaters i.i.d. uniformly over the total cable
/// length: a Poisson process conditioned on its point count. Used when the
/// final node count has to be hit exactly.
pub fn insert_repeaters_with_count(
    net: &EdgeListNetwork,
    count: usize,
    seed: u64,
) -> Result<EdgeListNetwork> {
    if net.edge_count() == 0 && count > 0 {
        return Err(validation("cannot place repeaters on a network without cables"));
    }
    let offsets: Vec<f64> = net
        .edges()
        .iter()
        .scan(0.0, |acc, e| {
            let start = *acc;
            *acc += e.length_km;
            Some(start)
        })
        .collect();
    let total = net.total_length();
    let mut rng = seed::stream_rng(seed, Stream::Repeaters, u64::MAX);
    let mut cuts = vec![Vec::new(); net.edge_count()];
    let mut placed = 0;
    while placed < count {
        let x = rng.random::<f64>() * total;
        let k = offsets.partition_point(|&o| o <= x).saturating_sub(1);
        let t = x - offsets[k];
        let len = net.edges()[k].length_km;
        if t > 0.0 && t < len && !cuts[k].contains(&t) {
            cuts[k].push(t);
            placed += 1;
        }
    }
    for c in &mut cuts {
        c.sort_by(f64::total_cmp);
    }
    Ok(splice(net, &cuts))
}

/// Rebuilds `net` with each edge `k` split at the sorted offsets `cuts[k]`.
fn splice(net: &EdgeListNetwork, cuts: &[Vec<f64>]) -> EdgeListNetwork {
    let mut out = EdgeListNetwork::new();
    for (i, id) in net.ids().iter().enumerate() {
        out.add_node(id, net.kind(i), net.coords(i));
    }
    for (e, points) in net.edges().iter().zip(cuts) {
        if points.is_empty() {
            out.add_edge(e.u, e.v, e.length_km).expect("copied edge");
            continue;
        }
        let (pu, pv) = (net.coords(e.u), net.coords(e.v));
        let mut prev_node = e.u;
        let mut prev_t = 0.0;
        for (j, &t) in points.iter().enumerate() {
            let coords = match (pu, pv) {
                (Some(a), Some(b)) => {
                    let f = t / e.length_km;
                    Some([a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])])
                }
                _ => None,
            };
            let id = fresh_id(&out, &format!("{}~{}#{}", net.ids()[e.u], net.ids()[e.v], j + 1));
            let node = out.add_node(&id, NodeKind::Repeater, coords);
            out.add_edge(prev_node, node, t - prev_t).expect("positive segment");
            prev_node = node;
            prev_t = t;
        }
        out.add_edge(prev_node, e.v, e.length_km - prev_t)
            .expect("positive segment");
    }
    out
}

fn fresh_id(net: &EdgeListNetwork, base: &str) -> String {
    if net.index_of(base).is_none() {
        return base.to_owned();
    }
    (1..)
        .map(|k| format!("{base}.{k}"))
        .find(|id| net.index_of(id).is_none())
        .expect("unbounded suffixes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::SpatialNetwork;

    fn single_cable(len: f64) -> EdgeListNetwork {
        let mut net = EdgeListNetwork::new();
        net.add_edge_by_id("A", "B", len).unwrap();
        net
    }

    fn segments_between(net: &EdgeListNetwork) -> f64 {
        net.edges().iter().map(|e| e.length_km).sum()
    }

    #[test]
    fn short_cable_can_stay_whole() {
        // Find a seed with no cut on a 1 km cable at 50 km mean spacing.
        let net = single_cable(1.0);
        let out = (0..20)
            .map(|seed| {
                insert_repeaters(&net, &RepeaterConfig { mean_segment_km: 50.0, seed }).unwrap()
            })
            .find(|o| o.repeater_count() == 0)
            .expect("P(no cut) = e^-0.02");
        assert_eq!(out, net);
    }

    #[test]
    fn conserves_length_and_connectivity() {
        let mut net = EdgeListNetwork::new();
        net.add_edge_by_id("A", "B", 512.5).unwrap();
        net.add_edge_by_id("B", "C", 77.0).unwrap();
        net.add_edge_by_id("C", "A", 1300.25).unwrap();
        net.add_node("D", NodeKind::Station, None);
        for seed in 0..25 {
            let out = insert_repeaters(&net, &RepeaterConfig { mean_segment_km: 50.0, seed }).unwrap();
            assert!((segments_between(&out) - net.total_length()).abs() < 1e-9);
            assert_eq!(out.classical_components(), net.classical_components());
            assert_eq!(out.node_count(), net.ids().len() + out.repeater_count());
            assert_eq!(out.edge_count(), net.edge_count() + out.repeater_count());
        }
    }

    #[test]
    fn per_cable_sums_are_exact_to_rounding() {
        let net = single_cable(987.654);
        let out = insert_repeaters(&net, &RepeaterConfig { mean_segment_km: 50.0, seed: 4 }).unwrap();
        let sum: f64 = out.edges().iter().map(|e| e.length_km).sum();
        let k = out.edge_count() as f64;
        assert!((sum - 987.654).abs() <= k * f64::EPSILON * 987.654);
        assert!(out.edges().iter().all(|e| e.length_km > 0.0));
    }

    #[test]
    fn deterministic_per_seed() {
        let net = single_cable(700.0);
        let cfg = RepeaterConfig { mean_segment_km: 50.0, seed: 9 };
        assert_eq!(insert_repeaters(&net, &cfg).unwrap(), insert_repeaters(&net, &cfg).unwrap());
    }

    #[test]
    fn poisson_mean_on_long_cable() {
        let net = single_cable(500.0);
        let trials = 10_000;
        let total: usize = (0..trials)
            .map(|seed| {
                insert_repeaters(&net, &RepeaterConfig { mean_segment_km: 50.0, seed })
                    .unwrap()
                    .repeater_count()
            })
            .sum();
        let mean = total as f64 / trials as f64;
        let sigma = (10.0 / trials as f64).sqrt();
        assert!((mean - 10.0).abs() <= 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn exact_count_variant() {
        let mut net = EdgeListNetwork::new();
        net.add_edge_by_id("A", "B", 400.0).unwrap();
        net.add_edge_by_id("B", "C", 100.0).unwrap();
        let out = insert_repeaters_with_count(&net, 9, 1).unwrap();
        assert_eq!(out.repeater_count(), 9);
        assert_eq!(out.edge_count(), 11);
        assert!((segments_between(&out) - 500.0).abs() < 1e-9);
        assert!(insert_repeaters_with_count(&EdgeListNetwork::new(), 1, 0).is_err());
    }

    #[test]
    fn rejects_bad_config() {
        let net = single_cable(10.0);
        assert!(insert_repeaters(&net, &RepeaterConfig { mean_segment_km: 0.0, seed: 0 }).is_err());
    }
}
