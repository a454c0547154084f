//! Synthetic stand-in for a pan-continental fiber backbone.
//!
//! Stations are scattered uniformly over a rectangle and wired into a planar
//! graph: the Euclidean minimum spanning tree plus the shortest non-crossing
//! chords. Coordinates are rescaled so the mean cable length hits a target,
//! and repeaters are then dropped onto the cables until the final node and
//! link counts match the request exactly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::repeaters::insert_repeaters_with_count;
use super::{EdgeListNetwork, NodeKind};
use crate::error::{validation, Result};
use crate::seed::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberSpec {
    /// Final node count, stations plus repeaters.
    pub nodes: usize,
    /// Final link count after segmentation.
    pub links: usize,
    /// Mean cable length before segmentation, km.
    pub mean_cable_km: f64,
    /// Mean segment length after segmentation, km.
    pub mean_segment_km: f64,
    /// Width over height of the station region.
    pub aspect: f64,
    pub seed: u64,
}

impl Default for FiberSpec {
    fn default() -> Self {
        FiberSpec {
            nodes: 692,
            links: 733,
            mean_cable_km: 500.0,
            mean_segment_km: 50.0,
            aspect: 1.3,
            seed: 1,
        }
    }
}

impl FiberSpec {
    /// `(stations, cables)` implied by the counts and length targets.
    pub fn backbone_size(&self) -> Result<(usize, usize)> {
        if self.links + 1 < self.nodes {
            return Err(validation(format!(
                "{} links cannot connect {} nodes",
                self.links, self.nodes
            )));
        }
        if !(self.mean_cable_km > 0.0 && self.mean_segment_km > 0.0 && self.aspect > 0.0) {
            return Err(validation("lengths and aspect must be positive"));
        }
        let cycles = self.links + 1 - self.nodes;
        let total = self.links as f64 * self.mean_segment_km;
        let cables = ((total / self.mean_cable_km).round() as usize).max(cycles + 2);
        let stations = cables + 1 - cycles;
        if stations > self.nodes {
            return Err(validation("length targets need more stations than nodes"));
        }
        if stations >= 3 && cables > 3 * stations - 6 {
            return Err(validation(format!(
                "{cables} cables on {stations} stations cannot be planar"
            )));
        }
        Ok((stations, cables))
    }
}

/// Station backbone before repeater insertion.
pub fn synthetic_backbone(spec: &FiberSpec) -> Result<EdgeListNetwork> {
    let (stations, cables) = spec.backbone_size()?;
    let mut rng = seed::stream_rng(spec.seed, Stream::Fiber, 0);
    let pts: Vec<[f64; 2]> = (0..stations)
        .map(|_| [rng.random::<f64>() * spec.aspect, rng.random::<f64>()])
        .collect();

    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(stations * stations / 2);
    for i in 0..stations {
        for j in i + 1..stations {
            pairs.push((dist(pts[i], pts[j]), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    // Kruskal, then greedy planar chords.
    let mut parent: Vec<usize> = (0..stations).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut chosen: Vec<(usize, usize)> = Vec::with_capacity(cables);
    let mut rest = Vec::new();
    for &(_, i, j) in &pairs {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
            chosen.push((i, j));
        } else {
            rest.push((i, j));
        }
    }
    for (i, j) in rest {
        if chosen.len() >= cables {
            break;
        }
        if chosen
            .iter()
            .all(|&(a, b)| !segments_cross(pts[i], pts[j], pts[a], pts[b]))
        {
            chosen.push((i, j));
        }
    }
    if chosen.len() < cables {
        return Err(validation(format!(
            "only {} planar cables fit on {stations} stations, {cables} requested",
            chosen.len()
        )));
    }

    let mean = chosen.iter().map(|&(i, j)| dist(pts[i], pts[j])).sum::<f64>() / cables as f64;
    let scale = spec.mean_cable_km / mean;
    let mut net = EdgeListNetwork::new();
    for (i, p) in pts.iter().enumerate() {
        net.add_node(
            &format!("ST{i:03}"),
            NodeKind::Station,
            Some([p[0] * scale, p[1] * scale]),
        );
    }
    for (i, j) in chosen {
        net.add_edge(i, j, dist(pts[i], pts[j]) * scale)?;
    }
    Ok(net)
}

/// Backbone plus repeaters, with exactly `spec.nodes` nodes and `spec.links` links.
pub fn synthetic_fiber(spec: &FiberSpec) -> Result<EdgeListNetwork> {
    let backbone = synthetic_backbone(spec)?;
    let repeaters = spec.nodes - backbone.ids().len();
    insert_repeaters_with_count(&backbone, repeaters, seed::derive(spec.seed, Stream::Fiber, 1))
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Proper crossing; segments sharing an endpoint do not cross.
fn segments_cross(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    if p1 == q1 || p1 == q2 || p2 == q1 || p2 == q2 {
        return false;
    }
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}
