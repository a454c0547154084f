//! Spatial networks: point clouds, fiber edge lists, repeater insertion and a
//! synthetic pan-continental fiber generator.

mod cloud;
mod edge_list;
mod fiber;
mod repeaters;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use cloud::{euclidean_distance, generate_uniform_points, PointCloud};
pub use edge_list::{load_edge_list, load_edge_list_with_nodes, Edge, EdgeListNetwork};
pub use fiber::{synthetic_backbone, synthetic_fiber, FiberSpec};
pub use repeaters::{insert_repeaters, insert_repeaters_with_count, RepeaterConfig};

use crate::error::Result;

/// Node-level distance oracle consumed by the percolation engines.
pub trait SpatialNetwork {
    fn node_count(&self) -> usize;

    /// Distance in km, `f64::INFINITY` when no channel exists.
    fn distance(&self, i: usize, j: usize) -> f64;

    /// Calls `visit(j, d_ij)` for every `j != i` with `d_ij < radius`.
    fn for_each_neighbor(&self, i: usize, radius: f64, visit: &mut dyn FnMut(usize, f64));

    fn node_label(&self, i: usize) -> String {
        i.to_string()
    }

    /// All pairs `i < j` at finite distance.
    fn finite_pairs(&self) -> Vec<(usize, usize, f64)> {
        let mut pairs = Vec::new();
        for i in 0..self.node_count() {
            self.for_each_neighbor(i, f64::INFINITY, &mut |j, d| {
                if i < j {
                    pairs.push((i, j, d));
                }
            });
        }
        pairs
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    #[default]
    Station,
    Repeater,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Station => "station",
            NodeKind::Repeater => "repeater",
        }
    }
}

/// Either network flavour, for callers that pick one at runtime.
#[derive(Debug, Clone)]
pub enum Network {
    Cloud(PointCloud),
    EdgeList(EdgeListNetwork),
}

impl Network {
    pub fn to_json(&self) -> NetworkJson {
        match self {
            Network::Cloud(c) => c.to_json(),
            Network::EdgeList(e) => e.to_json(),
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json())?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

impl SpatialNetwork for Network {
    fn node_count(&self) -> usize {
        match self {
            Network::Cloud(c) => c.node_count(),
            Network::EdgeList(e) => e.node_count(),
        }
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        match self {
            Network::Cloud(c) => c.distance(i, j),
            Network::EdgeList(e) => e.distance(i, j),
        }
    }

    fn for_each_neighbor(&self, i: usize, radius: f64, visit: &mut dyn FnMut(usize, f64)) {
        match self {
            Network::Cloud(c) => c.for_each_neighbor(i, radius, visit),
            Network::EdgeList(e) => e.for_each_neighbor(i, radius, visit),
        }
    }

    fn node_label(&self, i: usize) -> String {
        match self {
            Network::Cloud(c) => c.node_label(i),
            Network::EdgeList(e) => e.node_label(i),
        }
    }
}

impl From<PointCloud> for Network {
    fn from(c: PointCloud) -> Self {
        Network::Cloud(c)
    }
}

impl From<EdgeListNetwork> for Network {
    fn from(e: EdgeListNetwork) -> Self {
        Network::EdgeList(e)
    }
}

/// JSON export shape: `{nodes: [{id, kind, x?, y?}], edges: [{u, v, length_km}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkJson {
    pub nodes: Vec<NodeJson>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeJson {
    pub id: String,
    pub kind: NodeKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub u: String,
    pub v: String,
    pub length_km: f64,
}
