use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::params::{ModelParams, Scenario};
use crate::topology::SpatialNetwork;

/// A set of disjoint node-index blocks in canonical order: each block
/// sorted, blocks ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition(Vec<Vec<usize>>);

impl Partition {
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Self {
        blocks.retain(|b| !b.is_empty());
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Partition(blocks)
    }

    /// Groups nodes by an arbitrary block label.
    pub fn from_labels<L: Eq + std::hash::Hash>(labels: impl IntoIterator<Item = L>) -> Self {
        let mut groups: HashMap<L, Vec<usize>> = HashMap::new();
        for (i, l) in labels.into_iter().enumerate() {
            groups.entry(l).or_default().push(i);
        }
        Partition::new(groups.into_values().collect())
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn largest(&self) -> usize {
        self.0.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Block index of every node.
    pub fn labels(&self, node_count: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; node_count];
        for (k, b) in self.0.iter().enumerate() {
            for &i in b {
                out[i] = k;
            }
        }
        out
    }

    /// Every block of `self` lies inside some block of `coarser`.
    pub fn refines(&self, coarser: &Partition, node_count: usize) -> bool {
        let labels = coarser.labels(node_count);
        self.0
            .iter()
            .all(|b| b.iter().all(|&i| labels[i] == labels[b[0]]))
    }

    /// Blocks are disjoint and cover `0..node_count` exactly once.
    pub fn covers(&self, node_count: usize) -> bool {
        let mut seen = vec![false; node_count];
        for &i in self.0.iter().flatten() {
            if i >= node_count || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn with_labels(&self, net: &dyn SpatialNetwork) -> Vec<Vec<String>> {
        self.0
            .iter()
            .map(|b| b.iter().map(|&i| net.node_label(i)).collect())
            .collect()
    }
}

/// A relay shortcut inserted by a reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shortcut {
    pub b: usize,
    pub c: usize,
    /// Effective distance before the reduction; `None` when unreachable.
    pub previous: Option<f64>,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Event {
    Merge {
        a: usize,
        b: usize,
        merged: usize,
        range_a: f64,
        range_b: f64,
        size: usize,
        range: f64,
        /// Effective distance that satisfied the criterion.
        distance: f64,
        /// Closest member pair without relays; `None` if no direct channel.
        direct_distance: Option<f64>,
        /// Whether only a relay shortcut made this merge possible.
        hopping: bool,
    },
    Reduce {
        component: usize,
        size: usize,
        range: f64,
        shortcuts: Vec<Shortcut>,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleCounts {
    pub merges: usize,
    pub reductions: usize,
    pub shortcuts: usize,
    pub hopping_merges: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineKind {
    /// Explicit state, reductions insert shortcuts pairwise.
    Shortcuts,
    /// Explicit state, reductions recompute distances by shortest paths.
    ShortestPath,
    /// Smallest-range-first driver with bounded Dijkstra searches.
    RangeOrdered,
}

/// Outcome of a percolation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub engine: EngineKind,
    pub node_count: usize,
    pub scenario: Scenario,
    pub params: ModelParams,
    pub base_range: f64,
    pub partition: Partition,
    pub giant_fraction: f64,
    pub counts: RuleCounts,
    pub events: Vec<Event>,
}

impl RunReport {
    /// Largest distance bridged by any merge, or 0 without merges.
    pub fn max_merge_distance(&self) -> f64 {
        self.events
            .iter()
            .filter_map(|e| match e {
                Event::Merge { distance, .. } => Some(*distance),
                _ => None,
            })
            .fold(0.0, f64::max)
    }

    /// Replays the event log and checks the run's invariants: every event
    /// touches live components only, nothing merges after its reduction,
    /// ranges never shrink, shortcuts only shorten distances, and the final
    /// partition covers every node exactly once.
    pub fn verify(&self) -> Result<()> {
        let n = self.node_count;
        if !self.partition.covers(n) {
            return Err(usage("final partition does not cover every node exactly once"));
        }
        let expect = self.partition.largest() as f64 / n as f64;
        if self.giant_fraction != expect {
            return Err(usage("giant fraction disagrees with the partition"));
        }

        #[derive(Clone)]
        enum Slot {
            Live { members: Vec<usize>, range: f64 },
            Merged,
            Removed,
        }
        let mut slots: Vec<Slot> = (0..n)
            .map(|i| Slot::Live {
                members: vec![i],
                range: self.base_range,
            })
            .collect();
        let mut blocks = Vec::new();
        let take = |slots: &mut Vec<Slot>, id: usize| -> Result<(Vec<usize>, f64)> {
            match slots.get(id).cloned() {
                Some(Slot::Live { members, range }) => Ok((members, range)),
                Some(Slot::Removed) => Err(usage(format!("component {id} used after its reduction"))),
                Some(Slot::Merged) => Err(usage(format!("component {id} used after it merged"))),
                None => Err(usage(format!("unknown component {id}"))),
            }
        };
        for event in &self.events {
            match event {
                Event::Merge {
                    a,
                    b,
                    merged,
                    range_a,
                    range_b,
                    size,
                    range,
                    distance,
                    ..
                } => {
                    let (ma, ra) = take(&mut slots, *a)?;
                    let (mb, rb) = take(&mut slots, *b)?;
                    if ra != *range_a || rb != *range_b {
                        return Err(usage(format!("merge {a}+{b} logs stale ranges")));
                    }
                    if !(*distance < ra.min(rb)) {
                        return Err(usage(format!("merge {a}+{b} violates the criterion")));
                    }
                    if *range < ra.max(rb) {
                        return Err(usage(format!("merge {a}+{b} shrank the range")));
                    }
                    if *merged != slots.len() || ma.len() + mb.len() != *size {
                        return Err(usage(format!("merge {a}+{b} has inconsistent bookkeeping")));
                    }
                    slots[*a] = Slot::Merged;
                    slots[*b] = Slot::Merged;
                    let mut members = ma;
                    members.extend(mb);
                    slots.push(Slot::Live {
                        members,
                        range: *range,
                    });
                }
                Event::Reduce {
                    component,
                    range,
                    shortcuts,
                    ..
                } => {
                    let (members, r) = take(&mut slots, *component)?;
                    if r != *range {
                        return Err(usage(format!("reduce {component} logs a stale range")));
                    }
                    if let Some(s) = shortcuts
                        .iter()
                        .find(|s| s.previous.is_some_and(|p| s.distance >= p))
                    {
                        return Err(usage(format!(
                            "shortcut {}-{} does not shorten the distance",
                            s.b, s.c
                        )));
                    }
                    slots[*component] = Slot::Removed;
                    blocks.push(members);
                }
            }
        }
        if slots.iter().any(|s| matches!(s, Slot::Live { .. })) {
            return Err(usage("run ended with active components"));
        }
        if Partition::new(blocks) != self.partition {
            return Err(usage("event log does not reproduce the final partition"));
        }
        Ok(())
    }
}

/// Largest block size over node count.
pub fn giant_fraction(report: &RunReport) -> f64 {
    report.giant_fraction
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_blocks() {
        let p = Partition::new(vec![vec![5, 3], vec![], vec![4, 0, 1], vec![2]]);
        assert_eq!(p.blocks(), &[vec![0, 1, 4], vec![2], vec![3, 5]]);
        assert!(p.covers(6));
        assert!(!p.covers(7));
        assert_eq!(p.largest(), 3);
    }

    #[test]
    fn from_labels_groups() {
        let p = Partition::from_labels([7, 7, 1, 7, 1]);
        assert_eq!(p.blocks(), &[vec![0, 1, 3], vec![2, 4]]);
    }

    #[test]
    fn refinement() {
        let fine = Partition::new(vec![vec![0], vec![1, 2], vec![3]]);
        let coarse = Partition::new(vec![vec![0, 1, 2], vec![3]]);
        assert!(fine.refines(&coarse, 4));
        assert!(!coarse.refines(&fine, 4));
        assert!(fine.refines(&fine, 4));
    }

    #[test]
    fn overlapping_blocks_do_not_cover() {
        let p = Partition(vec![vec![0, 1], vec![1, 2]]);
        assert!(!p.covers(3));
    }

    #[test]
    fn event_json_shape() {
        let e = Event::Reduce {
            component: 3,
            size: 2,
            range: 1.5,
            shortcuts: vec![Shortcut {
                b: 1,
                c: 2,
                previous: None,
                distance: 3.0,
            }],
        };
        let v = serde_json::to_value(&e).unwrap();
        assert_eq!(v["type"], "reduce");
        assert_eq!(v["shortcuts"][0]["previous"], serde_json::Value::Null);
    }
}
