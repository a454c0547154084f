//! Smallest-range-first driver.
//!
//! The effective distance between two active components equals the
//! shortest node-level path whose interior runs only through removed
//! components, with routing inside a removed component free. So instead of
//! materialising shortcuts, each step pops the active component `c` with
//! the smallest range and searches outward from its members up to `r_c`.
//! The first other active component met is within `min(r_c, r_b) = r_c`
//! and merges; if none is met, `c` is isolated and is removed.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::report::{EngineKind, Event, Partition, RuleCounts, RunReport};
use super::state::Dist;
use crate::error::{domain, Result};
use crate::params::{ModelParams, RangeModel, Scenario};
use crate::topology::SpatialNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Active,
    Merged,
    Removed,
}

struct Search {
    dist: Vec<f64>,
    stamp: Vec<u32>,
    opened: Vec<u32>,
    epoch: u32,
}

impl Search {
    fn new(nodes: usize, comps: usize) -> Self {
        Search {
            dist: vec![f64::INFINITY; nodes],
            stamp: vec![0; nodes],
            opened: vec![0; comps],
            epoch: 0,
        }
    }

    fn get(&self, i: usize) -> f64 {
        if self.stamp[i] == self.epoch {
            self.dist[i]
        } else {
            f64::INFINITY
        }
    }

    fn set(&mut self, i: usize, d: f64) {
        self.stamp[i] = self.epoch;
        self.dist[i] = d;
    }
}

/// Runs the model with the range-ordered driver. Produces the same
/// partition as [`super::percolate`]; reduce events carry no shortcut list
/// because no shortcuts are materialised.
pub fn run_ordered(
    network: &dyn SpatialNetwork,
    params: &ModelParams,
    scenario: Scenario,
) -> Result<RunReport> {
    let n = network.node_count();
    if n == 0 {
        return Err(domain("cannot percolate an empty network"));
    }
    let model = RangeModel::new(params, scenario)?;
    let r0 = model.base();

    // Public component ids follow the explicit engine: singletons 0..n,
    // then one new id per merge. Internally each node points at a set key
    // that maps to its current public id.
    let mut set_of: Vec<usize> = (0..n).collect();
    let mut set_members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut public: Vec<usize> = (0..n).collect();
    let mut status: Vec<Status> = vec![Status::Active; n];
    let mut range: Vec<f64> = vec![r0; n];
    let mut set_key: Vec<usize> = (0..n).collect();

    let mut heap: BinaryHeap<Reverse<(Dist, usize)>> =
        (0..n).map(|i| Reverse((Dist(r0), i))).collect();
    let mut active = n;
    let mut search = Search::new(n, n);
    let mut frontier: BinaryHeap<Reverse<(Dist, usize)>> = BinaryHeap::new();
    let mut events = Vec::new();
    let mut counts = RuleCounts::default();
    let mut removed = Vec::new();

    while let Some(Reverse((_, c))) = heap.pop() {
        if status[c] != Status::Active {
            continue;
        }
        let rc = range[c];
        let kc = set_key[c];
        let hit = if active == 1 {
            None
        } else {
            search.epoch += 1;
            frontier.clear();
            for &i in &set_members[kc] {
                search.set(i, 0.0);
                frontier.push(Reverse((Dist(0.0), i)));
            }
            search.opened[kc] = search.epoch;
            let mut hit = None;
            while let Some(Reverse((Dist(d), u))) = frontier.pop() {
                if d > search.get(u) {
                    continue;
                }
                let ku = set_of[u];
                let cu = public[ku];
                if ku != kc && status[cu] == Status::Active {
                    hit = Some((cu, d));
                    break;
                }
                if search.opened[ku] != search.epoch {
                    // Entering a removed component reaches all of it at once.
                    search.opened[ku] = search.epoch;
                    for &v in &set_members[ku] {
                        if d < search.get(v) {
                            search.set(v, d);
                            frontier.push(Reverse((Dist(d), v)));
                        }
                    }
                }
                network.for_each_neighbor(u, rc - d, &mut |v, w| {
                    let nd = d + w;
                    if nd < rc && nd < search.get(v) {
                        search.set(v, nd);
                        frontier.push(Reverse((Dist(nd), v)));
                    }
                });
            }
            hit
        };

        match hit {
            Some((b, distance)) => {
                let kb = set_key[b];
                let rb = range[b];
                let limit = rc.min(rb);
                let mut direct = f64::INFINITY;
                for &i in &set_members[kc] {
                    network.for_each_neighbor(i, limit, &mut |v, w| {
                        if set_of[v] == kb && w < direct {
                            direct = w;
                        }
                    });
                }
                let direct_distance = (direct < limit).then_some(direct);

                let (big, small) = if set_members[kc].len() >= set_members[kb].len() {
                    (kc, kb)
                } else {
                    (kb, kc)
                };
                let moved = std::mem::take(&mut set_members[small]);
                for &i in &moved {
                    set_of[i] = big;
                }
                set_members[big].extend(moved);
                let size = set_members[big].len();

                let id = status.len();
                status[c] = Status::Merged;
                status[b] = Status::Merged;
                status.push(Status::Active);
                let r = model.range(size);
                range.push(r);
                set_key.push(big);
                public[big] = id;
                search.opened.push(0);
                heap.push(Reverse((Dist(r), id)));
                active -= 1;

                let hopping = direct_distance.is_none();
                counts.merges += 1;
                counts.hopping_merges += usize::from(hopping);
                events.push(Event::Merge {
                    a: c.min(b),
                    b: c.max(b),
                    merged: id,
                    range_a: range[c.min(b)],
                    range_b: range[c.max(b)],
                    size,
                    range: r,
                    distance,
                    direct_distance,
                    hopping,
                });
            }
            None => {
                status[c] = Status::Removed;
                active -= 1;
                counts.reductions += 1;
                removed.push(set_members[kc].clone());
                events.push(Event::Reduce {
                    component: c,
                    size: set_members[kc].len(),
                    range: rc,
                    shortcuts: Vec::new(),
                });
            }
        }
    }

    let partition = Partition::new(removed);
    let giant_fraction = partition.largest() as f64 / n as f64;
    Ok(RunReport {
        engine: EngineKind::RangeOrdered,
        node_count: n,
        scenario,
        params: *params,
        base_range: r0,
        partition,
        giant_fraction,
        counts,
        events,
    })
}
