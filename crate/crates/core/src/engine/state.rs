use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::report::{EngineKind, Event, Partition, RuleCounts, RunReport, Shortcut};
use crate::error::{domain, usage, Result};
use crate::params::{ModelParams, RangeModel, Scenario};
use crate::quantum::{contract_ranges, RangeMode};
use crate::seed;
use crate::topology::SpatialNetwork;

/// How an isolated component's relay capability is applied.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionMode {
    /// Insert `d_ab + d_ac` shortcuts between every pair of neighbours.
    #[default]
    Shortcuts,
    /// Keep removed components as relay vertices and route through them
    /// with Dijkstra on demand.
    ShortestPath,
}

/// Which applicable rule fires next.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MergePolicy {
    /// Smallest component-id pair first, then smallest isolated id.
    #[default]
    Lexicographic,
    /// Uniformly random applicable merge, then random isolated component.
    Seeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Active,
    Merged,
    Removed,
}

#[derive(Debug, Clone)]
struct Component {
    members: Vec<usize>,
    range: f64,
    status: Status,
}

/// Active components, effective distances and the event log.
///
/// Component ids `0..N` are the initial singletons; each merge appends a
/// new id. Ids are never reused.
#[derive(Debug, Clone)]
pub struct PercolationState {
    params: ModelParams,
    scenario: Scenario,
    model: RangeModel,
    mode: ReductionMode,
    node_count: usize,
    comps: Vec<Component>,
    /// Direct distances, min-rule only. Covers removed components too.
    direct: Vec<BTreeMap<usize, f64>>,
    /// Effective distances between active components (shortcut mode).
    effective: Vec<BTreeMap<usize, f64>>,
    removed: Vec<Vec<usize>>,
    events: Vec<Event>,
    counts: RuleCounts,
}

impl PercolationState {
    pub fn new(
        network: &dyn SpatialNetwork,
        params: &ModelParams,
        scenario: Scenario,
        mode: ReductionMode,
    ) -> Result<Self> {
        let n = network.node_count();
        if n == 0 {
            return Err(domain("cannot percolate an empty network"));
        }
        let model = RangeModel::new(params, scenario)?;
        let r0 = model.base();
        let mut direct = vec![BTreeMap::new(); n];
        for (i, j, d) in network.finite_pairs() {
            direct[i].insert(j, d);
            direct[j].insert(i, d);
        }
        let effective = match mode {
            ReductionMode::Shortcuts => direct.clone(),
            ReductionMode::ShortestPath => Vec::new(),
        };
        Ok(PercolationState {
            params: *params,
            scenario,
            model,
            mode,
            node_count: n,
            comps: (0..n)
                .map(|i| Component {
                    members: vec![i],
                    range: r0,
                    status: Status::Active,
                })
                .collect(),
            direct,
            effective,
            removed: Vec::new(),
            events: Vec::new(),
            counts: RuleCounts::default(),
        })
    }

    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.comps
            .iter()
            .enumerate()
            .filter(|(_, c)| c.status == Status::Active)
            .map(|(id, _)| id)
    }

    pub fn active_count(&self) -> usize {
        self.active().count()
    }

    pub fn range(&self, a: usize) -> Result<f64> {
        Ok(self.live(a)?.range)
    }

    pub fn members(&self, a: usize) -> Result<&[usize]> {
        Ok(&self.live(a)?.members)
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Component currently holding node `i`, active or removed.
    pub fn component_of(&self, i: usize) -> Option<usize> {
        self.comps
            .iter()
            .rposition(|c| c.status != Status::Merged && c.members.contains(&i))
    }

    /// Effective distance between two active components, `None` when unreachable.
    pub fn effective_distance(&self, a: usize, b: usize) -> Result<Option<f64>> {
        self.live(a)?;
        self.live(b)?;
        if a == b {
            return Err(usage("distance of a component to itself"));
        }
        Ok(match self.mode {
            ReductionMode::Shortcuts => self.effective[a].get(&b).copied(),
            ReductionMode::ShortestPath => self
                .reachable(a, f64::INFINITY)
                .into_iter()
                .find(|&(c, _)| c == b)
                .map(|(_, d)| d),
        })
    }

    /// Strict criterion `d_ab < min(r_a, r_b)`.
    pub fn connection_ok(&self, a: usize, b: usize) -> Result<bool> {
        let d = self.effective_distance(a, b)?;
        let r = self.comps[a].range.min(self.comps[b].range);
        Ok(d.is_some_and(|d| d < r))
    }

    pub fn merge(&mut self, a: usize, b: usize) -> Result<usize> {
        if !self.connection_ok(a, b)? {
            return Err(usage(format!("components {a} and {b} do not satisfy the criterion")));
        }
        let distance = self.effective_distance(a, b)?.expect("connected");
        let (ra, rb) = (self.comps[a].range, self.comps[b].range);
        let direct_distance = self.direct[a]
            .get(&b)
            .copied()
            .filter(|&d| d < ra.min(rb));

        let id = self.comps.len();
        let mut members = std::mem::take(&mut self.comps[a].members);
        members.extend(std::mem::take(&mut self.comps[b].members));
        let size = members.len();
        let range = self.model.range(size);
        if self.model.mode() == RangeMode::Asymptotic
            && (!self.model.beta_cap() || range < self.model.beta())
        {
            let expect = contract_ranges(ra, rb, self.model.size_exponent());
            debug_assert!(
                (range - expect).abs() <= 8.0 * f64::EPSILON * range,
                "contraction {range} vs {expect}"
            );
        }
        debug_assert!(range >= ra.max(rb));

        self.comps[a].status = Status::Merged;
        self.comps[b].status = Status::Merged;
        self.comps.push(Component {
            members,
            range,
            status: Status::Active,
        });
        let merged = min_merge(&mut self.direct, a, b, id);
        self.direct.push(merged);
        if self.mode == ReductionMode::Shortcuts {
            let merged = min_merge(&mut self.effective, a, b, id);
            self.effective.push(merged);
        }

        let hopping = direct_distance.is_none();
        self.counts.merges += 1;
        self.counts.hopping_merges += usize::from(hopping);
        self.events.push(Event::Merge {
            a,
            b,
            merged: id,
            range_a: ra,
            range_b: rb,
            size,
            range,
            distance,
            direct_distance,
            hopping,
        });
        Ok(id)
    }

    /// No active component lies strictly inside `r_a`.
    pub fn is_isolated(&self, a: usize) -> Result<bool> {
        let r = self.live(a)?.range;
        Ok(self.reachable(a, r).is_empty())
    }

    pub fn reduce_and_remove(&mut self, a: usize) -> Result<Vec<Shortcut>> {
        if !self.is_isolated(a)? {
            return Err(usage(format!("component {a} is not isolated")));
        }
        let mut shortcuts = Vec::new();
        if self.mode == ReductionMode::Shortcuts {
            let around: Vec<(usize, f64)> = std::mem::take(&mut self.effective[a]).into_iter().collect();
            for (x, &(b, dab)) in around.iter().enumerate() {
                self.effective[b].remove(&a);
                for &(c, dac) in &around[x + 1..] {
                    let via = dab + dac;
                    let previous = self.effective[b].get(&c).copied();
                    if previous.is_none_or(|p| via < p) {
                        self.effective[b].insert(c, via);
                        self.effective[c].insert(b, via);
                        shortcuts.push(Shortcut {
                            b,
                            c,
                            previous,
                            distance: via,
                        });
                    }
                }
            }
        }
        let comp = &mut self.comps[a];
        comp.status = Status::Removed;
        self.removed.push(comp.members.clone());
        self.counts.reductions += 1;
        self.counts.shortcuts += shortcuts.len();
        self.events.push(Event::Reduce {
            component: a,
            size: comp.members.len(),
            range: comp.range,
            shortcuts: shortcuts.clone(),
        });
        Ok(shortcuts)
    }

    /// Applies merges while any apply, otherwise removes an isolated
    /// component, until nothing is active.
    pub fn run(mut self, policy: MergePolicy) -> RunReport {
        let mut rng = match policy {
            MergePolicy::Seeded(s) => Some(seed::stream_rng(s, seed::Stream::MergeOrder, 0)),
            MergePolicy::Lexicographic => None,
        };
        loop {
            let active: Vec<usize> = self.active().collect();
            if active.is_empty() {
                break;
            }
            let mut pairs = Vec::new();
            for &a in &active {
                let ra = self.comps[a].range;
                for (b, _) in self.reachable(a, ra) {
                    if a < b && self.connection_ok(a, b).expect("active pair") {
                        pairs.push((a, b));
                    }
                }
            }
            if !pairs.is_empty() {
                let (a, b) = match rng.as_mut() {
                    Some(rng) => pairs[rng.random_range(0..pairs.len())],
                    None => *pairs.iter().min().expect("nonempty"),
                };
                self.merge(a, b).expect("criterion checked");
                continue;
            }
            let isolated: Vec<usize> = active
                .into_iter()
                .filter(|&a| self.is_isolated(a).expect("active"))
                .collect();
            let a = match rng.as_mut() {
                Some(rng) => isolated[rng.random_range(0..isolated.len())],
                None => isolated[0],
            };
            self.reduce_and_remove(a).expect("isolated");
        }
        self.into_report()
    }

    /// Report of the current removed set; complete once nothing is active.
    pub fn into_report(self) -> RunReport {
        let partition = Partition::new(self.removed);
        let giant_fraction = partition.largest() as f64 / self.node_count as f64;
        RunReport {
            engine: match self.mode {
                ReductionMode::Shortcuts => EngineKind::Shortcuts,
                ReductionMode::ShortestPath => EngineKind::ShortestPath,
            },
            node_count: self.node_count,
            scenario: self.scenario,
            base_range: self.model.base(),
            params: self.params,
            partition,
            giant_fraction,
            counts: self.counts,
            events: self.events,
        }
    }

    fn live(&self, a: usize) -> Result<&Component> {
        match self.comps.get(a) {
            Some(c) if c.status == Status::Active => Ok(c),
            Some(_) => Err(usage(format!("component {a} is not active"))),
            None => Err(usage(format!("unknown component {a}"))),
        }
    }

    /// Active components at effective distance `< radius` from `a`, by id.
    fn reachable(&self, a: usize, radius: f64) -> Vec<(usize, f64)> {
        match self.mode {
            ReductionMode::Shortcuts => self.effective[a]
                .iter()
                .filter(|&(_, &d)| d < radius)
                .map(|(&b, &d)| (b, d))
                .collect(),
            ReductionMode::ShortestPath => {
                let mut best: BTreeMap<usize, f64> = BTreeMap::new();
                let mut found = Vec::new();
                let mut heap = BinaryHeap::new();
                best.insert(a, 0.0);
                heap.push(Reverse((Dist(0.0), a)));
                while let Some(Reverse((Dist(d), u))) = heap.pop() {
                    if best.get(&u).is_some_and(|&b| d > b) {
                        continue;
                    }
                    if u != a && self.comps[u].status == Status::Active {
                        found.push((u, d));
                        continue;
                    }
                    for (&v, &w) in &self.direct[u] {
                        let nd = d + w;
                        if nd < radius && best.get(&v).is_none_or(|&b| nd < b) {
                            best.insert(v, nd);
                            heap.push(Reverse((Dist(nd), v)));
                        }
                    }
                }
                found.sort_unstable_by_key(|&(b, _)| b);
                found
            }
        }
    }
}

/// Folds rows `a` and `b` into a new row for `id` under the min-rule and
/// repoints every neighbour.
fn min_merge(rows: &mut [BTreeMap<usize, f64>], a: usize, b: usize, id: usize) -> BTreeMap<usize, f64> {
    let mut merged = std::mem::take(&mut rows[a]);
    for (c, d) in std::mem::take(&mut rows[b]) {
        merged
            .entry(c)
            .and_modify(|e| *e = f64::min(*e, d))
            .or_insert(d);
    }
    merged.remove(&a);
    merged.remove(&b);
    for (&c, &d) in &merged {
        rows[c].remove(&a);
        rows[c].remove(&b);
        rows[c].insert(id, d);
    }
    merged
}

/// Total order on non-NaN distances for the heap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dist(pub f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Runs the explicit engine to completion.
pub fn percolate(
    network: &dyn SpatialNetwork,
    params: &ModelParams,
    scenario: Scenario,
    mode: ReductionMode,
    policy: MergePolicy,
) -> Result<RunReport> {
    Ok(PercolationState::new(network, params, scenario, mode)?.run(policy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{EdgeListNetwork, PointCloud};

    /// Edge list with the given `(u, v, km)` edges on nodes `0..n`.
    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> EdgeListNetwork {
        let mut net = EdgeListNetwork::new();
        for i in 0..n {
            net.add_node(&format!("n{i}"), Default::default(), None);
        }
        for &(u, v, d) in edges {
            net.add_edge(u, v, d).unwrap();
        }
        net
    }

    /// Parameters with `r0 = 1` and the given exponent.
    fn unit_range(alpha: f64) -> ModelParams {
        let p = ModelParams::default().with_alpha(alpha).with_d0(1.0);
        let eps = p.epsilon_for_base_range(1.0);
        ModelParams { beta_cap: false, ..p.with_epsilon(eps) }
    }

    fn state(net: &EdgeListNetwork, alpha: f64, mode: ReductionMode) -> PercolationState {
        PercolationState::new(net, &unit_range(alpha), Scenario::Distributed, mode).unwrap()
    }

    #[test]
    fn init_counts() {
        let single = graph(1, &[]);
        let s = state(&single, 0.5, ReductionMode::Shortcuts);
        assert_eq!(s.active_count(), 1);
        assert!(s.is_isolated(0).unwrap());

        let path = graph(5, &[(0, 1, 2.0), (1, 2, 2.0), (2, 3, 2.0), (3, 4, 2.0)]);
        let s = state(&path, 0.5, ReductionMode::Shortcuts);
        let finite: usize = s.effective.iter().map(BTreeMap::len).sum();
        assert_eq!(finite / 2, 4);

        let empty = graph(0, &[]);
        assert!(PercolationState::new(&empty, &unit_range(0.5), Scenario::Distributed, ReductionMode::Shortcuts).is_err());
    }

    #[test]
    fn criterion_is_strict() {
        let net = graph(3, &[(0, 1, 0.5), (1, 2, 1.0)]);
        let s = state(&net, 0.0, ReductionMode::Shortcuts);
        assert!(s.connection_ok(0, 1).unwrap());
        assert!(!s.connection_ok(1, 2).unwrap());
        assert!(!s.connection_ok(0, 2).unwrap());
        assert!(s.connection_ok(0, 0).is_err());
        assert!(s.is_isolated(2).unwrap());
        assert!(!s.is_isolated(1).unwrap());
    }

    #[test]
    fn merge_requires_criterion_and_applies_min_rule() {
        let net = graph(3, &[(0, 1, 0.5), (0, 2, 4.0), (1, 2, 3.0)]);
        let mut s = state(&net, 0.5, ReductionMode::Shortcuts);
        assert!(s.merge(1, 2).is_err());
        let ab = s.merge(0, 1).unwrap();
        assert_eq!(ab, 3);
        assert_eq!(s.effective_distance(ab, 2).unwrap(), Some(3.0));
        assert!((s.range(ab).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!(s.merge(0, 2).is_err());
        assert_eq!(s.component_of(1), Some(3));
    }

    #[test]
    fn additive_contraction() {
        let net = graph(3, &[(0, 1, 0.5), (1, 2, 0.8)]);
        let mut s = state(&net, 1.0, ReductionMode::Shortcuts);
        let ab = s.merge(0, 1).unwrap();
        assert!((s.range(ab).unwrap() - 2.0).abs() < 1e-12);
        let abc = s.merge(ab, 2).unwrap();
        assert!((s.range(abc).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn reduction_shortcuts() {
        // b - a - c with d_ab = 3, d_ac = 4; a's range 1 leaves it isolated.
        let net = graph(4, &[(0, 1, 3.0), (0, 2, 4.0), (1, 2, 10.0), (0, 3, 3.5)]);
        let mut s = state(&net, 0.5, ReductionMode::Shortcuts);
        let cuts = s.reduce_and_remove(0).unwrap();
        assert_eq!(s.effective_distance(1, 2).unwrap(), Some(7.0));
        assert_eq!(s.effective_distance(1, 3).unwrap(), Some(6.5));
        assert_eq!(s.effective_distance(2, 3).unwrap(), Some(7.5));
        assert_eq!(cuts.len(), 3);
        assert_eq!(cuts[0].previous, Some(10.0));
        assert_eq!(cuts[1].previous, None);
        assert!(s.merge(0, 1).is_err());
        assert!(s.is_isolated(0).is_err());
    }

    #[test]
    fn reduction_keeps_shorter_distance() {
        let net = graph(3, &[(0, 1, 3.0), (0, 2, 4.0), (1, 2, 5.0)]);
        let mut s = state(&net, 0.5, ReductionMode::Shortcuts);
        assert!(s.reduce_and_remove(0).unwrap().is_empty());
        assert_eq!(s.effective_distance(1, 2).unwrap(), Some(5.0));
    }

    #[test]
    fn cannot_reduce_connected_component() {
        let net = graph(2, &[(0, 1, 0.5)]);
        let mut s = state(&net, 0.5, ReductionMode::Shortcuts);
        assert!(s.reduce_and_remove(0).is_err());
    }

    #[test]
    fn relay_enables_merge() {
        // 0 is isolated (r=1, all distances >= 1). The triples around 1 and
        // 2 reach range 3 and see each other only via 0, at 1 + 1.
        let params = ModelParams { beta_cap: false, ..unit_range(1.0) };
        let net = graph(
            7,
            &[(0, 1, 1.0), (0, 2, 1.0), (1, 3, 0.5), (1, 4, 0.5), (2, 5, 0.5), (2, 6, 0.5)],
        );
        for mode in [ReductionMode::Shortcuts, ReductionMode::ShortestPath] {
            let report = percolate(&net, &params, Scenario::Distributed, mode, MergePolicy::Lexicographic).unwrap();
            report.verify().unwrap();
            assert_eq!(report.partition.blocks(), &[vec![0], vec![1, 2, 3, 4, 5, 6]]);
            assert_eq!(report.counts.hopping_merges, 1);
            let classical = percolate(&net, &params.with_alpha(0.0), Scenario::Distributed, mode, MergePolicy::Lexicographic).unwrap();
            assert_eq!(classical.partition.len(), 3);
        }
    }

    #[test]
    fn two_nodes_within_range() {
        let cloud = PointCloud::new(vec![[0.0, 0.0], [0.5, 0.0]], 1.0).unwrap();
        let report = percolate(&cloud, &unit_range(ALPHA), Scenario::Distributed, ReductionMode::Shortcuts, MergePolicy::Lexicographic).unwrap();
        assert_eq!(report.partition.blocks(), &[vec![0, 1]]);
        assert_eq!(report.giant_fraction, 1.0);
        report.verify().unwrap();
    }

    const ALPHA: f64 = crate::quantum::ALPHA_STAR;

    #[test]
    fn policies_agree_on_small_cloud() {
        let cloud = crate::topology::generate_uniform_points(30, 1.0, 3).unwrap();
        let params = ModelParams { beta_cap: false, ..unit_range(ALPHA) };
        let params = params.with_epsilon(params.epsilon_for_base_range(0.12));
        let base = percolate(&cloud, &params, Scenario::Distributed, ReductionMode::Shortcuts, MergePolicy::Lexicographic).unwrap();
        base.verify().unwrap();
        for s in 0..5 {
            for mode in [ReductionMode::Shortcuts, ReductionMode::ShortestPath] {
                let r = percolate(&cloud, &params, Scenario::Distributed, mode, MergePolicy::Seeded(s)).unwrap();
                r.verify().unwrap();
                assert_eq!(r.partition, base.partition);
            }
        }
    }
}
