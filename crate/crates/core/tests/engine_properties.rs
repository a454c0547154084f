mod common;

use alpha_perc::engine::{percolate, run_ordered, MergePolicy, ReductionMode};
use alpha_perc::params::{ModelParams, Scenario};
use alpha_perc::quantum::ALPHA_STAR;
use alpha_perc::seed;
use alpha_perc::topology::{generate_uniform_points, EdgeListNetwork, NodeKind};
use common::{brute_force, disk_components, matrix, random_instance};
use proptest::prelude::*;

fn lex(net: &dyn alpha_perc::topology::SpatialNetwork, p: &ModelParams) -> alpha_perc::engine::RunReport {
    percolate(net, p, Scenario::Distributed, ReductionMode::Shortcuts, MergePolicy::Lexicographic).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn merge_order_does_not_matter(s in any::<u64>(), order in any::<u64>(), alpha in 0.0..1.5f64) {
        let (net, p) = random_instance(&mut seed::rng(s), 30, alpha);
        let a = lex(&net, &p);
        let b = percolate(&net, &p, Scenario::Distributed, ReductionMode::Shortcuts, MergePolicy::Seeded(order)).unwrap();
        let c = percolate(&net, &p, Scenario::Distributed, ReductionMode::ShortestPath, MergePolicy::Seeded(order ^ 1)).unwrap();
        b.verify().unwrap();
        c.verify().unwrap();
        prop_assert_eq!(&a.partition, &b.partition);
        prop_assert_eq!(&a.partition, &c.partition);
    }

    #[test]
    fn ordered_engine_matches_explicit(s in any::<u64>(), alpha in 0.0..1.5f64) {
        let (net, p) = random_instance(&mut seed::rng(s), 40, alpha);
        let fast = run_ordered(&net, &p, Scenario::Distributed).unwrap();
        fast.verify().unwrap();
        prop_assert_eq!(fast.partition, lex(&net, &p).partition);
    }

    #[test]
    fn matches_brute_force(s in any::<u64>(), alpha in 0.0..1.5f64) {
        let (net, p) = random_instance(&mut seed::rng(s), 25, alpha);
        let oracle = brute_force(&matrix(&net), &p);
        prop_assert_eq!(lex(&net, &p).partition.blocks().to_vec(), oracle.blocks);
    }

    #[test]
    fn larger_epsilon_coarsens(s in any::<u64>(), alpha in 0.0..1.2f64, grow in 1.0..3.0f64) {
        let (net, p) = random_instance(&mut seed::rng(s), 40, alpha);
        let fine = run_ordered(&net, &p, Scenario::Distributed).unwrap();
        let coarse = run_ordered(&net, &p.with_epsilon((p.epsilon * grow).min(0.74)), Scenario::Distributed).unwrap();
        prop_assert!(fine.partition.refines(&coarse.partition, fine.node_count));
    }

    #[test]
    fn alpha_zero_is_disk_graph(s in any::<u64>()) {
        let (net, p) = random_instance(&mut seed::rng(s), 40, 0.0);
        let want = disk_components(&matrix(&net), p.base_range());
        let got = run_ordered(&net, &p, Scenario::Distributed).unwrap().partition;
        prop_assert_eq!(got.blocks().to_vec(), want);
    }

    #[test]
    fn scenarios_are_ordered(s in any::<u64>()) {
        let cloud = generate_uniform_points(60, 1.0, s).unwrap();
        let p = ModelParams::default().with_epsilon(0.04).with_memories(4);
        let run = |sc| run_ordered(&cloud, &p, sc).unwrap().partition;
        let (none, p2p, dist) = (run(Scenario::NoMemory), run(Scenario::PointToPoint), run(Scenario::Distributed));
        prop_assert!(none.refines(&p2p, 60));
        prop_assert!(p2p.refines(&dist, 60));
    }
}

fn pair(d: f64) -> EdgeListNetwork {
    let mut net = EdgeListNetwork::new();
    net.add_node("a", NodeKind::Station, None);
    net.add_node("b", NodeKind::Station, None);
    net.add_edge(0, 1, d).unwrap();
    net
}

#[test]
fn ties_do_not_connect() {
    for alpha in [0.0, ALPHA_STAR] {
        let p = ModelParams::default().with_alpha(alpha).with_epsilon(0.3);
        let r0 = p.base_range();
        assert_eq!(lex(&pair(r0), &p).partition.len(), 2);
        assert_eq!(run_ordered(&pair(r0), &p, Scenario::Distributed).unwrap().partition.len(), 2);
        assert_eq!(lex(&pair(r0 - 1e-12), &p).partition.len(), 1);
        assert_eq!(run_ordered(&pair(r0 - 1e-12), &p, Scenario::Distributed).unwrap().partition.len(), 1);
    }
}

#[test]
fn rerun_is_identical() {
    let cloud = generate_uniform_points(200, 1.0, 3).unwrap();
    let p = ModelParams::default().with_epsilon(0.03);
    let a = serde_json::to_string(&lex(&cloud, &p)).unwrap();
    let b = serde_json::to_string(&lex(&cloud, &p)).unwrap();
    assert_eq!(a, b);
}
