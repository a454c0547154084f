use alpha_perc::topology::{
    generate_uniform_points, insert_repeaters, load_edge_list, load_edge_list_with_nodes, synthetic_fiber,
    EdgeListNetwork, FiberSpec, NodeKind, PointCloud, RepeaterConfig, SpatialNetwork,
};
use alpha_perc::Error;

#[test]
fn fiber_round_trips_through_csv() {
    let net = synthetic_fiber(&FiberSpec::default()).unwrap();
    assert_eq!((net.node_count(), net.edge_count()), (692, 733));
    let dir = tempfile::tempdir().unwrap();
    net.save(dir.path(), "fiber", Some("config_hash=x seed=1")).unwrap();
    let back = load_edge_list_with_nodes(&dir.path().join("fiber_edges.csv"), &dir.path().join("fiber_nodes.csv")).unwrap();
    assert_eq!((back.node_count(), back.edge_count()), (692, 733));
    assert_eq!(back.repeater_count(), net.repeater_count());
    assert_eq!(back.to_json(), net.to_json());
    let mut a = Vec::new();
    let mut b = Vec::new();
    net.write_edges_csv(&mut a, None).unwrap();
    back.write_edges_csv(&mut b, None).unwrap();
    assert_eq!(a, b);
}

#[test]
fn edges_only_loses_nothing_on_connected_input() {
    let net = synthetic_fiber(&FiberSpec::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    net.write_edges_csv(std::fs::File::create(&path).unwrap(), None).unwrap();
    let back = load_edge_list(&path).unwrap();
    assert_eq!(back.edge_count(), 733);
    assert!(back.total_length() > 0.0);
    assert!((back.total_length() - net.total_length()).abs() < 1e-6 * net.total_length());
}

#[test]
fn malformed_rows_report_their_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "u,v,length_km\na,b,1.0\nb,c,oops\n").unwrap();
    match load_edge_list(&path) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a parse error, got {other:?}"),
    }
    std::fs::write(&path, "u,v,length_km\na,b,-2\n").unwrap();
    assert!(load_edge_list(&path).unwrap_err().is_validation());
}

#[test]
fn cloud_csv_round_trip_is_exact() {
    let cloud = generate_uniform_points(500, 2.0, 11).unwrap();
    let mut buf = Vec::new();
    cloud.write_csv(&mut buf, Some("seed=11")).unwrap();
    let back = PointCloud::read_csv(buf.as_slice(), "mem.csv".as_ref()).unwrap();
    assert_eq!(back.positions(), cloud.positions());
    assert_eq!(back.distance(3, 400), cloud.distance(3, 400));
}

#[test]
fn repeaters_preserve_cable_length() {
    let mut net = EdgeListNetwork::new();
    for id in ["a", "b", "c"] {
        net.add_node(id, NodeKind::Station, None);
    }
    net.add_edge(0, 1, 400.0).unwrap();
    net.add_edge(1, 2, 900.0).unwrap();
    let cfg = RepeaterConfig { mean_segment_km: 50.0, seed: 4 };
    let out = insert_repeaters(&net, &cfg).unwrap();
    assert!((out.total_length() - 1300.0).abs() < 1e-9);
    assert_eq!(out.node_count(), 3 + out.repeater_count());
    assert_eq!(out.edge_count(), 2 + out.repeater_count());
    let s = out.index_of("a").unwrap();
    let t = out.index_of("c").unwrap();
    assert_eq!(out.classical_components(), 1);
    assert!(out.distance(s, t).is_infinite());
    assert_eq!(insert_repeaters(&net, &cfg).unwrap().to_json(), out.to_json());
}
