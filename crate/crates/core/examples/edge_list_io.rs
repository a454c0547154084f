//! Build an edge list by hand, segment it with repeaters, save and reload.

use alpha_perc::topology::{
    insert_repeaters, load_edge_list_with_nodes, EdgeListNetwork, NodeKind, RepeaterConfig, SpatialNetwork,
};

fn main() -> alpha_perc::Result<()> {
    let mut net = EdgeListNetwork::new();
    for id in ["paris", "lyon", "geneva", "milan"] {
        net.add_node(id, NodeKind::Station, None);
    }
    net.add_edge_by_id("paris", "lyon", 465.0)?;
    net.add_edge_by_id("lyon", "geneva", 150.0)?;
    net.add_edge_by_id("geneva", "milan", 320.0)?;
    net.add_edge_by_id("lyon", "milan", 440.0)?;
    let seg = insert_repeaters(&net, &RepeaterConfig { mean_segment_km: 50.0, seed: 2 })?;
    println!("{} stations -> {} nodes ({} repeaters), {} links", net.node_count(), seg.node_count(), seg.repeater_count(), seg.edge_count());

    let dir = std::env::temp_dir().join("alpha-perc-example");
    std::fs::create_dir_all(&dir)?;
    seg.save(&dir, "net", None)?;
    let back = load_edge_list_with_nodes(&dir.join("net_edges.csv"), &dir.join("net_nodes.csv"))?;
    println!("reloaded from {}: {} nodes, {:.0} km", dir.display(), back.node_count(), back.total_length());
    Ok(())
}
