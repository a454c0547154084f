//! Synthetic fiber network: smallest decoherence length reaching 90%
//! connectivity in each memory scenario.

use alpha_perc::analysis::min_d0_for_target;
use alpha_perc::topology::{synthetic_fiber, FiberSpec, SpatialNetwork};
use alpha_perc::{ModelParams, Scenario};

fn main() -> alpha_perc::Result<()> {
    let net = synthetic_fiber(&FiberSpec::default())?;
    println!("{} nodes, {} links, {:.0} km of fiber", net.node_count(), net.edge_count(), net.total_length());
    let p = ModelParams::default().with_memories(102);
    let nets = [net];
    for s in Scenario::ALL {
        let d0 = min_d0_for_target(&nets, &p, s, 0.9, (1.0, 1e6), 1e-3)?;
        println!("{s:>15}: d0 >= {d0:.0} km");
    }
    Ok(())
}
