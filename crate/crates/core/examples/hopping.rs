//! A small instance where a removed component relays two others into one.

use alpha_perc::engine::{percolate, Event, MergePolicy, ReductionMode};
use alpha_perc::quantum::ALPHA_STAR;
use alpha_perc::topology::generate_uniform_points;
use alpha_perc::{ModelParams, Scenario};

fn main() -> alpha_perc::Result<()> {
    let cloud = generate_uniform_points(20, 1.0, 7029)?;
    let p = ModelParams::default().with_alpha(ALPHA_STAR);
    let p = p.with_epsilon(p.epsilon_for_base_range(0.2));
    let r = percolate(&cloud, &p, Scenario::Distributed, ReductionMode::Shortcuts, MergePolicy::Lexicographic)?;
    let classical = percolate(&cloud, &p.with_alpha(0.0), Scenario::Distributed, ReductionMode::Shortcuts, MergePolicy::Lexicographic)?;
    println!("classical: {:?}", classical.partition.blocks());
    println!("alpha*:    {:?}", r.partition.blocks());
    for e in &r.events {
        match e {
            Event::Reduce { component, size, shortcuts, .. } if !shortcuts.is_empty() => {
                println!("removed {component} (size {size}), {} shortcuts", shortcuts.len());
            }
            Event::Merge { a, b, range_a, range_b, distance, hopping: true, .. } => {
                println!("hop: {a} + {b} at {distance:.4} < min({range_a:.4}, {range_b:.4}), no direct link in range");
            }
            _ => {}
        }
    }
    Ok(())
}
