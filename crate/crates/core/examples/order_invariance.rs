//! The final partition does not depend on which applicable rule fires first.

use alpha_perc::engine::{percolate, run_ordered, MergePolicy, ReductionMode};
use alpha_perc::topology::generate_uniform_points;
use alpha_perc::{ModelParams, Scenario};

fn main() -> alpha_perc::Result<()> {
    let cloud = generate_uniform_points(150, 1.0, 9)?;
    let p = ModelParams::default();
    let p = p.with_epsilon(p.epsilon_for_base_range(0.05));
    let reference = run_ordered(&cloud, &p, Scenario::Distributed)?;
    let mut same = 0;
    for s in 0..25 {
        let r = percolate(&cloud, &p, Scenario::Distributed, ReductionMode::Shortcuts, MergePolicy::Seeded(s))?;
        same += usize::from(r.partition == reference.partition);
    }
    println!("{same}/25 random orders reproduce the {}-block partition", reference.partition.len());
    Ok(())
}
