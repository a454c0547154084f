//! One run on a uniform point cloud, classical versus alpha*.

use alpha_perc::engine::run_ordered;
use alpha_perc::quantum::ALPHA_STAR;
use alpha_perc::topology::generate_uniform_points;
use alpha_perc::{ModelParams, Scenario};

fn main() -> alpha_perc::Result<()> {
    let cloud = generate_uniform_points(2000, 1.0, 1)?;
    for alpha in [0.0, ALPHA_STAR] {
        let p = ModelParams::default().with_alpha(alpha);
        let p = p.with_epsilon(p.epsilon_for_base_range(0.02));
        let r = run_ordered(&cloud, &p, Scenario::Distributed)?;
        r.verify()?;
        println!(
            "alpha = {alpha:.3}: P_inf = {:.3}, {} components, {} merges ({} by hopping)",
            r.giant_fraction,
            r.partition.len(),
            r.counts.merges,
            r.counts.hopping_merges
        );
    }
    Ok(())
}
