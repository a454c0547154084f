//! Percolation threshold r0_th for a few alphas, on smaller clouds than the
//! CLI default so it finishes quickly.

use alpha_perc::analysis::{find_threshold, ThresholdSpec};
use alpha_perc::quantum::ALPHA_STAR;
use alpha_perc::ModelParams;

fn main() -> alpha_perc::Result<()> {
    let spec = ThresholdSpec {
        points: 500,
        replicates: 4,
        ..ThresholdSpec::default()
    };
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    for alpha in [0.0, 0.3, ALPHA_STAR, 1.0] {
        let e = find_threshold(&ModelParams::default().with_alpha(alpha), &spec, jobs)?;
        println!("alpha = {alpha:.3}: r0_th = {:.4} [{:.4}, {:.4}]", e.r0_th, e.ci_low, e.ci_high);
    }
    Ok(())
}
