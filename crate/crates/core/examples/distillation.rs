//! Werner-state arithmetic: channel decay, one BBPSSW round, nested
//! distillation and the resulting node range.

use alpha_perc::quantum::{
    base_range, bbpssw_fidelity, bbpssw_success, channel_p, fidelity_of_p, nested_distill, ChannelModel,
    DistillationParams, RangeMode, ALPHA_STAR,
};

fn main() -> alpha_perc::Result<()> {
    let ch = ChannelModel::new(100.0, 0.01)?;
    for d in [10.0, 50.0, 100.0, 300.0] {
        let f = fidelity_of_p(channel_p(d, &ch)?)?;
        println!("d = {d:>5} km  F = {f:.4}  one round -> {:.4} (success {:.3})", bbpssw_fidelity(f)?, bbpssw_success(f)?);
    }
    for n in [2, 16, 256] {
        println!("{n:>3} pairs at F = 0.9 -> {:.6}", nested_distill(0.9, n, RangeMode::Exact)?);
    }
    for m in [1, 10, 102] {
        let dp = DistillationParams::new(m, ALPHA_STAR, 1.0)?;
        println!("m = {m:>3}: range {:.2} km", base_range(&ch, &dp, RangeMode::Asymptotic, true));
    }
    Ok(())
}
