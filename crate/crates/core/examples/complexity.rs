//! Time complexity of distributed distillation and the coherence time it
//! implies.

use alpha_perc::analysis::{coherence_time, complexity_f, interpolate_f, worst_case_n, ComplexityParams, Interpolation};

fn main() -> alpha_perc::Result<()> {
    let cp = ComplexityParams::default();
    for n in [102.0, 204.0, 408.0, 816.0] {
        println!("f({n}) = {:.4e}", complexity_f(n, &cp)?);
    }
    let n = worst_case_n(0.01, 100.0, 300.0, 0.585)?;
    let f = interpolate_f(n as f64, &cp, Interpolation::BracketGeometricMean)?;
    println!("worst link 100 km: n = {n}, f ~ {f:.3e}, coherence {:.3} s at 1 MHz", coherence_time(f, 1e6)?);
    Ok(())
}
