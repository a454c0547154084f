//! Closed-form channel and distillation formulas.
//!
//! Entangled pairs are isotropic (Werner) states parameterised by a single
//! weight `p`. A fiber of length `d` yields `p = exp(-d / d0)`. Nested BBPSSW
//! distillation over `n` stored pairs shrinks the infidelity by `(2/3)` per
//! round, which turns into a node range that grows as `m^alpha`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, validation, Result};

/// `log2(3/2)`: the range exponent delivered by nested BBPSSW distillation.
pub const ALPHA_STAR: f64 = 0.584_962_500_721_156_2;

/// `ln 3`: fiber longer than `d0 ln 3` carries no entanglement.
const LN_3: f64 = 1.098_612_288_668_109_8;

/// Exponential-decay channel with a fidelity error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    /// Decoherence distance in km.
    pub d0: f64,
    /// Fidelity error bound; links need `F >= 1 - epsilon`.
    pub epsilon: f64,
}

impl ChannelModel {
    pub fn new(d0: f64, epsilon: f64) -> Result<Self> {
        let model = ChannelModel { d0, epsilon };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d0 > 0.0 && self.d0.is_finite()) {
            return Err(validation(format!("d0 must be positive and finite, got {}", self.d0)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(validation(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        Ok(())
    }

    /// Sudden-death length `d0 ln 3`; ranges never exceed it when capped.
    pub fn beta(&self) -> f64 {
        self.d0 * LN_3
    }

    pub fn fidelity_threshold(&self) -> f64 {
        1.0 - self.epsilon
    }
}

/// Memory budget and efficiency exponent of the distillation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistillationParams {
    /// Memories per node.
    pub memories: u32,
    /// Range exponent; [`ALPHA_STAR`] for nested BBPSSW.
    pub alpha: f64,
    /// Fraction exponent of memories actually used, in `(0, 1]`.
    pub eta: f64,
}

impl Default for DistillationParams {
    fn default() -> Self {
        DistillationParams {
            memories: 1,
            alpha: ALPHA_STAR,
            eta: 1.0,
        }
    }
}

impl DistillationParams {
    pub fn new(memories: u32, alpha: f64, eta: f64) -> Result<Self> {
        let params = DistillationParams { memories, alpha, eta };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.memories == 0 {
            return Err(validation("memories per node must be at least 1"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(validation(format!("alpha must be finite and >= 0, got {}", self.alpha)));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(validation(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        Ok(())
    }

    /// The exponent that actually scales ranges: `eta * alpha`.
    pub fn effective_exponent(&self) -> f64 {
        self.eta * self.alpha
    }
}

/// Which form of the range law to evaluate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RangeMode {
    /// Linearised `(4/3) eps m^a d0`.
    #[default]
    Asymptotic,
    /// `-d0 ln(1 - (4/3) eps m^a)`.
    Exact,
}

/// Werner weight after a fiber of length `d` (km). `d = inf` gives 0.
pub fn channel_p(d: f64, model: &ChannelModel) -> Result<f64> {
    if d.is_nan() || d < 0.0 {
        return Err(domain(format!("distance must be >= 0, got {d}")));
    }
    Ok((-d / model.d0).exp())
}

pub fn fidelity_of_p(p: f64) -> Result<f64> {
    check_unit("p", p)?;
    Ok((3.0 * p + 1.0) / 4.0)
}

/// Inverse of [`fidelity_of_p`].
pub fn p_of_fidelity(f: f64) -> Result<f64> {
    check_fidelity(f)?;
    Ok((4.0 * f - 1.0) / 3.0)
}

/// Probability that one BBPSSW round on two pairs of fidelity `f` succeeds.
pub fn bbpssw_success(f: f64) -> Result<f64> {
    check_fidelity(f)?;
    let q = (1.0 - f) / 3.0;
    Ok(f * f + 2.0 * f * (1.0 - f) / 3.0 + 5.0 * q * q)
}

/// Fidelity of the kept pair after a successful BBPSSW round.
pub fn bbpssw_fidelity(f: f64) -> Result<f64> {
    check_fidelity(f)?;
    let g = 1.0 - f;
    let num = f * f + g * g / 9.0;
    let den = f * f + 2.0 * f * g / 3.0 + 5.0 * g * g / 9.0;
    Ok(num / den)
}

/// Fidelity after nested distillation of `n` pairs.
///
/// `Exact` iterates [`bbpssw_fidelity`] `floor(log2 n)` times, so a pair count
/// that is not a power of two is rounded down to one. `Asymptotic` evaluates
/// `1 - (2/3)^(log2 n) (1 - f)` with the real logarithm.
pub fn nested_distill(f: f64, n: u64, mode: RangeMode) -> Result<f64> {
    check_fidelity(f)?;
    if n < 1 {
        return Err(domain("pair count must be at least 1"));
    }
    match mode {
        RangeMode::Exact => {
            let rounds = 63 - n.leading_zeros();
            let mut fid = f;
            for _ in 0..rounds {
                fid = bbpssw_fidelity(fid)?;
            }
            Ok(fid)
        }
        RangeMode::Asymptotic => {
            let shrink = (2.0f64 / 3.0).powf((n as f64).log2());
            Ok(1.0 - shrink * (1.0 - f))
        }
    }
}

/// Range of an isolated node holding `m` memories.
pub fn base_range(
    channel: &ChannelModel,
    distill: &DistillationParams,
    mode: RangeMode,
    beta_cap: bool,
) -> f64 {
    range_for_memories(channel, distill, f64::from(distill.memories), mode, beta_cap)
}

/// Uniform range of every node in a component of `s` nodes: the base range
/// with `m` replaced by `m * s`.
pub fn component_range(
    s: u64,
    channel: &ChannelModel,
    distill: &DistillationParams,
    mode: RangeMode,
    beta_cap: bool,
) -> Result<f64> {
    if s < 1 {
        return Err(domain("component size must be at least 1"));
    }
    let pool = f64::from(distill.memories) * s as f64;
    Ok(range_for_memories(channel, distill, pool, mode, beta_cap))
}

fn range_for_memories(
    channel: &ChannelModel,
    distill: &DistillationParams,
    pool: f64,
    mode: RangeMode,
    beta_cap: bool,
) -> f64 {
    let beta = channel.beta();
    let x = 4.0 / 3.0 * channel.epsilon * pool.powf(distill.effective_exponent());
    let r = match mode {
        RangeMode::Asymptotic => x * channel.d0,
        RangeMode::Exact if x >= 1.0 => return beta,
        RangeMode::Exact => -channel.d0 * (-x).ln_1p(),
    };
    if beta_cap {
        r.min(beta)
    } else {
        r
    }
}

/// Contraction rule: the range `r'` with `r'^(1/a) = r_a^(1/a) + r_b^(1/a)`.
///
/// Evaluated as `hi * (1 + (lo/hi)^(1/a))^a` so that `r^(1/a)` never
/// overflows for small exponents. `a = 0` returns the larger range.
pub fn contract_ranges(r_a: f64, r_b: f64, exponent: f64) -> f64 {
    let (lo, hi) = if r_a <= r_b { (r_a, r_b) } else { (r_b, r_a) };
    if hi == 0.0 {
        return 0.0;
    }
    if exponent == 0.0 {
        return hi;
    }
    hi * (1.0 + (lo / hi).powf(1.0 / exponent)).powf(exponent)
}

/// Entanglement swapping: the end-to-end weight is the product of the legs.
pub fn swap_p(p_ab: f64, p_ac: f64) -> Result<f64> {
    check_unit("p_ab", p_ab)?;
    check_unit("p_ac", p_ac)?;
    Ok(p_ab * p_ac)
}

fn check_unit(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(domain(format!("{name} must lie in [0, 1], got {p}")))
    }
}

fn check_fidelity(f: f64) -> Result<()> {
    if (0.25..=1.0).contains(&f) {
        Ok(())
    } else {
        Err(domain(format!("fidelity must lie in [0.25, 1], got {f}")))
    }
}
