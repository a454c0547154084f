//! Model parameters and the size-to-range law used by the engine.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::quantum::{
    base_range, component_range, ChannelModel, DistillationParams, RangeMode, ALPHA_STAR,
};

/// Every knob that enters the range formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    pub alpha: f64,
    pub epsilon: f64,
    /// Decoherence distance, km.
    pub d0: f64,
    /// Memories per node.
    pub memories: u32,
    pub eta: f64,
    pub range_mode: RangeMode,
    pub beta_cap: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            alpha: ALPHA_STAR,
            epsilon: 0.01,
            d0: 1.0,
            memories: 1,
            eta: 1.0,
            range_mode: RangeMode::Asymptotic,
            beta_cap: true,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        self.channel().validate()?;
        self.distillation().validate()
    }

    pub fn channel(&self) -> ChannelModel {
        ChannelModel {
            d0: self.d0,
            epsilon: self.epsilon,
        }
    }

    pub fn distillation(&self) -> DistillationParams {
        DistillationParams {
            memories: self.memories,
            alpha: self.alpha,
            eta: self.eta,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_d0(mut self, d0: f64) -> Self {
        self.d0 = d0;
        self
    }

    pub fn with_memories(mut self, memories: u32) -> Self {
        self.memories = memories;
        self
    }

    /// Base range `r0` under the configured mode and cap.
    pub fn base_range(&self) -> f64 {
        base_range(
            &self.channel(),
            &self.distillation(),
            self.range_mode,
            self.beta_cap,
        )
    }

    /// The epsilon whose (uncapped) base range equals `r0`, all else fixed.
    pub fn epsilon_for_base_range(&self, r0: f64) -> f64 {
        let gain = 4.0 / 3.0 * f64::from(self.memories).powf(self.eta * self.alpha);
        let x = match self.range_mode {
            RangeMode::Asymptotic => r0 / self.d0,
            RangeMode::Exact => -(-r0 / self.d0).exp_m1(),
        };
        x / gain
    }
}

/// How memories are put to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// One pair per link, fixed range `(4/3) eps d0`.
    NoMemory,
    /// Nested distillation per node pair, fixed range `(4/3) eps m^a d0`.
    PointToPoint,
    /// Remote distillation across whole components: range grows with size.
    Distributed,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [
        Scenario::NoMemory,
        Scenario::PointToPoint,
        Scenario::Distributed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::NoMemory => "no_memory",
            Scenario::PointToPoint => "point_to_point",
            Scenario::Distributed => "distributed",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "no_memory" => Ok(Scenario::NoMemory),
            "point_to_point" => Ok(Scenario::PointToPoint),
            "distributed" => Ok(Scenario::Distributed),
            other => Err(validation(format!("unknown scenario `{other}`"))),
        }
    }
}

/// Range of a component as a function of its size, for one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeModel {
    channel: ChannelModel,
    distill: DistillationParams,
    mode: RangeMode,
    beta_cap: bool,
    grows: bool,
}

impl RangeModel {
    pub fn new(params: &ModelParams, scenario: Scenario) -> Result<Self> {
        params.validate()?;
        let mut distill = params.distillation();
        if scenario == Scenario::NoMemory {
            distill.memories = 1;
            distill.alpha = 0.0;
        }
        Ok(RangeModel {
            channel: params.channel(),
            distill,
            mode: params.range_mode,
            beta_cap: params.beta_cap,
            grows: scenario == Scenario::Distributed,
        })
    }

    /// Full alpha-percolation with size-dependent ranges.
    pub fn distributed(params: &ModelParams) -> Result<Self> {
        Self::new(params, Scenario::Distributed)
    }

    pub fn range(&self, size: usize) -> f64 {
        if !self.grows || size <= 1 || self.distill.alpha == 0.0 {
            return self.base();
        }
        component_range(
            size as u64,
            &self.channel,
            &self.distill,
            self.mode,
            self.beta_cap,
        )
        .expect("size >= 1")
    }

    pub fn base(&self) -> f64 {
        base_range(&self.channel, &self.distill, self.mode, self.beta_cap)
    }

    /// Exponent of the size law, zero when ranges do not grow.
    pub fn size_exponent(&self) -> f64 {
        if self.grows {
            self.distill.effective_exponent()
        } else {
            0.0
        }
    }

    pub fn mode(&self) -> RangeMode {
        self.mode
    }

    pub fn beta_cap(&self) -> bool {
        self.beta_cap
    }

    pub fn beta(&self) -> f64 {
        self.channel.beta()
    }
}
