//! Time complexity of remote distillation and the memory coherence time it
//! implies.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityParams {
    /// Memories per node.
    pub memories: u32,
    /// Worst-case BBPSSW success probability.
    pub p: f64,
    /// Fraction exponent of memories devoted to distillation.
    pub eta: f64,
}

impl Default for ComplexityParams {
    fn default() -> Self {
        ComplexityParams {
            memories: 102,
            p: 0.722,
            eta: 1.0,
        }
    }
}

impl ComplexityParams {
    pub fn validate(&self) -> Result<()> {
        if self.memories < 1 {
            return Err(domain("memories must be at least 1"));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(domain(format!("success probability must be in (0, 1), got {}", self.p)));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(domain(format!("eta must be in (0, 1], got {}", self.eta)));
        }
        Ok(())
    }
}

/// Expected rounds to distill `n` pairs spread over components of `m`
/// memories:
///
/// `f(n) = (n/2)^(-log2 p)` for `n <= m`, otherwise
/// `f(n) = (n/2)^(-log2 p) + m [ (n/m)^2 / 4 + (n/m) log2(n/m) / 2 ] f(n/2)`.
///
/// With `eta < 1` the pair count is replaced by `n^eta` throughout.
pub fn complexity_f(n: f64, cp: &ComplexityParams) -> Result<f64> {
    Ok(ln_complexity_f(n, cp)?.exp())
}

/// Natural log of [`complexity_f`], finite far beyond where `f` overflows.
pub fn ln_complexity_f(n: f64, cp: &ComplexityParams) -> Result<f64> {
    cp.validate()?;
    if !(n >= 1.0) || !n.is_finite() {
        return Err(domain(format!("pair count must be at least 1, got {n}")));
    }
    let m = f64::from(cp.memories);
    let exponent = -cp.p.log2();
    let mut chain = vec![n.powf(cp.eta)];
    while *chain.last().expect("nonempty") > m {
        let next = chain.last().expect("nonempty") / 2.0;
        chain.push(next);
    }
    let ln_local = |n: f64| exponent * (n / 2.0).ln();
    let mut ln_f = ln_local(*chain.last().expect("nonempty"));
    for &n in chain.iter().rev().skip(1) {
        let k = n / m;
        let ln_remote = (m * (0.25 * k * k + 0.5 * k * k.log2())).ln() + ln_f;
        let ln_own = ln_local(n);
        let (hi, lo) = if ln_remote > ln_own { (ln_remote, ln_own) } else { (ln_own, ln_remote) };
        ln_f = hi + (lo - hi).exp().ln_1p();
    }
    Ok(ln_f)
}

/// How to estimate `f` between the halving points `m * 2^k`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    /// Geometric mean of the two bracketing values.
    #[default]
    BracketGeometricMean,
    /// `log10 f` linear in `log2 n` between the brackets.
    LogLog,
}

pub fn interpolate_f(n: f64, cp: &ComplexityParams, how: Interpolation) -> Result<f64> {
    cp.validate()?;
    if !(n >= 1.0) || !n.is_finite() {
        return Err(domain(format!("pair count must be at least 1, got {n}")));
    }
    let m = f64::from(cp.memories);
    let t = (n / m).log2();
    let k = t.floor();
    let lo = m * k.exp2();
    if n == lo {
        return complexity_f(n, cp);
    }
    let hi = 2.0 * lo;
    // Below one the recursion is undefined, so clamp the lower bracket.
    let (f_lo, f_hi) = (complexity_f(lo.max(1.0), cp)?, complexity_f(hi, cp)?);
    Ok(match how {
        Interpolation::BracketGeometricMean => (f_lo * f_hi).sqrt(),
        Interpolation::LogLog => {
            let w = t - k;
            10f64.powf((1.0 - w) * f_lo.log10() + w * f_hi.log10())
        }
    })
}

/// Remote memory accesses needed to bridge `d_worst`:
/// `n = (3 d_worst / (4 eps d0))^(1/alpha)`, rounded.
pub fn worst_case_n(epsilon: f64, d_worst: f64, d0: f64, alpha: f64) -> Result<u64> {
    if alpha == 0.0 {
        return Err(domain("worst-case pair count is undefined for alpha = 0"));
    }
    for (name, v) in [("epsilon", epsilon), ("d_worst", d_worst), ("d0", d0), ("alpha", alpha)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(domain(format!("{name} must be positive, got {v}")));
        }
    }
    let n = (3.0 * d_worst / (4.0 * epsilon * d0)).powf(1.0 / alpha).round();
    Ok(n.max(1.0) as u64)
}

/// Seconds of coherence needed for `f_value` rounds at a detection rate.
pub fn coherence_time(f_value: f64, detection_rate_hz: f64) -> Result<f64> {
    if !(detection_rate_hz > 0.0) {
        return Err(domain(format!("detection rate must be positive, got {detection_rate_hz}")));
    }
    if f_value < 0.0 {
        return Err(domain("round count cannot be negative"));
    }
    Ok(f_value / detection_rate_hz)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp() -> ComplexityParams {
        ComplexityParams::default()
    }

    fn within(got: f64, want: f64, rel: f64) -> bool {
        ((got - want) / want).abs() <= rel
    }

    #[test]
    fn table_values() {
        // Frozen from an independent evaluation of the recursion.
        let f102 = complexity_f(102.0, &cp()).unwrap();
        let f204 = complexity_f(204.0, &cp()).unwrap();
        let f408 = complexity_f(408.0, &cp()).unwrap();
        assert!(within(f102, 6.345_081_217, 1e-9), "{f102}");
        assert!(within(f204, 1_303.184_769, 1e-9), "{f204}");
        assert!(within(f408, 1_063_410.944, 1e-9), "{f408}");
        assert!(within(f102, 7.0, 0.2));
        assert!(within(f204, 1.3e3, 0.2));
        assert!(within(f408, 1.1e6, 0.2));
    }

    #[test]
    fn interpolation_conventions() {
        let g = interpolate_f(245.0, &cp(), Interpolation::BracketGeometricMean).unwrap();
        assert!(g > 2e4 && g < 8e4, "{g}");
        let l = interpolate_f(245.0, &cp(), Interpolation::LogLog).unwrap();
        assert!(within(l, 7.66e3, 0.01), "{l}");
        for how in [Interpolation::BracketGeometricMean, Interpolation::LogLog] {
            assert_eq!(
                interpolate_f(408.0, &cp(), how).unwrap(),
                complexity_f(408.0, &cp()).unwrap()
            );
        }
    }

    #[test]
    fn equal_brackets_interpolate_to_themselves() {
        // With p -> 1 the local term is 1 and f is flat below m.
        let flat = ComplexityParams { memories: 1000, p: 1.0 - 1e-15, eta: 1.0 };
        let v = interpolate_f(300.0, &flat, Interpolation::BracketGeometricMean).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn increasing_in_n_decreasing_in_p() {
        let mut prev = 0.0;
        for n in (1..2000).map(f64::from) {
            let f = complexity_f(n, &cp()).unwrap();
            assert!(f > prev || n <= 2.0, "n={n}");
            prev = f;
        }
        for n in [50.0, 300.0, 900.0] {
            let lo = complexity_f(n, &ComplexityParams { p: 0.6, ..cp() }).unwrap();
            let hi = complexity_f(n, &ComplexityParams { p: 0.8, ..cp() }).unwrap();
            assert!(lo > hi);
        }
    }

    #[test]
    fn quasi_polynomial_growth() {
        let m1 = ComplexityParams { memories: 1, ..cp() };
        let pts: Vec<f64> = (4..300).map(|k| f64::from(k).exp2()).collect();
        let ln_f: Vec<f64> = pts.iter().map(|&n| ln_complexity_f(n, &m1).unwrap()).collect();
        assert!(ln_f.iter().zip(&pts).collect::<Vec<_>>().windows(2).all(|w| w[1].0 / w[1].1 < w[0].0 / w[0].1));
        let n = *pts.last().unwrap();
        let slope = ln_f.last().unwrap() / n.ln().powi(2);
        let want = 1.0 / std::f64::consts::LN_2;
        assert!(within(slope, want, 0.25), "{slope}");
    }

    #[test]
    fn eta_substitutes_pair_count() {
        let half = ComplexityParams { eta: 0.5, ..cp() };
        assert!(within(complexity_f(400.0, &half).unwrap(), complexity_f(20.0, &cp()).unwrap(), 1e-12));
    }

    #[test]
    fn worst_case() {
        assert_eq!(worst_case_n(0.01, 100.0, 300.0, 0.585).unwrap(), 245);
        assert_eq!(worst_case_n(0.01, 4.0, 300.0, 0.585).unwrap(), 1);
        let a = 0.585_f64;
        let n1 = (3.0_f64 * 100.0 / (4.0 * 0.01 * 300.0)).powf(1.0 / a);
        let n2 = (3.0_f64 * 200.0 / (4.0 * 0.01 * 300.0)).powf(1.0 / a);
        assert!(within(n2 / n1, 2f64.powf(1.0 / a), 1e-12));
        assert!(worst_case_n(0.01, 100.0, 300.0, 0.0).is_err());
        assert!(worst_case_n(0.0, 100.0, 300.0, 0.5).is_err());
    }

    #[test]
    fn coherence() {
        assert!(within(coherence_time(4e4, 1e6).unwrap(), 0.04, 1e-12));
        assert_eq!(coherence_time(5.0, 5.0).unwrap(), 1.0);
        assert_eq!(coherence_time(0.0, 1e6).unwrap(), 0.0);
        assert!(coherence_time(1.0, 0.0).is_err());
    }

    #[test]
    fn domain_errors() {
        assert!(complexity_f(0.5, &cp()).is_err());
        assert!(complexity_f(10.0, &ComplexityParams { p: 1.0, ..cp() }).is_err());
    }
}
