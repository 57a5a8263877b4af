use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counter::{keyed_uniform, Lane};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("p must lie in [0, 1], got {0}")]
    BadP(f64),
    #[error("gap delta must be positive and finite, got {0}")]
    BadDelta(f64),
    #[error("invalid positive law: {0}")]
    BadLaw(String),
}

/// Law of `tau'`, always supported on `[delta, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PositiveLaw {
    /// `tau' = delta`.
    #[serde(alias = "constant_at_delta")]
    Constant,
    /// `tau' = delta + Exp(rate)`.
    ShiftedExponential { rate: f64 },
    /// `tau' = delta + scale (U^{-1/exponent} - 1)`: tail `x^{-exponent}`.
    ParetoTail { exponent: f64, scale: f64 },
}

/// Edge-weight law `F`: `tau = t tau'` with `P(t = 0) = p` and `tau' >= delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightModel {
    pub p: f64,
    pub delta: f64,
    pub law: PositiveLaw,
    /// Moment exponent used only in diagnostics.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

impl WeightModel {
    /// Bernoulli-type model with `tau' = 1`.
    pub fn constant(p: f64) -> Self {
        WeightModel { p, delta: 1.0, law: PositiveLaw::Constant, eta: None }
    }

    pub fn with_law(p: f64, delta: f64, law: PositiveLaw) -> Result<Self, ModelError> {
        let m = WeightModel { p, delta, law, eta: None };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(ModelError::BadP(self.p));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(ModelError::BadDelta(self.delta));
        }
        match self.law {
            PositiveLaw::Constant => {}
            PositiveLaw::ShiftedExponential { rate } => {
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(ModelError::BadLaw(format!("exponential rate {rate}")));
                }
            }
            PositiveLaw::ParetoTail { exponent, scale } => {
                if !(exponent.is_finite() && exponent > 0.0 && scale.is_finite() && scale > 0.0) {
                    return Err(ModelError::BadLaw(format!("pareto exponent {exponent}, scale {scale}")));
                }
            }
        }
        Ok(())
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.law, PositiveLaw::Constant)
    }

    /// Whether `E tau^eta < inf`.
    pub fn has_moment(&self, eta: f64) -> bool {
        match self.law {
            PositiveLaw::ParetoTail { exponent, .. } => exponent > eta,
            _ => true,
        }
    }

    /// `t_e` for the edge with the given key.
    #[inline]
    pub fn t_bit(&self, seed: u64, stream: u64, key: u64) -> u8 {
        (keyed_uniform(seed, stream, key, Lane::Bernoulli) >= self.p) as u8
    }

    /// `tau'_e` for the edge with the given key.
    #[inline]
    pub fn tau_prime(&self, seed: u64, stream: u64, key: u64) -> f64 {
        match self.law {
            PositiveLaw::Constant => self.delta,
            PositiveLaw::ShiftedExponential { rate } => {
                let u = keyed_uniform(seed, stream, key, Lane::Positive);
                self.delta - (-u).ln_1p() / rate
            }
            PositiveLaw::ParetoTail { exponent, scale } => {
                // 1 - u lies in (0, 1], so the power is finite.
                let u = 1.0 - keyed_uniform(seed, stream, key, Lane::Positive);
                self.delta + scale * (u.powf(-1.0 / exponent) - 1.0)
            }
        }
    }
}
