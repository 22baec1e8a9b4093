//! Records exchanged between optimizers and the harness.

use serde::{Deserialize, Serialize};

use crate::vector::Vector;

/// A stepsize as played: one global value or one per coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Stepsize {
    Scalar(f64),
    PerCoord(Vec<f64>),
}

impl Stepsize {
    pub fn mean(&self) -> f64 {
        match self {
            Stepsize::Scalar(s) => *s,
            Stepsize::PerCoord(v) if v.is_empty() => 0.0,
            Stepsize::PerCoord(v) => v.iter().sum::<f64>() / v.len() as f64,
        }
    }

    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Stepsize::Scalar(_) => None,
            Stepsize::PerCoord(v) => Some(v),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Stepsize::Scalar(s) => vec![*s],
            Stepsize::PerCoord(v) => v.clone(),
        }
    }
}

impl From<&Vector> for Stepsize {
    fn from(v: &Vector) -> Self {
        Stepsize::PerCoord(v.as_slice().to_vec())
    }
}

/// One sampled point of a run's time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    /// 1-based iteration.
    pub t: usize,
    /// `f(x_t)`, when the oracle can evaluate it.
    pub f_value: Option<f64>,
    /// `‖∇f(x_t)‖²`, when the oracle exposes the exact gradient.
    pub true_grad_sq_norm: Option<f64>,
    /// Stepsize played at round `t`.
    pub stepsize: Stepsize,
    /// `ℓ_t(η_t)` for the surrogate-loss optimizers.
    pub surrogate_loss: Option<f64>,
    /// `Σ_{s≤t} ℓ_s(η_s)`: the learner's side of the regret.
    pub cumulative_regret_lhs: Option<f64>,
}
