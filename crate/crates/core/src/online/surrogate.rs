use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::{dot, sq_norm, Vector};

/// Leading coefficient of the quadratic term.
///
/// `HalfM` is `ℓ(η) = (M/2)η²‖g‖² − η⟨g, g'⟩`, the loss that upper-bounds the
/// expected one-step change of an `M`-smooth objective. `FullM` is
/// `Mη²‖g‖² − η⟨g, g'⟩`, the form used when two stepsizes (gradient and
/// momentum) are learned jointly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurrogateForm {
    #[default]
    HalfM,
    FullM,
}

impl SurrogateForm {
    /// `c` in `ℓ(η) = c·M·η²‖g‖² − η⟨g, g'⟩`.
    pub fn coefficient(self) -> f64 {
        match self {
            SurrogateForm::HalfM => 0.5,
            SurrogateForm::FullM => 1.0,
        }
    }

    /// Weight of `Σ‖g‖²` in the FTRL denominator: `2c`.
    pub(crate) fn sq_weight(self) -> f64 {
        match self {
            SurrogateForm::HalfM => 1.0,
            SurrogateForm::FullM => 2.0,
        }
    }
}

/// One round's surrogate loss, kept as its sufficient statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateLoss {
    m: f64,
    form: SurrogateForm,
    inner: f64,
    sq: f64,
}

impl SurrogateLoss {
    pub fn new(m: f64, g: &Vector, g_prime: &Vector) -> Result<Self> {
        Self::with_form(m, SurrogateForm::HalfM, g, g_prime)
    }

    pub fn with_form(m: f64, form: SurrogateForm, g: &Vector, g_prime: &Vector) -> Result<Self> {
        let inner = dot(g, g_prime)?;
        Self::from_stats(m, form, inner, sq_norm(g))
    }

    /// From `⟨g, g'⟩` and `‖g‖²` directly.
    pub fn from_stats(m: f64, form: SurrogateForm, inner: f64, sq: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::contract(format!(
                "M must be finite and > 0, got {m}"
            )));
        }
        if !(inner.is_finite() && sq.is_finite() && sq >= 0.0) {
            return Err(Error::contract(
                "surrogate statistics must be finite, ‖g‖² >= 0",
            ));
        }
        Ok(Self { m, form, inner, sq })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn form(&self) -> SurrogateForm {
        self.form
    }

    /// `⟨g, g'⟩`
    pub fn inner(&self) -> f64 {
        self.inner
    }

    /// `‖g‖²`
    pub fn sq(&self) -> f64 {
        self.sq
    }

    pub fn eval(&self, eta: f64) -> f64 {
        self.form.coefficient() * self.m * eta * eta * self.sq - eta * self.inner
    }

    pub fn derivative(&self, eta: f64) -> f64 {
        2.0 * self.form.coefficient() * self.m * eta * self.sq - self.inner
    }

    /// Unconstrained minimizer, `None` when `‖g‖² = 0`.
    pub fn minimizer(&self) -> Option<f64> {
        (self.sq > 0.0).then(|| self.inner / (2.0 * self.form.coefficient() * self.m * self.sq))
    }
}

pub fn eval_surrogate(loss: &SurrogateLoss, eta: f64) -> f64 {
    loss.eval(eta)
}

/// `Σᵢ [(M/2)ηᵢ² gᵢ² − ηᵢ gᵢ g'ᵢ]`
pub fn eval_surrogate_percoord(m: f64, g: &Vector, g_prime: &Vector, eta: &Vector) -> Result<f64> {
    g_prime.check_dim(g.dim())?;
    eta.check_dim(g.dim())?;
    Ok(g.as_slice()
        .iter()
        .zip(g_prime.as_slice())
        .zip(eta.as_slice())
        .map(|((gi, gpi), ei)| 0.5 * m * ei * ei * gi * gi - ei * gi * gpi)
        .sum())
}
