use crate::error::{Error, Result};

use super::{FtrlState, SurrogateForm, SurrogateLoss};

/// Statistics of one recorded round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerStep {
    pub eta: f64,
    pub inner: f64,
    pub sq: f64,
}

/// Running account of the learner's losses, for regret bookkeeping.
///
/// Without per-step records only O(1) sums are kept, which is enough for
/// [`RegretLedger::regret_vs`]. The FTRL regret bound needs every round and
/// is available only when records are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretLedger {
    alpha: f64,
    m: f64,
    form: SurrogateForm,
    cumulative_loss: f64,
    sum_inner: f64,
    sum_sq: f64,
    rounds: usize,
    max_sq: f64,
    steps: Option<Vec<LedgerStep>>,
}

impl RegretLedger {
    pub fn new(learner: &FtrlState, keep_steps: bool) -> Self {
        Self {
            alpha: learner.alpha(),
            m: learner.m(),
            form: learner.form(),
            cumulative_loss: 0.0,
            sum_inner: 0.0,
            sum_sq: 0.0,
            rounds: 0,
            max_sq: 0.0,
            steps: keep_steps.then(Vec::new),
        }
    }

    /// Records that `eta` was played against `loss`; returns `ℓ_t(η_t)`.
    pub fn record(&mut self, eta: f64, loss: &SurrogateLoss) -> f64 {
        let value = loss.eval(eta);
        self.cumulative_loss += value;
        self.sum_inner += loss.inner();
        self.sum_sq += loss.sq();
        self.max_sq = self.max_sq.max(loss.sq());
        self.rounds += 1;
        if let Some(steps) = &mut self.steps {
            steps.push(LedgerStep {
                eta,
                inner: loss.inner(),
                sq: loss.sq(),
            });
        }
        value
    }

    /// [`Self::record`], also noting `‖g'_t‖²` for [`Self::max_grad_norm`].
    pub fn record_pair(&mut self, eta: f64, loss: &SurrogateLoss, partner_sq: f64) -> f64 {
        self.max_sq = self.max_sq.max(partner_sq);
        self.record(eta, loss)
    }

    pub fn cumulative_loss(&self) -> f64 {
        self.cumulative_loss
    }

    pub fn form(&self) -> SurrogateForm {
        self.form
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn steps(&self) -> Option<&[LedgerStep]> {
        self.steps.as_deref()
    }

    /// `Σ_t ℓ_t(η)` for a fixed comparator, from the two sums.
    pub fn comparator_loss(&self, eta: f64) -> f64 {
        self.form.coefficient() * self.m * eta * eta * self.sum_sq - eta * self.sum_inner
    }

    /// `Regret_T(η) = Σ_t ℓ_t(η_t) − Σ_t ℓ_t(η)`
    pub fn regret_vs(&self, eta: f64) -> f64 {
        self.cumulative_loss - self.comparator_loss(eta)
    }

    /// Best fixed stepsize in hindsight over `[0, 2/M]`.
    pub fn best_comparator(&self) -> f64 {
        let hi = 2.0 / self.m;
        if self.sum_sq == 0.0 {
            return if self.sum_inner > 0.0 { hi } else { 0.0 };
        }
        let raw = self.sum_inner / (2.0 * self.form.coefficient() * self.m * self.sum_sq);
        raw.clamp(0.0, hi)
    }

    /// Right-hand side of the FTRL regret bound,
    /// `(Mα/2)(η − 1/M)² + ½ Σ_t ℓ'_t(η_t)² / (Mα + w·M·Σ_{s≤t}‖g_s‖²)`,
    /// evaluated on the recorded rounds. Valid for `η ∈ [0, 2/M]`.
    pub fn regret_bound_rhs(&self, eta: f64) -> Result<f64> {
        let hi = 2.0 / self.m;
        if !(0.0..=hi).contains(&eta) {
            return Err(Error::contract(format!(
                "regret bound holds only for η in [0, {hi}], got {eta}"
            )));
        }
        let d = eta - 1.0 / self.m;
        Ok(0.5 * self.m * self.alpha * d * d + self.gradient_term()?)
    }

    /// The data-dependent part of [`Self::regret_bound_rhs`].
    pub fn gradient_term(&self) -> Result<f64> {
        let steps = self.steps.as_ref().ok_or_else(|| {
            Error::contract("regret bound needs per-step records (enable diagnostics)")
        })?;
        let c = self.form.coefficient();
        let mut running_sq = 0.0;
        let mut total = 0.0;
        for s in steps {
            running_sq += s.sq;
            let deriv = 2.0 * c * self.m * s.eta * s.sq - s.inner;
            let strength = self.m * (self.alpha + self.form.sq_weight() * running_sq);
            total += 0.5 * deriv * deriv / strength;
        }
        Ok(total)
    }

    /// `(5L²/M)·ln(1 + L²T/α)`, an upper bound on [`Self::gradient_term`]
    /// when every `‖g_t‖` and `‖g'_t‖` is at most `lipschitz`. Defined for the
    /// `(M/2)η²` surrogate only.
    pub fn gradient_term_log_bound(&self, lipschitz: f64) -> Result<f64> {
        if self.form != SurrogateForm::HalfM {
            return Err(Error::contract(
                "log bound is stated for the (M/2)η² surrogate",
            ));
        }
        let l2 = lipschitz * lipschitz;
        Ok(5.0 * l2 / self.m * (1.0 + l2 * self.rounds as f64 / self.alpha).ln())
    }

    /// Largest gradient norm seen: `max_t ‖g_t‖`, together with `‖g'_t‖` for
    /// rounds entered through [`Self::record_pair`].
    pub fn max_grad_norm(&self) -> f64 {
        self.max_sq.sqrt()
    }
}
