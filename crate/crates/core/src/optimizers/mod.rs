//! SGDOL (global, per-coordinate, momentum) and baseline optimizers behind a
//! single stepping interface.

mod config;
mod run;

pub use config::OptimizerConfig;
pub use run::{run, RunOptions, RunOutput};

use crate::error::{Error, Result};
use crate::online::{CoordFtrlState, FtrlState, RegretLedger, SurrogateForm, SurrogateLoss};
use crate::oracles::GradientPair;
use crate::record::Stepsize;
use crate::vector::{dot, sq_norm, Vector};

/// What one step did.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    /// Stepsize applied to the gradient this round.
    pub eta: Stepsize,
    /// Momentum stepsize (momentum variant only).
    pub beta: Option<f64>,
    /// `ℓ_t` at the played stepsize(s) (surrogate-loss optimizers only).
    pub surrogate: Option<f64>,
    /// Gradients consumed from the pair: 2 for the surrogate-loss optimizers,
    /// 1 for baselines.
    pub gradients_consumed: u8,
}

#[derive(Debug, Clone)]
enum State {
    Sgdol {
        learner: FtrlState,
        ledger: RegretLedger,
    },
    SgdolCoord {
        learner: CoordFtrlState,
        cumulative: f64,
    },
    SgdolMomentum {
        eta: FtrlState,
        beta: FtrlState,
        eta_ledger: RegretLedger,
        beta_ledger: RegretLedger,
        z: Vector,
        freeze_beta: bool,
    },
    Sgd {
        lr: f64,
    },
    AdagradGlobal {
        lr: f64,
        accum: f64,
    },
    AdagradCoord {
        lr: f64,
        accum: Vec<f64>,
    },
    Adam {
        lr: f64,
        beta1: f64,
        beta2: f64,
        eps: f64,
        m: Vec<f64>,
        v: Vec<f64>,
    },
    Constant {
        eta: f64,
    },
}

/// An optimizer's iterate plus its kind-specific state.
#[derive(Debug, Clone)]
pub struct Optimizer {
    x: Vector,
    t: usize,
    state: State,
}

impl Optimizer {
    pub fn new(config: &OptimizerConfig, x1: Vector) -> Result<Self> {
        Self::with_diagnostics(config, x1, false)
    }

    /// `keep_steps` retains per-round regret records (needed for the regret
    /// bound; O(T) memory).
    pub fn with_diagnostics(
        config: &OptimizerConfig,
        x1: Vector,
        keep_steps: bool,
    ) -> Result<Self> {
        let errs = config.validate("optimizer");
        if !errs.is_empty() {
            return Err(Error::Validation(errs));
        }
        let dim = x1.dim();
        let state = match *config {
            OptimizerConfig::SgdolGlobal { m, alpha, form } => {
                let learner = FtrlState::with_form(alpha, m, form)?;
                State::Sgdol {
                    ledger: RegretLedger::new(&learner, keep_steps),
                    learner,
                }
            }
            OptimizerConfig::SgdolCoord { m, alpha } => State::SgdolCoord {
                learner: CoordFtrlState::new(alpha, m, dim)?,
                cumulative: 0.0,
            },
            OptimizerConfig::SgdolMomentum {
                m,
                alpha,
                freeze_beta,
            } => {
                let eta = FtrlState::with_form(alpha, m, SurrogateForm::FullM)?;
                let beta = eta;
                State::SgdolMomentum {
                    eta_ledger: RegretLedger::new(&eta, keep_steps),
                    beta_ledger: RegretLedger::new(&beta, keep_steps),
                    eta,
                    beta,
                    z: Vector::zeros(dim),
                    freeze_beta,
                }
            }
            OptimizerConfig::Sgd { lr } => State::Sgd { lr },
            OptimizerConfig::AdagradGlobal { lr } => State::AdagradGlobal { lr, accum: 0.0 },
            OptimizerConfig::AdagradCoord { lr } => State::AdagradCoord {
                lr,
                accum: vec![0.0; dim],
            },
            OptimizerConfig::Adam {
                lr,
                beta1,
                beta2,
                eps,
            } => State::Adam {
                lr,
                beta1,
                beta2,
                eps,
                m: vec![0.0; dim],
                v: vec![0.0; dim],
            },
            OptimizerConfig::SgdGl {
                m,
                sigma,
                horizon,
                f_gap,
            } => State::Constant {
                eta: sgd_gl_stepsize(m, sigma, horizon, f_gap),
            },
        };
        Ok(Self { x: x1, t: 1, state })
    }

    pub fn x(&self) -> &Vector {
        &self.x
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// Round about to be played (1-based).
    pub fn t(&self) -> usize {
        self.t
    }

    /// Global FTRL learner, for `sgdol_global`.
    pub fn learner(&self) -> Option<&FtrlState> {
        match &self.state {
            State::Sgdol { learner, .. } => Some(learner),
            State::SgdolMomentum { eta, .. } => Some(eta),
            _ => None,
        }
    }

    pub fn coord_learner(&self) -> Option<&CoordFtrlState> {
        match &self.state {
            State::SgdolCoord { learner, .. } => Some(learner),
            _ => None,
        }
    }

    /// Regret ledger of the gradient stepsize learner.
    pub fn ledger(&self) -> Option<&RegretLedger> {
        match &self.state {
            State::Sgdol { ledger, .. } => Some(ledger),
            State::SgdolMomentum { eta_ledger, .. } => Some(eta_ledger),
            _ => None,
        }
    }

    /// Regret ledger of the momentum stepsize learner.
    pub fn beta_ledger(&self) -> Option<&RegretLedger> {
        match &self.state {
            State::SgdolMomentum { beta_ledger, .. } => Some(beta_ledger),
            _ => None,
        }
    }

    /// `Σ_s ℓ_s(η_s)` so far, for the surrogate-loss optimizers.
    pub fn cumulative_surrogate(&self) -> Option<f64> {
        match &self.state {
            State::Sgdol { ledger, .. } => Some(ledger.cumulative_loss()),
            State::SgdolCoord { cumulative, .. } => Some(*cumulative),
            State::SgdolMomentum {
                eta_ledger,
                beta_ledger,
                ..
            } => Some(eta_ledger.cumulative_loss() + beta_ledger.cumulative_loss()),
            _ => None,
        }
    }

    /// Plays one round. The stepsize is fixed from past rounds before `pair`
    /// is looked at.
    pub fn step(&mut self, pair: &GradientPair) -> Result<StepReport> {
        pair.g.check_dim(self.dim())?;
        let report = match &mut self.state {
            State::Sgdol { learner, ledger } => step_sgdol(&mut self.x, learner, ledger, pair)?,
            State::SgdolCoord {
                learner,
                cumulative,
            } => step_sgdol_coord(&mut self.x, learner, cumulative, pair)?,
            State::SgdolMomentum {
                eta,
                beta,
                eta_ledger,
                beta_ledger,
                z,
                freeze_beta,
            } => step_sgdol_momentum(
                &mut self.x,
                eta,
                beta,
                eta_ledger,
                beta_ledger,
                z,
                *freeze_beta,
                pair,
            )?,
            State::Sgd { lr } => {
                axpy(&mut self.x, -*lr, &pair.g);
                baseline(Stepsize::Scalar(*lr))
            }
            State::Constant { eta } => {
                axpy(&mut self.x, -*eta, &pair.g);
                baseline(Stepsize::Scalar(*eta))
            }
            State::AdagradGlobal { lr, accum } => {
                *accum += sq_norm(&pair.g);
                let eta = if *accum > 0.0 {
                    *lr / accum.sqrt()
                } else {
                    0.0
                };
                axpy(&mut self.x, -eta, &pair.g);
                baseline(Stepsize::Scalar(eta))
            }
            State::AdagradCoord { lr, accum } => {
                let x = self.x.as_mut_slice();
                let mut etas = Vec::with_capacity(x.len());
                for ((xi, gi), ai) in x.iter_mut().zip(pair.g.as_slice()).zip(accum.iter_mut()) {
                    *ai += gi * gi;
                    let eta = if *ai > 0.0 { *lr / ai.sqrt() } else { 0.0 };
                    *xi -= eta * gi;
                    etas.push(eta);
                }
                baseline(Stepsize::PerCoord(etas))
            }
            State::Adam {
                lr,
                beta1,
                beta2,
                eps,
                m,
                v,
            } => {
                let t = self.t as i32;
                let c1 = 1.0 - beta1.powi(t);
                let c2 = 1.0 - beta2.powi(t);
                let x = self.x.as_mut_slice();
                for i in 0..x.len() {
                    let g = pair.g[i];
                    m[i] = *beta1 * m[i] + (1.0 - *beta1) * g;
                    v[i] = *beta2 * v[i] + (1.0 - *beta2) * g * g;
                    let m_hat = m[i] / c1;
                    let v_hat = v[i] / c2;
                    x[i] -= *lr * m_hat / (v_hat.sqrt() + *eps);
                }
                baseline(Stepsize::Scalar(*lr))
            }
        };
        if !self.x.is_finite() {
            return Err(Error::Diverged { t: self.t });
        }
        self.t += 1;
        Ok(report)
    }
}

fn baseline(eta: Stepsize) -> StepReport {
    StepReport {
        eta,
        beta: None,
        surrogate: None,
        gradients_consumed: 1,
    }
}

/// `x ← x + a·v`
fn axpy(x: &mut Vector, a: f64, v: &Vector) {
    for (xi, vi) in x.as_mut_slice().iter_mut().zip(v.as_slice()) {
        *xi += a * vi;
    }
}

fn step_sgdol(
    x: &mut Vector,
    learner: &mut FtrlState,
    ledger: &mut RegretLedger,
    pair: &GradientPair,
) -> Result<StepReport> {
    let eta = learner.stepsize();
    axpy(x, -eta, &pair.g);
    let loss = SurrogateLoss::with_form(learner.m(), learner.form(), &pair.g, &pair.g_prime)?;
    let value = ledger.record_pair(eta, &loss, sq_norm(&pair.g_prime));
    learner.observe(&loss)?;
    Ok(StepReport {
        eta: Stepsize::Scalar(eta),
        beta: None,
        surrogate: Some(value),
        gradients_consumed: 2,
    })
}

fn step_sgdol_coord(
    x: &mut Vector,
    learner: &mut CoordFtrlState,
    cumulative: &mut f64,
    pair: &GradientPair,
) -> Result<StepReport> {
    let etas = learner.stepsizes();
    for ((xi, gi), ei) in x
        .as_mut_slice()
        .iter_mut()
        .zip(pair.g.as_slice())
        .zip(etas.as_slice())
    {
        *xi -= ei * gi;
    }
    let value = crate::online::eval_surrogate_percoord(learner.m(), &pair.g, &pair.g_prime, &etas)?;
    *cumulative += value;
    learner.observe(&pair.g, &pair.g_prime)?;
    Ok(StepReport {
        eta: Stepsize::from(&etas),
        beta: None,
        surrogate: Some(value),
        gradients_consumed: 2,
    })
}

#[allow(clippy::too_many_arguments)]
fn step_sgdol_momentum(
    x: &mut Vector,
    eta_learner: &mut FtrlState,
    beta_learner: &mut FtrlState,
    eta_ledger: &mut RegretLedger,
    beta_ledger: &mut RegretLedger,
    z: &mut Vector,
    freeze_beta: bool,
    pair: &GradientPair,
) -> Result<StepReport> {
    let eta = eta_learner.stepsize();
    let beta = if freeze_beta {
        0.0
    } else {
        beta_learner.stepsize()
    };

    axpy(x, -eta, &pair.g);
    if beta != 0.0 {
        axpy(x, -beta, z);
    }

    let m = eta_learner.m();
    let eta_loss = SurrogateLoss::with_form(m, SurrogateForm::FullM, &pair.g, &pair.g_prime)?;
    let beta_loss =
        SurrogateLoss::from_stats(m, SurrogateForm::FullM, dot(z, &pair.g_prime)?, sq_norm(z))?;
    let value = eta_ledger.record_pair(eta, &eta_loss, sq_norm(&pair.g_prime))
        + beta_ledger.record(beta, &beta_loss);
    eta_learner.observe(&eta_loss)?;
    beta_learner.observe(&beta_loss)?;

    // z_{t+1} = (β_t/η_t)·z_t + g_t, with the ratio taken as 0 when η_t = 0
    let decay = if eta > 0.0 { beta / eta } else { 0.0 };
    for (zi, gi) in z.as_mut_slice().iter_mut().zip(pair.g.as_slice()) {
        *zi = decay * *zi + gi;
    }

    Ok(StepReport {
        eta: Stepsize::Scalar(eta),
        beta: Some(beta),
        surrogate: Some(value),
        gradients_consumed: 2,
    })
}

/// `min(1/M, √f_gap / (σ√T))`; `1/M` when `σ = 0`.
pub fn sgd_gl_stepsize(m: f64, sigma: f64, horizon: usize, f_gap: f64) -> f64 {
    let cap = 1.0 / m;
    if sigma == 0.0 {
        return cap;
    }
    cap.min(f_gap.sqrt() / (sigma * (horizon as f64).sqrt()))
}
