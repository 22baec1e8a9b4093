use serde::{Deserialize, Serialize};

use crate::error::FieldError;
use crate::online::{SurrogateForm, DEFAULT_ALPHA};

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_beta1() -> f64 {
    0.9
}

fn default_beta2() -> f64 {
    0.999
}

fn default_eps() -> f64 {
    1e-8
}

/// Which optimizer to run and its hyperparameters. Only the fields of the
/// selected `kind` are read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OptimizerConfig {
    /// SGD with one stepsize learned by FTRL on surrogate losses.
    SgdolGlobal {
        m: f64,
        #[serde(default = "default_alpha")]
        alpha: f64,
        /// Surrogate coefficient; `full_m` matches the two-stepsize variant.
        #[serde(default)]
        form: SurrogateForm,
    },
    /// One learned stepsize per coordinate.
    SgdolCoord {
        m: f64,
        #[serde(default = "default_alpha")]
        alpha: f64,
    },
    /// Learned gradient stepsize `η` and momentum stepsize `β`.
    SgdolMomentum {
        m: f64,
        #[serde(default = "default_alpha")]
        alpha: f64,
        /// Play `β = 0` every round (the β learner still observes).
        #[serde(default)]
        freeze_beta: bool,
    },
    Sgd {
        lr: f64,
    },
    AdagradGlobal {
        lr: f64,
    },
    AdagradCoord {
        lr: f64,
    },
    Adam {
        lr: f64,
        #[serde(default = "default_beta1")]
        beta1: f64,
        #[serde(default = "default_beta2")]
        beta2: f64,
        #[serde(default = "default_eps")]
        eps: f64,
    },
    /// Constant stepsize `min(1/M, √f_gap / (σ√T))`, tuned with knowledge of
    /// the noise level, horizon and initial optimality gap.
    SgdGl {
        m: f64,
        sigma: f64,
        horizon: usize,
        f_gap: f64,
    },
}

impl OptimizerConfig {
    pub fn sgdol(m: f64, alpha: f64) -> Self {
        OptimizerConfig::SgdolGlobal {
            m,
            alpha,
            form: SurrogateForm::HalfM,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            OptimizerConfig::SgdolGlobal { .. } => "sgdol_global",
            OptimizerConfig::SgdolCoord { .. } => "sgdol_coord",
            OptimizerConfig::SgdolMomentum { .. } => "sgdol_momentum",
            OptimizerConfig::Sgd { .. } => "sgd",
            OptimizerConfig::AdagradGlobal { .. } => "adagrad_global",
            OptimizerConfig::AdagradCoord { .. } => "adagrad_coord",
            OptimizerConfig::Adam { .. } => "adam",
            OptimizerConfig::SgdGl { .. } => "sgd_gl",
        }
    }

    /// True for the optimizers that learn stepsizes from surrogate losses.
    pub fn is_sgdol(&self) -> bool {
        matches!(
            self,
            OptimizerConfig::SgdolGlobal { .. }
                | OptimizerConfig::SgdolCoord { .. }
                | OptimizerConfig::SgdolMomentum { .. }
        )
    }

    /// Field errors, prefixed with `prefix` (e.g. `optimizer[0]`).
    pub fn validate(&self, prefix: &str) -> Vec<FieldError> {
        let mut errs = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v.is_finite() && v > 0.0) {
                errs.push(FieldError::new(
                    format!("{prefix}.{name}"),
                    format!("must be > 0, got {v}"),
                ));
            }
        };
        match *self {
            OptimizerConfig::SgdolGlobal { m, alpha, .. }
            | OptimizerConfig::SgdolCoord { m, alpha }
            | OptimizerConfig::SgdolMomentum { m, alpha, .. } => {
                positive("m", m);
                positive("alpha", alpha);
            }
            OptimizerConfig::Sgd { lr }
            | OptimizerConfig::AdagradGlobal { lr }
            | OptimizerConfig::AdagradCoord { lr } => positive("lr", lr),
            OptimizerConfig::Adam {
                lr,
                beta1,
                beta2,
                eps,
            } => {
                positive("lr", lr);
                if !(eps.is_finite() && eps >= 0.0) {
                    errs.push(FieldError::new(
                        format!("{prefix}.eps"),
                        format!("must be >= 0, got {eps}"),
                    ));
                }
                for (name, b) in [("beta1", beta1), ("beta2", beta2)] {
                    if !(0.0..1.0).contains(&b) {
                        errs.push(FieldError::new(
                            format!("{prefix}.{name}"),
                            format!("must lie in [0, 1), got {b}"),
                        ));
                    }
                }
            }
            OptimizerConfig::SgdGl {
                m,
                sigma,
                horizon,
                f_gap,
            } => {
                positive("m", m);
                for (name, v) in [("sigma", sigma), ("f_gap", f_gap)] {
                    if !(v.is_finite() && v >= 0.0) {
                        errs.push(FieldError::new(
                            format!("{prefix}.{name}"),
                            format!("must be >= 0, got {v}"),
                        ));
                    }
                }
                if horizon == 0 {
                    errs.push(FieldError::new(format!("{prefix}.horizon"), "must be >= 1"));
                }
            }
        }
        errs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_defaults() {
        let c: OptimizerConfig = toml::from_str("kind = \"sgdol_global\"\nm = 1002.0\n").unwrap();
        assert_eq!(c, OptimizerConfig::sgdol(1002.0, 10.0));
        let c: OptimizerConfig = toml::from_str("kind = \"adam\"\nlr = 0.01\n").unwrap();
        assert_eq!(
            c,
            OptimizerConfig::Adam {
                lr: 0.01,
                beta1: 0.9,
                beta2: 0.999,
                eps: 1e-8
            }
        );
    }

    #[test]
    fn ignores_fields_of_other_kinds() {
        let c: OptimizerConfig =
            toml::from_str("kind = \"sgd\"\nlr = 0.5\nalpha = -3.0\n").unwrap();
        assert!(c.validate("o").is_empty());
    }

    #[test]
    fn validation_names_fields() {
        let errs = OptimizerConfig::sgdol(0.0, -1.0).validate("optimizer[2]");
        let names: Vec<_> = errs.iter().map(|e| e.field.as_str()).collect();
        assert_eq!(names, ["optimizer[2].m", "optimizer[2].alpha"]);
        let errs = OptimizerConfig::SgdGl {
            m: 1.0,
            sigma: -1.0,
            horizon: 0,
            f_gap: 1.0,
        }
        .validate("o");
        assert_eq!(errs.len(), 2);
    }
}
