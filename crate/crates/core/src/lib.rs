//! Stochastic gradient descent whose stepsize is learned online.
//!
//! At each round the oracle returns two independent gradient estimates at the
//! current point. The first moves the iterate; together they define a
//! quadratic surrogate loss in the stepsize that an FTRL learner minimizes in
//! closed form. Baselines (SGD, AdaGrad, Adam) and an experiment harness are
//! included for comparison.

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod online;
pub mod optimizers;
pub mod oracles;
pub mod record;
pub mod rng;
pub mod vector;

pub use error::{Error, FieldError, Result};
pub use online::{FtrlState, SurrogateForm, SurrogateLoss};
pub use optimizers::{run, Optimizer, OptimizerConfig, RunOptions, RunOutput, StepReport};
pub use oracles::{GradientPair, StochasticOracle};
pub use record::{Stepsize, TrajectoryRecord};
pub use rng::{RngStream, StreamId};
pub use vector::Vector;
