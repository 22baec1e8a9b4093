//! Two-sample stochastic first-order oracles.
//!
//! Every round an optimizer asks for a [`GradientPair`]: two gradient
//! estimates at the same point, drawn from disjoint randomness, each unbiased
//! for `∇f(x)`.

mod dataset;
pub mod libsvm;
mod quadratic;
mod rosenbrock;
mod sigmoid;

pub use dataset::{balance_subsample, Dataset, Row};
pub use libsvm::{load_libsvm, parse_libsvm, write_libsvm, LibsvmOptions};
pub use quadratic::QuadraticOracle;
pub use rosenbrock::{rosenbrock_f, rosenbrock_grad, RosenbrockOracle};
pub use sigmoid::{
    minibatch_pair, phi, phi_prime, sigmoid_loss_f, sigmoid_loss_grad, BatchSize, SigmoidLossOracle,
};

use crate::error::Result;
use crate::rng::RngStream;
use crate::vector::{dot, sq_norm, Vector};

/// `g = g(x, ξ)` and `g_prime = g(x, ξ')` at the same query point.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientPair {
    pub g: Vector,
    pub g_prime: Vector,
}

impl GradientPair {
    pub fn new(g: Vector, g_prime: Vector) -> Result<Self> {
        g_prime.check_dim(g.dim())?;
        Ok(Self { g, g_prime })
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// `⟨g, g'⟩`
    pub fn inner(&self) -> f64 {
        dot(&self.g, &self.g_prime).expect("pair dims checked at construction")
    }

    /// `‖g‖²`
    pub fn sq_norm(&self) -> f64 {
        sq_norm(&self.g)
    }

    pub(crate) fn from_parts_unchecked(g: Vector, g_prime: Vector) -> Self {
        debug_assert_eq!(g.dim(), g_prime.dim());
        Self { g, g_prime }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Capabilities {
    pub exact_f: bool,
    pub exact_grad: bool,
}

/// Problem constants an oracle may know about itself. None of these are read
/// by the optimizers; they feed reporting and diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OracleMetadata {
    /// Smoothness constant `M` (H4), when known.
    pub smoothness: Option<f64>,
    /// PL constant `μ` (H5), when known.
    pub pl_constant: Option<f64>,
    /// `f*`, when known.
    pub optimum_value: Option<f64>,
}

pub trait StochasticOracle: Send + Sync {
    fn dim(&self) -> usize;

    fn capabilities(&self) -> Capabilities;

    /// Draws a pair at `x`. `x` has already been dimension-checked.
    fn draw_pair(&self, x: &Vector, rng: &mut RngStream) -> GradientPair;

    fn value(&self, _x: &Vector) -> Option<f64> {
        None
    }

    fn gradient(&self, _x: &Vector) -> Option<Vector> {
        None
    }

    fn metadata(&self) -> OracleMetadata {
        OracleMetadata::default()
    }

    /// Two gradient estimates from fresh, disjoint randomness.
    fn sample_pair(&self, x: &Vector, rng: &mut RngStream) -> Result<GradientPair> {
        x.check_dim(self.dim())?;
        Ok(self.draw_pair(x, rng))
    }
}
