use crate::rng::{gaussian, RngStream};
use crate::vector::Vector;

use super::{Capabilities, GradientPair, OracleMetadata, StochasticOracle};

/// `(1 − x₁)² + 100(x₂ − x₁²)²`
pub fn rosenbrock_f(x: &Vector) -> f64 {
    assert_eq!(x.dim(), 2, "rosenbrock is two-dimensional");
    let (a, b) = (x[0], x[1]);
    (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
}

pub fn rosenbrock_grad(x: &Vector) -> Vector {
    assert_eq!(x.dim(), 2, "rosenbrock is two-dimensional");
    let (a, b) = (x[0], x[1]);
    let r = b - a * a;
    Vector::from_vec_unchecked(vec![-2.0 * (1.0 - a) - 400.0 * a * r, 200.0 * r])
}

/// Exact Rosenbrock gradient plus independent `N(0, σ²I)` noise on each
/// member of the pair.
#[derive(Debug, Clone)]
pub struct RosenbrockOracle {
    sigma: f64,
}

impl RosenbrockOracle {
    /// Hessian norm at the minimizer, rounded to the integer used as `M`.
    pub const SMOOTHNESS_AT_OPTIMUM: f64 = 1002.0;

    pub fn new(sigma: f64) -> Self {
        assert!(
            sigma >= 0.0 && sigma.is_finite(),
            "sigma must be finite and >= 0"
        );
        Self { sigma }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl StochasticOracle for RosenbrockOracle {
    fn dim(&self) -> usize {
        2
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            exact_f: true,
            exact_grad: true,
        }
    }

    fn draw_pair(&self, x: &Vector, rng: &mut RngStream) -> GradientPair {
        let grad = rosenbrock_grad(x);
        if self.sigma == 0.0 {
            return GradientPair::from_parts_unchecked(grad.clone(), grad);
        }
        let noise = gaussian(rng, 2, self.sigma);
        let noise_prime = gaussian(rng, 2, self.sigma);
        GradientPair::from_parts_unchecked(
            grad.add(&noise).expect("dim 2"),
            grad.add(&noise_prime).expect("dim 2"),
        )
    }

    fn value(&self, x: &Vector) -> Option<f64> {
        Some(rosenbrock_f(x))
    }

    fn gradient(&self, x: &Vector) -> Option<Vector> {
        Some(rosenbrock_grad(x))
    }

    fn metadata(&self) -> OracleMetadata {
        OracleMetadata {
            smoothness: Some(Self::SMOOTHNESS_AT_OPTIMUM),
            pl_constant: None,
            optimum_value: Some(0.0),
        }
    }
}
