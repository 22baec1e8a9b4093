use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::vector::Vector;

use super::{Capabilities, GradientPair, OracleMetadata, StochasticOracle};

/// `f(x) = ½ Σ aᵢ xᵢ²` with independent per-coordinate Gaussian gradient
/// noise of standard deviation `noise[i]`.
///
/// With `0 < min a ≤ max a` the function is `max a`-smooth and satisfies PL
/// with `μ = min a`; `f* = 0`.
#[derive(Debug, Clone)]
pub struct QuadraticOracle {
    diag: Vec<f64>,
    noise: Vec<f64>,
}

impl QuadraticOracle {
    pub fn new(diag: Vec<f64>, noise: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::contract("quadratic needs at least one coordinate"));
        }
        if noise.len() != diag.len() {
            return Err(Error::DimensionMismatch {
                expected: diag.len(),
                found: noise.len(),
            });
        }
        if diag.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::contract(
                "quadratic curvatures must be finite and >= 0",
            ));
        }
        if noise.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::contract("noise levels must be finite and >= 0"));
        }
        Ok(Self { diag, noise })
    }

    pub fn noiseless(diag: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        Self::new(diag, vec![0.0; n])
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn noise(&self) -> &[f64] {
        &self.noise
    }

    fn grad(&self, x: &Vector) -> Vector {
        Vector::from_vec_unchecked(
            self.diag
                .iter()
                .zip(x.as_slice())
                .map(|(a, xi)| a * xi)
                .collect(),
        )
    }

    fn noisy(&self, grad: &Vector, rng: &mut RngStream) -> Vector {
        Vector::from_vec_unchecked(
            grad.as_slice()
                .iter()
                .zip(&self.noise)
                .map(|(g, s)| {
                    if *s == 0.0 {
                        *g
                    } else {
                        g + s * rng.standard_normal()
                    }
                })
                .collect(),
        )
    }
}

impl StochasticOracle for QuadraticOracle {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            exact_f: true,
            exact_grad: true,
        }
    }

    fn draw_pair(&self, x: &Vector, rng: &mut RngStream) -> GradientPair {
        let grad = self.grad(x);
        let g = self.noisy(&grad, rng);
        let g_prime = self.noisy(&grad, rng);
        GradientPair::from_parts_unchecked(g, g_prime)
    }

    fn value(&self, x: &Vector) -> Option<f64> {
        Some(
            0.5 * self
                .diag
                .iter()
                .zip(x.as_slice())
                .map(|(a, xi)| a * xi * xi)
                .sum::<f64>(),
        )
    }

    fn gradient(&self, x: &Vector) -> Option<Vector> {
        Some(self.grad(x))
    }

    fn metadata(&self) -> OracleMetadata {
        let max = self.diag.iter().copied().fold(0.0, f64::max);
        let min = self.diag.iter().copied().fold(f64::INFINITY, f64::min);
        OracleMetadata {
            smoothness: Some(max),
            pl_constant: (min > 0.0).then_some(min),
            optimum_value: Some(0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::test_support::assert_unbiased_pair;

    #[test]
    fn noise_only_where_requested() {
        let q = QuadraticOracle::new(vec![1.0, 2.0], vec![0.0, 1.0]).unwrap();
        let x = Vector::new(vec![1.0, 1.0]).unwrap();
        let mut rng = RngStream::new(3, 3);
        for _ in 0..50 {
            let p = q.sample_pair(&x, &mut rng).unwrap();
            assert_eq!(p.g[0], 1.0);
            assert_eq!(p.g_prime[0], 1.0);
            assert_ne!(p.g[1], p.g_prime[1]);
        }
    }

    #[test]
    fn h1_holds() {
        let q = QuadraticOracle::new(vec![0.5, 1.0, 3.0], vec![0.3, 1.0, 2.0]).unwrap();
        assert_unbiased_pair(&q, &Vector::new(vec![1.0, -2.0, 0.5]).unwrap(), 8);
    }

    #[test]
    fn metadata_reports_constants() {
        let q = QuadraticOracle::noiseless(vec![0.1, 1.0, 0.5]).unwrap();
        let m = q.metadata();
        assert_eq!(m.smoothness, Some(1.0));
        assert_eq!(m.pl_constant, Some(0.1));
        assert_eq!(m.optimum_value, Some(0.0));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(QuadraticOracle::new(vec![1.0], vec![0.0, 0.0]).is_err());
        assert!(QuadraticOracle::new(vec![], vec![]).is_err());
        assert!(QuadraticOracle::new(vec![-1.0], vec![0.0]).is_err());
    }
}
