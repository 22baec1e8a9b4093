use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::vector::{dot_slices, Vector};

use super::{Capabilities, Dataset, GradientPair, OracleMetadata, Row, StochasticOracle};

/// `φ(θ) = θ²/(1+θ²)`: bounded, non-convex, 1-Lipschitz and 2-smooth.
pub fn phi(theta: f64) -> f64 {
    let s = theta * theta;
    s / (1.0 + s)
}

/// `φ'(θ) = 2θ/(1+θ²)²`
pub fn phi_prime(theta: f64) -> f64 {
    let d = 1.0 + theta * theta;
    2.0 * theta / (d * d)
}

/// `(1/m) Σ φ(aᵢᵀx − yᵢ)` over the whole dataset.
pub fn sigmoid_loss_f(x: &Vector, data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::contract("sigmoid loss over an empty dataset"));
    }
    x.check_dim(data.n_features())?;
    let total: f64 = data
        .rows()
        .map(|r| phi(dot_slices(r.features, x.as_slice()) - r.label))
        .sum();
    Ok(total / data.len() as f64)
}

/// `(1/|rows|) Σ φ'(aᵢᵀx − yᵢ)·aᵢ`
pub fn sigmoid_loss_grad<'a>(
    x: &Vector,
    rows: impl IntoIterator<Item = Row<'a>>,
) -> Result<Vector> {
    let mut acc = vec![0.0; x.dim()];
    let mut count = 0usize;
    for r in rows {
        if r.features.len() != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                found: r.features.len(),
            });
        }
        accumulate(&mut acc, x.as_slice(), r);
        count += 1;
    }
    if count == 0 {
        return Err(Error::contract("sigmoid gradient over no rows"));
    }
    let inv = 1.0 / count as f64;
    acc.iter_mut().for_each(|v| *v *= inv);
    Ok(Vector::from_vec_unchecked(acc))
}

fn accumulate(acc: &mut [f64], x: &[f64], r: Row<'_>) {
    let c = phi_prime(dot_slices(r.features, x) - r.label);
    if c != 0.0 {
        for (a, f) in acc.iter_mut().zip(r.features) {
            *a += c * f;
        }
    }
}

fn batch_grad(data: &Dataset, x: &Vector, batch: usize, rng: &mut RngStream) -> Vector {
    let mut acc = vec![0.0; x.dim()];
    for _ in 0..batch {
        accumulate(&mut acc, x.as_slice(), data.row(rng.index(data.len())));
    }
    let inv = 1.0 / batch as f64;
    acc.iter_mut().for_each(|v| *v *= inv);
    Vector::from_vec_unchecked(acc)
}

fn full_grad(data: &Dataset, x: &Vector) -> Vector {
    let mut acc = vec![0.0; x.dim()];
    for r in data.rows() {
        accumulate(&mut acc, x.as_slice(), r);
    }
    let inv = 1.0 / data.len() as f64;
    acc.iter_mut().for_each(|v| *v *= inv);
    Vector::from_vec_unchecked(acc)
}

/// Gradients over two independently drawn minibatches, each sampled i.i.d.
/// with replacement. `batch_size == m` uses the full dataset for both and
/// consumes no randomness.
pub fn minibatch_pair(
    data: &Dataset,
    x: &Vector,
    batch_size: usize,
    rng: &mut RngStream,
) -> Result<GradientPair> {
    if batch_size == 0 || batch_size > data.len() {
        return Err(Error::contract(format!(
            "batch size {batch_size} outside 1..={}",
            data.len()
        )));
    }
    x.check_dim(data.n_features())?;
    Ok(draw(data, x, batch_size, rng))
}

fn draw(data: &Dataset, x: &Vector, batch_size: usize, rng: &mut RngStream) -> GradientPair {
    if batch_size == data.len() {
        let g = full_grad(data, x);
        return GradientPair::from_parts_unchecked(g.clone(), g);
    }
    let g = batch_grad(data, x, batch_size, rng);
    let g_prime = batch_grad(data, x, batch_size, rng);
    GradientPair::from_parts_unchecked(g, g_prime)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchSize {
    Full,
    Rows(usize),
}

/// The non-convex classification objective with minibatch gradient noise.
#[derive(Debug, Clone)]
pub struct SigmoidLossOracle {
    data: Arc<Dataset>,
    batch: usize,
}

impl SigmoidLossOracle {
    pub fn new(data: Arc<Dataset>, batch: BatchSize) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::contract("sigmoid oracle over an empty dataset"));
        }
        let batch = match batch {
            BatchSize::Full => data.len(),
            BatchSize::Rows(b) if b >= 1 && b <= data.len() => b,
            BatchSize::Rows(b) => {
                return Err(Error::contract(format!(
                    "batch size {b} outside 1..={}",
                    data.len()
                )))
            }
        };
        Ok(Self { data, batch })
    }

    pub fn dataset(&self) -> &Dataset {
        &self.data
    }

    pub fn batch_size(&self) -> usize {
        self.batch
    }
}

impl StochasticOracle for SigmoidLossOracle {
    fn dim(&self) -> usize {
        self.data.n_features()
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            exact_f: true,
            exact_grad: true,
        }
    }

    fn draw_pair(&self, x: &Vector, rng: &mut RngStream) -> GradientPair {
        draw(&self.data, x, self.batch, rng)
    }

    fn value(&self, x: &Vector) -> Option<f64> {
        sigmoid_loss_f(x, &self.data).ok()
    }

    fn gradient(&self, x: &Vector) -> Option<Vector> {
        Some(full_grad(&self.data, x))
    }

    fn metadata(&self) -> OracleMetadata {
        OracleMetadata {
            smoothness: Some(2.0 * self.data.max_row_sq_norm()),
            pl_constant: None,
            optimum_value: None,
        }
    }
}
