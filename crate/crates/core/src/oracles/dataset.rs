use rand::seq::{index, SliceRandom};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// One labelled example, borrowed from a [`Dataset`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row<'a> {
    pub features: &'a [f64],
    pub label: f64,
}

/// Dense binary-labelled dataset stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<f64>,
    n_features: usize,
    has_bias: bool,
}

impl Dataset {
    /// `features` is row-major with `n_features` columns (bias column, if
    /// any, included and last).
    pub fn new(
        features: Vec<f64>,
        labels: Vec<f64>,
        n_features: usize,
        has_bias: bool,
    ) -> Result<Self> {
        if n_features == 0 {
            return Err(Error::contract("dataset needs at least one feature"));
        }
        if features.len() != labels.len() * n_features {
            return Err(Error::DimensionMismatch {
                expected: labels.len() * n_features,
                found: features.len(),
            });
        }
        if let Some(i) = labels.iter().position(|y| *y != 1.0 && *y != -1.0) {
            return Err(Error::contract(format!(
                "row {} has label {}, expected ±1",
                i + 1,
                labels[i]
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract("dataset features must be finite"));
        }
        if has_bias && (0..labels.len()).any(|i| features[i * n_features + n_features - 1] != 1.0) {
            return Err(Error::contract("bias column must be constant 1"));
        }
        Ok(Self {
            features,
            labels,
            n_features,
            has_bias,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Column count, including the bias column when present.
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn has_bias(&self) -> bool {
        self.has_bias
    }

    pub fn row(&self, i: usize) -> Row<'_> {
        let start = i * self.n_features;
        Row {
            features: &self.features[start..start + self.n_features],
            label: self.labels[i],
        }
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = Row<'_>> + '_ {
        (0..self.len()).map(move |i| self.row(i))
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// Copies the given rows, in order, into a new dataset.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            let row = self.row(i);
            features.extend_from_slice(row.features);
            labels.push(row.label);
        }
        Dataset {
            features,
            labels,
            n_features: self.n_features,
            has_bias: self.has_bias,
        }
    }

    /// Largest squared row norm `max_i ‖a_i‖²`; twice this bounds the
    /// smoothness of the sigmoid-type loss.
    pub fn max_row_sq_norm(&self) -> f64 {
        self.rows()
            .map(|r| r.features.iter().map(|v| v * v).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Downsamples the majority class uniformly without replacement to the
/// minority count, then shuffles the result.
pub fn balance_subsample(data: &Dataset, rng: &mut RngStream) -> Result<Dataset> {
    let (pos, neg): (Vec<usize>, Vec<usize>) = (0..data.len()).partition(|&i| data.labels[i] > 0.0);
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::contract(
            "balancing needs both label classes present",
        ));
    }
    let (minority, majority) = if pos.len() <= neg.len() {
        (pos, neg)
    } else {
        (neg, pos)
    };
    let mut picked: Vec<usize> = index::sample(rng.inner(), majority.len(), minority.len())
        .into_iter()
        .map(|k| majority[k])
        .collect();
    picked.sort_unstable();
    let mut keep = minority;
    keep.extend(picked);
    keep.sort_unstable();
    keep.shuffle(rng.inner());
    Ok(data.select(&keep))
}
