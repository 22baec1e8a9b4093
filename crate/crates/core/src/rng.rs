//! Seeded, splittable randomness.
//!
//! A stream is a ChaCha8 generator keyed by `seed`, with `stream_id` selecting
//! one of 2^64 disjoint keystreams. Experiments derive stream ids from
//! `(purpose, optimizer index, repetition)` via [`StreamId`].

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::vector::Vector;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub(crate) fn inner(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// What a stream is used for. Occupies the top byte of the stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Purpose {
    /// Oracle noise / minibatch draws. Shared by all optimizers of a repetition.
    Oracle = 1,
    /// Optimizer-owned draws (the uniformly sampled output iterate).
    Output = 2,
    /// Dataset balancing.
    Subsample = 3,
    /// Diagnostics (Monte Carlo checks, smoothness probes).
    Diagnostics = 4,
}

/// Packs `(purpose, optimizer index, repetition)` into a 64-bit stream id:
/// 8 bits purpose, 24 bits optimizer index, 32 bits repetition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamId {
    pub purpose: Purpose,
    pub optimizer: u32,
    pub repetition: u32,
}

impl StreamId {
    pub fn new(purpose: Purpose, optimizer: u32, repetition: u32) -> Self {
        assert!(optimizer < (1 << 24), "optimizer index exceeds 24 bits");
        Self {
            purpose,
            optimizer,
            repetition,
        }
    }

    pub fn oracle(repetition: u32) -> Self {
        Self::new(Purpose::Oracle, 0, repetition)
    }

    pub fn output(optimizer: u32, repetition: u32) -> Self {
        Self::new(Purpose::Output, optimizer, repetition)
    }

    pub fn to_u64(self) -> u64 {
        (u64::from(self.purpose as u8) << 56)
            | (u64::from(self.optimizer) << 32)
            | u64::from(self.repetition)
    }

    pub fn stream(self, seed: u64) -> RngStream {
        RngStream::new(seed, self.to_u64())
    }
}

/// `dim` i.i.d. draws from N(0, sigma^2). `sigma == 0` returns zeros without
/// consuming randomness.
pub fn gaussian(rng: &mut RngStream, dim: usize, sigma: f64) -> Vector {
    assert!(
        sigma >= 0.0 && sigma.is_finite(),
        "sigma must be finite and >= 0"
    );
    if sigma == 0.0 {
        return Vector::zeros(dim);
    }
    Vector::from_vec_unchecked((0..dim).map(|_| sigma * rng.standard_normal()).collect())
}
