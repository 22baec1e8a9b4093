use crate::error::{Error, Result};
use crate::vector::Vector;

use super::ftrl::clipped_ratio;
use super::{FtrlState, SurrogateForm};

/// One scalar FTRL learner per coordinate, all sharing `α` and `M`.
/// Coordinate `i` sees only the `i`-th entries of past gradient pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordFtrlState {
    alpha: f64,
    m: f64,
    sum_inner: Vec<f64>,
    sum_sq: Vec<f64>,
    t: usize,
}

impl CoordFtrlState {
    pub fn new(alpha: f64, m: f64, dim: usize) -> Result<Self> {
        // reuse the scalar validation
        FtrlState::new(alpha, m)?;
        if dim == 0 {
            return Err(Error::contract("per-coordinate learner needs dim >= 1"));
        }
        Ok(Self {
            alpha,
            m,
            sum_inner: vec![0.0; dim],
            sum_sq: vec![0.0; dim],
            t: 1,
        })
    }

    pub fn dim(&self) -> usize {
        self.sum_sq.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn sum_inner(&self) -> &[f64] {
        &self.sum_inner
    }

    pub fn sum_sq(&self) -> &[f64] {
        &self.sum_sq
    }

    /// The scalar learner of coordinate `i`.
    pub fn coordinate(&self, i: usize) -> FtrlState {
        let mut s = FtrlState::new(self.alpha, self.m).expect("validated at construction");
        s.observe_stats(self.sum_inner[i], self.sum_sq[i]);
        s
    }

    pub fn stepsizes(&self) -> Vector {
        Vector::from_vec_unchecked(
            self.sum_inner
                .iter()
                .zip(&self.sum_sq)
                .map(|(i, s)| clipped_ratio(self.alpha, self.m, SurrogateForm::HalfM, *i, *s))
                .collect(),
        )
    }

    /// Feeds `ℓ_{t,i}(η) = (M/2)η² gᵢ² − η gᵢ g'ᵢ` to each coordinate.
    pub fn observe(&mut self, g: &Vector, g_prime: &Vector) -> Result<()> {
        g.check_dim(self.dim())?;
        g_prime.check_dim(self.dim())?;
        for (i, (gi, gpi)) in g.as_slice().iter().zip(g_prime.as_slice()).enumerate() {
            self.sum_inner[i] += gi * gpi;
            self.sum_sq[i] += gi * gi;
        }
        self.t += 1;
        Ok(())
    }
}

pub fn coord_ftrl_stepsize(state: &CoordFtrlState) -> Vector {
    state.stepsizes()
}
