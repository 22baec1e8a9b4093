//! Brute-force oracles and statistical checks used to verify the optimizers
//! independently of their own bookkeeping.

mod suite;

pub use suite::{run_suite, CheckOutcome};

use crate::error::{Error, Result};
use crate::online::{RegretLedger, SurrogateForm};
use crate::oracles::{GradientPair, StochasticOracle};
use crate::rng::RngStream;
use crate::vector::{dot, sq_norm, Vector};

/// Default number of draws for Monte Carlo checks.
pub const DEFAULT_DRAWS: usize = 100_000;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// `r(η) + Σ_j ℓ_j(η)` with `r(η) = (Mα/2)(η − 1/M)²`, summed term by term
/// from the raw pairs.
pub fn ftrl_objective(alpha: f64, m: f64, history: &[GradientPair], eta: f64) -> f64 {
    let d = eta - 1.0 / m;
    let mut total = 0.5 * m * alpha * d * d;
    for pair in history {
        let g = &pair.g;
        let gp = &pair.g_prime;
        let mut sq = 0.0;
        let mut inner = 0.0;
        for i in 0..g.dim() {
            sq += g[i] * g[i];
            inner += g[i] * gp[i];
        }
        total += 0.5 * m * eta * eta * sq - eta * inner;
    }
    total
}

/// `sign(F(a) − F(b))` for the objective `F` of [`ftrl_objective`], from the
/// factored difference `(a − b)·[(M/2)(a + b)Σ‖g‖² − Σ⟨g, g'⟩ + (Mα/2)(a + b − 2/M)]`.
/// Subtracting two evaluations of `F` loses the comparison to cancellation
/// well before the bracket reaches `1e-10`.
fn objective_cmp(alpha: f64, m: f64, history: &[GradientPair], a: f64, b: f64) -> f64 {
    let s = a + b;
    let mut bracket = 0.5 * m * alpha * (s - 2.0 / m);
    for pair in history {
        let g = &pair.g;
        let gp = &pair.g_prime;
        for i in 0..g.dim() {
            bracket += 0.5 * m * s * g[i] * g[i] - g[i] * gp[i];
        }
    }
    (a - b) * bracket
}

/// Minimizes [`ftrl_objective`] over `[0, 2/M]` by golden-section search,
/// shrinking the bracket to width `1e-10`. The endpoints are compared against
/// the interior result so boundary minimizers come back exactly.
pub fn ftrl_argmin_oracle(alpha: f64, m: f64, history: &[GradientPair]) -> f64 {
    let le = |a: f64, b: f64| objective_cmp(alpha, m, history, a, b) <= 0.0;
    let (mut lo, mut hi) = (0.0, 2.0 / m);
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    while hi - lo > 1e-10 {
        if le(a, b) {
            hi = b;
            b = a;
            a = hi - INV_PHI * (hi - lo);
        } else {
            lo = a;
            a = b;
            b = lo + INV_PHI * (hi - lo);
        }
    }
    let mut best = 0.5 * (lo + hi);
    for edge in [0.0, 2.0 / m] {
        if le(edge, best) {
            best = edge;
        }
    }
    best
}

/// Central differences `(f(x + h e_i) − f(x − h e_i)) / 2h`.
pub fn finite_diff_grad(f: impl Fn(&Vector) -> f64, x: &Vector, h: f64) -> Result<Vector> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::contract(format!("step h must be > 0, got {h}")));
    }
    let mut probe = x.clone();
    let mut out = Vec::with_capacity(x.dim());
    for i in 0..x.dim() {
        let xi = x[i];
        probe.as_mut_slice()[i] = xi + h;
        let up = f(&probe);
        probe.as_mut_slice()[i] = xi - h;
        let down = f(&probe);
        probe.as_mut_slice()[i] = xi;
        out.push((up - down) / (2.0 * h));
    }
    Vector::new(out)
}

/// Outcome of [`descent_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentVerdict {
    pub draws: usize,
    /// Mean of `f(x − ηg) − f(x)`.
    pub mean_decrease: f64,
    /// Mean of `ℓ(η)` over the same draws.
    pub mean_surrogate: f64,
    /// Standard error of the per-draw difference `decrease − surrogate`.
    pub std_error: f64,
    pub pass: bool,
}

/// Checks `E[f(x − ηg) − f(x)] ≤ E[ℓ(η)]` at a fixed point and stepsize by
/// Monte Carlo, where `ℓ(η) = (M/2)η²‖g‖² − η⟨g, g'⟩`. Passes when the mean
/// gap is at most three standard errors above zero, after allowing for
/// rounding in `f`.
pub fn descent_check(
    oracle: &dyn StochasticOracle,
    x: &Vector,
    eta: f64,
    m: f64,
    draws: usize,
    rng: &mut RngStream,
) -> Result<DescentVerdict> {
    if !oracle.capabilities().exact_f {
        return Err(Error::contract(
            "descent check needs an oracle with exact f",
        ));
    }
    if draws == 0 {
        return Err(Error::contract("need at least one draw"));
    }
    let f0 = oracle.value(x).expect("exact_f oracle returns a value");
    let mut sum_dec = 0.0;
    let mut sum_sur = 0.0;
    // Welford: identical draws give exactly zero variance
    let mut mean_gap = 0.0;
    let mut m2 = 0.0;
    let mut scale: f64 = f0.abs();
    for k in 1..=draws {
        let pair = oracle.sample_pair(x, rng)?;
        let next = x.sub(&pair.g.scaled(eta))?;
        let f1 = oracle.value(&next).expect("exact_f oracle returns a value");
        let dec = f1 - f0;
        let sur = 0.5 * m * eta * eta * sq_norm(&pair.g) - eta * dot(&pair.g, &pair.g_prime)?;
        scale = scale.max(f1.abs());
        sum_dec += dec;
        sum_sur += sur;
        let gap = dec - sur;
        let delta = gap - mean_gap;
        mean_gap += delta / k as f64;
        m2 += delta * (gap - mean_gap);
    }
    let n = draws as f64;
    let var = if draws > 1 { m2 / (n - 1.0) } else { 0.0 };
    let std_error = (var / n).sqrt();
    let rounding = 8.0 * f64::EPSILON * scale;
    Ok(DescentVerdict {
        draws,
        mean_decrease: sum_dec / n,
        mean_surrogate: sum_sur / n,
        std_error,
        pass: mean_gap <= 3.0 * std_error + rounding,
    })
}

/// Largest `‖∇f(x₁) − ∇f(x₂)‖ / ‖x₁ − x₂‖` over `pairs` sampled point pairs:
/// an empirical lower bound on the smoothness constant over the sampled
/// region. Coincident pairs are skipped.
pub fn smoothness_probe(
    grad: impl Fn(&Vector) -> Vector,
    mut sample: impl FnMut(&mut RngStream) -> Vector,
    pairs: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    if pairs == 0 {
        return Err(Error::contract("need at least one pair"));
    }
    let mut best: f64 = 0.0;
    for _ in 0..pairs {
        let a = sample(rng);
        let b = sample(rng);
        let dx = sq_norm(&a.sub(&b)?).sqrt();
        if dx == 0.0 {
            continue;
        }
        let dg = sq_norm(&grad(&a).sub(&grad(&b))?).sqrt();
        best = best.max(dg / dx);
    }
    Ok(best)
}

/// Result of [`regret_grid_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretCheck {
    /// `L`: the largest gradient norm the ledger saw.
    pub lipschitz: f64,
    /// `min_η (rhs(η) − regret(η))` over the grid; negative means violated.
    pub worst_margin: f64,
    pub gradient_term: f64,
    /// `(5L²/M)·ln(1 + L²T/α)`, for the `(M/2)η²` surrogate.
    pub log_bound: Option<f64>,
    pub holds: bool,
}

/// Compares `Regret_T(η)` with the FTRL bound at `points` evenly spaced
/// stepsizes covering `[0, 2/M]`, and the bound's gradient term with its
/// logarithmic bound at `L = max ‖g‖`. No tolerance is applied.
pub fn regret_grid_check(ledger: &RegretLedger, points: usize) -> Result<RegretCheck> {
    if points < 2 {
        return Err(Error::contract("grid needs at least two points"));
    }
    let hi = 2.0 / ledger.m();
    let mut worst_margin = f64::INFINITY;
    for k in 0..points {
        let eta = if k + 1 == points {
            hi
        } else {
            hi * k as f64 / (points - 1) as f64
        };
        worst_margin = worst_margin.min(ledger.regret_bound_rhs(eta)? - ledger.regret_vs(eta));
    }
    let lipschitz = ledger.max_grad_norm();
    let gradient_term = ledger.gradient_term()?;
    let log_bound = match ledger.form() {
        SurrogateForm::HalfM => Some(ledger.gradient_term_log_bound(lipschitz)?),
        SurrogateForm::FullM => None,
    };
    Ok(RegretCheck {
        lipschitz,
        worst_margin,
        gradient_term,
        log_bound,
        holds: worst_margin >= 0.0 && log_bound.is_none_or(|b| gradient_term <= b),
    })
}
