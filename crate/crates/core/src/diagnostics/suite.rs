use std::fmt;

use crate::error::Result;
use crate::online::{FtrlState, SurrogateLoss};
use crate::optimizers::{run, OptimizerConfig, RunOptions};
use crate::oracles::{
    rosenbrock_f, rosenbrock_grad, sigmoid_loss_f, sigmoid_loss_grad, Dataset, GradientPair,
    RosenbrockOracle,
};
use crate::rng::{RngStream, StreamId};
use crate::vector::{sq_norm, Vector};

use super::{descent_check, finite_diff_grad, ftrl_argmin_oracle, smoothness_probe, DEFAULT_DRAWS};

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{mark}] {}: {}", self.name, self.detail)
    }
}

type Check = fn(u64) -> Result<(bool, String)>;

const CHECKS: [(&str, Check); 6] = [
    ("ftrl closed form vs golden-section argmin", closed_form),
    ("rosenbrock gradient vs finite differences", rosenbrock_fd),
    ("sigmoid loss gradient vs finite differences", sigmoid_fd),
    (
        "expected decrease bounded by surrogate (rosenbrock, sigma=5)",
        descent,
    ),
    (
        "noiseless rosenbrock: learned stepsize stays at 1/M",
        noiseless,
    ),
    ("rosenbrock smoothness near the optimum", smoothness),
];

/// Runs every check with seeds derived from `seed`. Errors inside a check are
/// reported as failures.
pub fn run_suite(seed: u64) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, check)| match check(seed) {
            Ok((passed, detail)) => CheckOutcome {
                name,
                passed,
                detail,
            },
            Err(e) => CheckOutcome {
                name,
                passed: false,
                detail: format!("error: {e}"),
            },
        })
        .collect()
}

fn uniform(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn closed_form(seed: u64) -> Result<(bool, String)> {
    let mut rng = RngStream::new(seed, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let alpha = [0.1, 1.0, 10.0][rng.index(3)];
        let m = [0.5, 1.0, 2.0][rng.index(3)];
        let len = rng.index(51);
        let mut state = FtrlState::new(alpha, m)?;
        let mut history = Vec::with_capacity(len);
        for _ in 0..len {
            let g = Vector::new(vec![
                uniform(&mut rng, -1.0, 1.0),
                uniform(&mut rng, -1.0, 1.0),
            ])?;
            let gp = Vector::new(vec![
                uniform(&mut rng, -1.0, 1.0),
                uniform(&mut rng, -1.0, 1.0),
            ])?;
            state.observe(&SurrogateLoss::new(m, &g, &gp)?)?;
            history.push(GradientPair::new(g, gp)?);
        }
        worst = worst.max((ftrl_argmin_oracle(alpha, m, &history) - state.stepsize()).abs());
    }
    Ok((
        worst < 1e-8,
        format!("max |difference| {worst:.3e} over 200 histories"),
    ))
}

fn rosenbrock_fd(seed: u64) -> Result<(bool, String)> {
    let mut rng = RngStream::new(seed, 2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = Vector::new(vec![
            uniform(&mut rng, -2.0, 2.0),
            uniform(&mut rng, -1.0, 3.0),
        ])?;
        let fd = finite_diff_grad(rosenbrock_f, &x, 1e-6)?;
        let exact = rosenbrock_grad(&x);
        worst = worst.max(sq_norm(&fd.sub(&exact)?).sqrt());
    }
    Ok((
        worst < 1e-5,
        format!("max error {worst:.3e} over 100 points"),
    ))
}

fn sigmoid_fd(seed: u64) -> Result<(bool, String)> {
    let mut rng = RngStream::new(seed, 3);
    let (rows, cols) = (40, 6);
    let mut features = Vec::with_capacity(rows * cols);
    let mut labels = Vec::with_capacity(rows);
    for _ in 0..rows {
        for _ in 0..cols - 1 {
            features.push(uniform(&mut rng, -1.0, 1.0));
        }
        features.push(1.0);
        labels.push(if rng.index(2) == 0 { 1.0 } else { -1.0 });
    }
    let data = Dataset::new(features, labels, cols, true)?;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let x = Vector::new((0..cols).map(|_| uniform(&mut rng, -2.0, 2.0)).collect())?;
        let fd = finite_diff_grad(|p| sigmoid_loss_f(p, &data).unwrap_or(f64::NAN), &x, 1e-5)?;
        let exact = sigmoid_loss_grad(&x, data.rows())?;
        worst = worst.max(sq_norm(&fd.sub(&exact)?).sqrt());
    }
    Ok((
        worst < 1e-7,
        format!("max error {worst:.3e} over 20 points"),
    ))
}

fn descent(seed: u64) -> Result<(bool, String)> {
    let oracle = RosenbrockOracle::new(5.0);
    let mut rng = RngStream::new(seed, 4);
    let m = RosenbrockOracle::SMOOTHNESS_AT_OPTIMUM;
    let v = descent_check(
        &oracle,
        &Vector::zeros(2),
        1.0 / m,
        m,
        DEFAULT_DRAWS,
        &mut rng,
    )?;
    Ok((
        v.pass,
        format!(
            "mean decrease {:.4e}, mean surrogate {:.4e}, SE {:.2e}",
            v.mean_decrease, v.mean_surrogate, v.std_error
        ),
    ))
}

fn noiseless(seed: u64) -> Result<(bool, String)> {
    let oracle = RosenbrockOracle::new(0.0);
    let m = RosenbrockOracle::SMOOTHNESS_AT_OPTIMUM;
    let opts = RunOptions::new(2000, 1);
    let go = |cfg: &OptimizerConfig| {
        run(
            cfg,
            &oracle,
            Vector::zeros(2),
            &opts,
            &mut StreamId::oracle(0).stream(seed),
            &mut StreamId::output(0, 0).stream(seed),
        )
    };
    let learned = go(&OptimizerConfig::sgdol(m, 10.0))?;
    let fixed = go(&OptimizerConfig::Sgd { lr: 1.0 / m })?;
    let same_path = learned.final_point == fixed.final_point;
    let all_inverse_m = learned.records.iter().all(|r| r.stepsize.mean() == 1.0 / m);
    Ok((
        same_path && all_inverse_m,
        format!("identical iterates: {same_path}, every stepsize 1/M: {all_inverse_m}"),
    ))
}

fn smoothness(seed: u64) -> Result<(bool, String)> {
    let mut rng = RngStream::new(seed, 6);
    let sample = |r: &mut RngStream| {
        Vector::from_vec_unchecked(vec![
            1.0 + 1e-4 * r.standard_normal(),
            1.0 + 1e-4 * r.standard_normal(),
        ])
    };
    let probe = smoothness_probe(rosenbrock_grad, sample, 2000, &mut rng)?;
    let m = RosenbrockOracle::SMOOTHNESS_AT_OPTIMUM;
    Ok((
        (probe - m).abs() < 0.01 * m,
        format!("probe {probe:.2} vs M = {m}"),
    ))
}
