use crate::error::{Error, Result};
use crate::online::RegretLedger;
use crate::oracles::StochasticOracle;
use crate::record::TrajectoryRecord;
use crate::rng::RngStream;
use crate::vector::{sq_norm, Vector};

use super::{Optimizer, OptimizerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Number of rounds `T`.
    pub horizon: usize,
    /// Record rounds `1, 1 + r, 1 + 2r, …`.
    pub report_every: usize,
    /// Keep per-round regret records in the ledgers.
    pub keep_regret_steps: bool,
}

impl RunOptions {
    pub fn new(horizon: usize, report_every: usize) -> Self {
        Self {
            horizon,
            report_every,
            keep_regret_steps: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<TrajectoryRecord>,
    /// Uniformly drawn round `k ∈ {1, …, T}`.
    pub output_index: usize,
    /// `x_k`, the iterate played at round `k`.
    pub output_point: Vector,
    /// `x_{T+1}`.
    pub final_point: Vector,
    pub ledger: Option<RegretLedger>,
    pub beta_ledger: Option<RegretLedger>,
}

/// Runs `T` rounds from `x1`. Pairs come from `oracle_rng`; the output round
/// is drawn from `output_rng` before the first step.
pub fn run(
    config: &OptimizerConfig,
    oracle: &dyn StochasticOracle,
    x1: Vector,
    opts: &RunOptions,
    oracle_rng: &mut RngStream,
    output_rng: &mut RngStream,
) -> Result<RunOutput> {
    if opts.horizon == 0 {
        return Err(Error::contract("horizon must be at least 1"));
    }
    if opts.report_every == 0 {
        return Err(Error::contract("report_every must be at least 1"));
    }
    x1.check_dim(oracle.dim())?;
    let mut opt = Optimizer::with_diagnostics(config, x1, opts.keep_regret_steps)?;
    let output_index = 1 + output_rng.index(opts.horizon);
    let mut output_point = None;
    let mut records = Vec::with_capacity(opts.horizon.div_ceil(opts.report_every));

    for t in 1..=opts.horizon {
        if t == output_index {
            output_point = Some(opt.x().clone());
        }
        let recording = (t - 1) % opts.report_every == 0;
        let (f_value, true_grad_sq_norm) = if recording {
            (
                oracle.value(opt.x()),
                oracle.gradient(opt.x()).map(|g| sq_norm(&g)),
            )
        } else {
            (None, None)
        };
        let pair = oracle.sample_pair(opt.x(), oracle_rng)?;
        let report = opt.step(&pair)?;
        if recording {
            records.push(TrajectoryRecord {
                t,
                f_value,
                true_grad_sq_norm,
                stepsize: report.eta,
                surrogate_loss: report.surrogate,
                cumulative_regret_lhs: opt.cumulative_surrogate(),
            });
        }
    }

    Ok(RunOutput {
        records,
        output_index,
        output_point: output_point.expect("output round lies within the horizon"),
        ledger: opt.ledger().cloned(),
        beta_ledger: opt.beta_ledger().cloned(),
        final_point: opt.x().clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{QuadraticOracle, RosenbrockOracle};
    use crate::rng::StreamId;

    fn streams(rep: u32) -> (RngStream, RngStream) {
        (
            StreamId::oracle(rep).stream(5),
            StreamId::output(0, rep).stream(5),
        )
    }

    #[test]
    fn record_schedule() {
        let oracle = QuadraticOracle::noiseless(vec![1.0]).unwrap();
        let (mut a, mut b) = streams(0);
        for (t, r, n) in [(10, 3, 4), (9, 3, 3), (1, 5, 1), (5, 1, 5)] {
            let out = run(
                &OptimizerConfig::Sgd { lr: 0.1 },
                &oracle,
                Vector::new(vec![1.0]).unwrap(),
                &RunOptions::new(t, r),
                &mut a,
                &mut b,
            )
            .unwrap();
            assert_eq!(out.records.len(), n);
            assert_eq!(out.records[0].t, 1);
            assert!(out.records.iter().all(|rec| (rec.t - 1) % r == 0));
            assert!((1..=t).contains(&out.output_index));
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let oracle = RosenbrockOracle::new(1.0);
        let go = || {
            let (mut a, mut b) = streams(3);
            run(
                &OptimizerConfig::sgdol(1002.0, 10.0),
                &oracle,
                Vector::zeros(2),
                &RunOptions::new(500, 7),
                &mut a,
                &mut b,
            )
            .unwrap()
        };
        let (x, y) = (go(), go());
        assert_eq!(x.records, y.records);
        assert_eq!(x.output_index, y.output_index);
        assert_eq!(x.final_point, y.final_point);
    }

    #[test]
    fn records_surrogate_only_for_sgdol() {
        let oracle = RosenbrockOracle::new(0.5);
        let (mut a, mut b) = streams(0);
        let out = run(
            &OptimizerConfig::Sgd { lr: 1e-3 },
            &oracle,
            Vector::zeros(2),
            &RunOptions::new(20, 1),
            &mut a,
            &mut b,
        )
        .unwrap();
        assert!(out.records.iter().all(|r| r.surrogate_loss.is_none()));
        assert!(out.records.iter().all(|r| r.f_value.is_some()));
        let (mut a, mut b) = streams(0);
        let out = run(
            &OptimizerConfig::sgdol(1002.0, 10.0),
            &oracle,
            Vector::zeros(2),
            &RunOptions::new(20, 1),
            &mut a,
            &mut b,
        )
        .unwrap();
        let mut total = 0.0;
        for r in &out.records {
            total += r.surrogate_loss.unwrap();
            assert!((r.cumulative_regret_lhs.unwrap() - total).abs() < 1e-12);
        }
        assert_eq!(out.ledger.unwrap().rounds(), 20);
    }

    #[test]
    fn divergence_reported_with_round() {
        let oracle = QuadraticOracle::noiseless(vec![1.0]).unwrap();
        let (mut a, mut b) = streams(0);
        let err = run(
            &OptimizerConfig::Sgd { lr: 1e200 },
            &oracle,
            Vector::new(vec![1e200]).unwrap(),
            &RunOptions::new(10, 1),
            &mut a,
            &mut b,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Diverged { t: 1 }));
    }

    #[test]
    fn rejects_bad_options() {
        let oracle = QuadraticOracle::noiseless(vec![1.0]).unwrap();
        let (mut a, mut b) = streams(0);
        let cfg = OptimizerConfig::Sgd { lr: 0.1 };
        let x = Vector::new(vec![1.0]).unwrap();
        assert!(run(
            &cfg,
            &oracle,
            x.clone(),
            &RunOptions::new(0, 1),
            &mut a,
            &mut b
        )
        .is_err());
        assert!(run(&cfg, &oracle, x, &RunOptions::new(1, 0), &mut a, &mut b).is_err());
        assert!(run(
            &cfg,
            &oracle,
            Vector::zeros(2),
            &RunOptions::new(1, 1),
            &mut a,
            &mut b
        )
        .is_err());
    }
}
