use rayon::prelude::*;

use crate::diagnostics::regret_grid_check;
use crate::error::Result;
use crate::optimizers::{run, RunOptions, RunOutput};
use crate::oracles::StochasticOracle;
use crate::rng::StreamId;

use super::config::{starting_point, ExperimentSpec};
use super::table::{
    OptimizerSeries, RepetitionSummary, ResultTable, SeriesAccumulator, SeriesPoint,
};

/// Grid size for the regret-bound check.
const REGRET_GRID: usize = 32;

/// Runs every optimizer for every repetition and averages the series.
///
/// Repetitions run in parallel, in batches of the thread-pool size, and are
/// folded into the averages in repetition order, so the result does not
/// depend on scheduling. All optimizers of one repetition share its oracle
/// stream.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    let oracle = spec.oracle.build(spec.experiment.seed)?;
    run_with_oracle(spec, oracle.as_ref())
}

/// [`run_experiment`] against an already-built oracle.
pub fn run_with_oracle(
    spec: &ExperimentSpec,
    oracle: &dyn StochasticOracle,
) -> Result<ResultTable> {
    spec.validate()?;
    let settings = &spec.experiment;
    let x1 = starting_point(settings, oracle.dim())?;
    let opts = RunOptions {
        horizon: settings.horizon,
        report_every: spec.report_every(),
        keep_regret_steps: settings.check_regret,
    };
    let batch = rayon::current_num_threads().max(1);
    let mut series = Vec::with_capacity(spec.optimizers.len());

    for (idx, named) in spec.optimizers.iter().enumerate() {
        let mut acc = SeriesAccumulator::new();
        let mut raw = settings.keep_raw.then(Vec::new);
        let mut reps = Vec::with_capacity(settings.repetitions);
        let all: Vec<u32> = (0..settings.repetitions as u32).collect();
        for chunk in all.chunks(batch) {
            let outputs: Vec<Result<(Vec<SeriesPoint>, RepetitionSummary)>> = chunk
                .par_iter()
                .map(|&rep| {
                    let out = run(
                        &named.config,
                        oracle,
                        x1.clone(),
                        &opts,
                        &mut StreamId::oracle(rep).stream(settings.seed),
                        &mut StreamId::output(idx as u32, rep).stream(settings.seed),
                    )?;
                    summarize(out, settings.check_regret)
                })
                .collect();
            for output in outputs {
                let (points, summary) = output?;
                acc.add(&points);
                if let Some(raw) = &mut raw {
                    raw.push(points);
                }
                reps.push(summary);
            }
        }
        series.push(OptimizerSeries {
            name: named.name.clone(),
            config: named.config.clone(),
            averaged: acc.mean(),
            raw,
            repetitions: reps,
        });
    }

    Ok(ResultTable {
        horizon: settings.horizon,
        report_every: opts.report_every,
        repetitions: settings.repetitions,
        seed: settings.seed,
        optimum_value: oracle.metadata().optimum_value,
        series,
    })
}

fn summarize(out: RunOutput, check_regret: bool) -> Result<(Vec<SeriesPoint>, RepetitionSummary)> {
    let regret = match (&out.ledger, check_regret) {
        (Some(ledger), true) => Some(regret_grid_check(ledger, REGRET_GRID)?.into()),
        _ => None,
    };
    let points = out.records.iter().map(SeriesPoint::from).collect();
    Ok((
        points,
        RepetitionSummary {
            output_index: out.output_index,
            output_point: out.output_point,
            final_point: out.final_point,
            regret,
        },
    ))
}
