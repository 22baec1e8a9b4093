use serde::Serialize;

use crate::diagnostics::RegretCheck;
use crate::optimizers::OptimizerConfig;
use crate::record::TrajectoryRecord;
use crate::vector::Vector;

/// One row of an averaged (or raw) series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub t: usize,
    pub grad_sq_norm: Option<f64>,
    pub f_value: Option<f64>,
    pub stepsize_mean: f64,
    /// Per-coordinate stepsizes, for per-coordinate optimizers.
    pub stepsize_coords: Option<Vec<f64>>,
}

impl From<&TrajectoryRecord> for SeriesPoint {
    fn from(r: &TrajectoryRecord) -> Self {
        Self {
            t: r.t,
            grad_sq_norm: r.true_grad_sq_norm,
            f_value: r.f_value,
            stepsize_mean: r.stepsize.mean(),
            stepsize_coords: r.stepsize.coords().map(<[f64]>::to_vec),
        }
    }
}

/// What is kept of each repetition besides its series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepetitionSummary {
    pub output_index: usize,
    pub output_point: Vector,
    pub final_point: Vector,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regret: Option<RegretSummary>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegretSummary {
    pub lipschitz: f64,
    pub worst_margin: f64,
    pub gradient_term: f64,
    pub log_bound: Option<f64>,
    pub holds: bool,
}

impl From<RegretCheck> for RegretSummary {
    fn from(c: RegretCheck) -> Self {
        Self {
            lipschitz: c.lipschitz,
            worst_margin: c.worst_margin,
            gradient_term: c.gradient_term,
            log_bound: c.log_bound,
            holds: c.holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerSeries {
    pub name: String,
    pub config: OptimizerConfig,
    /// Arithmetic mean over repetitions, one point per recorded round.
    pub averaged: Vec<SeriesPoint>,
    /// Per-repetition series, when requested.
    pub raw: Option<Vec<Vec<SeriesPoint>>>,
    pub repetitions: Vec<RepetitionSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub horizon: usize,
    pub report_every: usize,
    pub repetitions: usize,
    pub seed: u64,
    /// `f*`, when the oracle declares it; enables the optimality-gap column.
    pub optimum_value: Option<f64>,
    pub series: Vec<OptimizerSeries>,
}

impl ResultTable {
    pub fn get(&self, name: &str) -> Option<&OptimizerSeries> {
        self.series.iter().find(|s| s.name == name)
    }
}

/// Running sums over repetitions of a series, added in repetition order.
#[derive(Debug, Clone)]
pub(crate) struct SeriesAccumulator {
    count: usize,
    points: Vec<SeriesPoint>,
}

impl SeriesAccumulator {
    pub(crate) fn new() -> Self {
        Self {
            count: 0,
            points: Vec::new(),
        }
    }

    pub(crate) fn add(&mut self, series: &[SeriesPoint]) {
        if self.count == 0 {
            self.points = series.to_vec();
        } else {
            debug_assert_eq!(self.points.len(), series.len());
            for (acc, p) in self.points.iter_mut().zip(series) {
                acc.grad_sq_norm = add_opt(acc.grad_sq_norm, p.grad_sq_norm);
                acc.f_value = add_opt(acc.f_value, p.f_value);
                acc.stepsize_mean += p.stepsize_mean;
                if let (Some(a), Some(b)) = (&mut acc.stepsize_coords, &p.stepsize_coords) {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                }
            }
        }
        self.count += 1;
    }

    pub(crate) fn mean(mut self) -> Vec<SeriesPoint> {
        if self.count > 1 {
            let n = self.count as f64;
            for p in &mut self.points {
                p.grad_sq_norm = p.grad_sq_norm.map(|v| v / n);
                p.f_value = p.f_value.map(|v| v / n);
                p.stepsize_mean /= n;
                if let Some(c) = &mut p.stepsize_coords {
                    c.iter_mut().for_each(|v| *v /= n);
                }
            }
        }
        self.points
    }
}

fn add_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(a? + b?)
}
