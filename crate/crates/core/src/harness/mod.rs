//! Seeded experiment runner: configuration, repetition averaging and output.

mod config;
mod output;
mod run;
mod table;

pub use config::{
    BatchSpec, ExperimentSettings, ExperimentSpec, FullBatch, NamedOptimizer, OracleSpec,
};
pub use output::{read_csv, write_csv, write_outputs};
pub use run::{run_experiment, run_with_oracle};
pub use table::{OptimizerSeries, RegretSummary, RepetitionSummary, ResultTable, SeriesPoint};
