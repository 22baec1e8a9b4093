use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, FieldError, Result};
use crate::optimizers::OptimizerConfig;
use crate::oracles::{
    balance_subsample, load_libsvm, BatchSize, LibsvmOptions, QuadraticOracle, RosenbrockOracle,
    SigmoidLossOracle, StochasticOracle,
};
use crate::rng::{Purpose, StreamId};
use crate::vector::Vector;

/// A complete experiment: one oracle, several optimizers, repeated runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub experiment: ExperimentSettings,
    pub oracle: OracleSpec,
    #[serde(rename = "optimizer")]
    pub optimizers: Vec<NamedOptimizer>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSettings {
    /// Number of rounds `T`.
    #[serde(alias = "T")]
    pub horizon: usize,
    pub repetitions: usize,
    pub seed: u64,
    /// Defaults to `max(1, T/500)`.
    #[serde(default)]
    pub report_every: Option<usize>,
    /// Output directory. Relative paths resolve against the config file.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Starting point; all zeros when absent.
    #[serde(default)]
    pub x1: Option<Vec<f64>>,
    /// Also write every repetition's series.
    #[serde(default)]
    pub keep_raw: bool,
    /// Keep per-round regret records and check the FTRL bound after each run.
    #[serde(default)]
    pub check_regret: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleSpec {
    Rosenbrock {
        sigma: f64,
    },
    Sigmoid {
        path: PathBuf,
        batch_size: BatchSpec,
        /// Subsample the majority class down to the minority's size.
        #[serde(default)]
        balance: bool,
        /// Feature count before the bias column; inferred when absent.
        #[serde(default)]
        n_features: Option<usize>,
    },
    Quadratic {
        diag: Vec<f64>,
        #[serde(default)]
        noise: Option<Vec<f64>>,
    },
}

/// Minibatch size: `"full"` or a row count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BatchSpec {
    Rows(usize),
    Named(FullBatch),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FullBatch {
    Full,
}

impl From<BatchSpec> for BatchSize {
    fn from(b: BatchSpec) -> Self {
        match b {
            BatchSpec::Rows(n) => BatchSize::Rows(n),
            BatchSpec::Named(FullBatch::Full) => BatchSize::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedOptimizer {
    pub name: String,
    #[serde(flatten)]
    pub config: OptimizerConfig,
}

impl ExperimentSpec {
    /// Reads and validates a config file. Relative paths inside it resolve
    /// against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut spec = Self::parse(&text)?;
        spec.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(spec)
    }

    /// Parses and validates TOML text.
    pub fn parse(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .and_then(|s| text.get(s))
                .map(|s| s.trim().to_string())
                .unwrap_or_default();
            Error::Validation(vec![FieldError::new(field, e.message().trim())])
        })?;
        spec.validate()?;
        Ok(spec)
    }

    fn resolve_paths(&mut self, base: &Path) {
        if let Some(out) = &mut self.experiment.output {
            if out.is_relative() {
                *out = base.join(&*out);
            }
        }
        if let OracleSpec::Sigmoid { path, .. } = &mut self.oracle {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }

    pub fn report_every(&self) -> usize {
        self.experiment
            .report_every
            .unwrap_or((self.experiment.horizon / 500).max(1))
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let e = &self.experiment;
        if e.horizon == 0 {
            errs.push(FieldError::new("experiment.horizon", "must be >= 1"));
        }
        if e.repetitions == 0 {
            errs.push(FieldError::new("experiment.repetitions", "must be >= 1"));
        }
        if u32::try_from(e.repetitions).is_err() {
            errs.push(FieldError::new(
                "experiment.repetitions",
                "must fit in 32 bits",
            ));
        }
        if e.report_every == Some(0) {
            errs.push(FieldError::new("experiment.report_every", "must be >= 1"));
        }
        if let Some(x1) = &e.x1 {
            if x1.iter().any(|v| !v.is_finite()) {
                errs.push(FieldError::new("experiment.x1", "entries must be finite"));
            }
            if let Some(d) = self.oracle.known_dim() {
                if x1.len() != d {
                    errs.push(FieldError::new(
                        "experiment.x1",
                        format!("has {} entries, oracle dimension is {d}", x1.len()),
                    ));
                }
            }
        }
        errs.extend(self.oracle.validate());
        if self.optimizers.is_empty() {
            errs.push(FieldError::new(
                "optimizer",
                "at least one [[optimizer]] is required",
            ));
        }
        if self.optimizers.len() >= 1 << 24 {
            errs.push(FieldError::new("optimizer", "too many optimizers"));
        }
        let mut seen = HashSet::new();
        for (i, opt) in self.optimizers.iter().enumerate() {
            let prefix = format!("optimizer[{i}]");
            let valid_name = !opt.name.is_empty()
                && opt
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
                && !opt.name.starts_with('.');
            if !valid_name {
                errs.push(FieldError::new(
                    format!("{prefix}.name"),
                    "must be non-empty and use only letters, digits, '_', '-', '.'",
                ));
            }
            if !seen.insert(opt.name.as_str()) {
                errs.push(FieldError::new(
                    format!("{prefix}.name"),
                    format!("duplicate name `{}`", opt.name),
                ));
            }
            errs.extend(opt.config.validate(&prefix));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }
}

impl OracleSpec {
    /// Dimension when it can be known without reading a dataset.
    pub fn known_dim(&self) -> Option<usize> {
        match self {
            OracleSpec::Rosenbrock { .. } => Some(2),
            OracleSpec::Quadratic { diag, .. } => Some(diag.len()),
            OracleSpec::Sigmoid { n_features, .. } => n_features.map(|n| n + 1),
        }
    }

    fn validate(&self) -> Vec<FieldError> {
        let mut errs = Vec::new();
        match self {
            OracleSpec::Rosenbrock { sigma } => {
                if !(sigma.is_finite() && *sigma >= 0.0) {
                    errs.push(FieldError::new(
                        "oracle.sigma",
                        format!("must be >= 0, got {sigma}"),
                    ));
                }
            }
            OracleSpec::Sigmoid {
                batch_size,
                n_features,
                ..
            } => {
                if *batch_size == BatchSpec::Rows(0) {
                    errs.push(FieldError::new(
                        "oracle.batch_size",
                        "must be >= 1 or \"full\"",
                    ));
                }
                if *n_features == Some(0) {
                    errs.push(FieldError::new("oracle.n_features", "must be >= 1"));
                }
            }
            OracleSpec::Quadratic { diag, noise } => {
                if diag.is_empty() {
                    errs.push(FieldError::new("oracle.diag", "must be non-empty"));
                }
                if diag.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
                    errs.push(FieldError::new(
                        "oracle.diag",
                        "entries must be finite and >= 0",
                    ));
                }
                if let Some(noise) = noise {
                    if noise.len() != diag.len() {
                        errs.push(FieldError::new(
                            "oracle.noise",
                            "must have the same length as diag",
                        ));
                    }
                    if noise.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
                        errs.push(FieldError::new(
                            "oracle.noise",
                            "entries must be finite and >= 0",
                        ));
                    }
                }
            }
        }
        errs
    }

    /// Builds the oracle, loading (and optionally balancing) the dataset.
    /// Balancing draws from a dedicated stream of `seed`.
    pub fn build(&self, seed: u64) -> Result<Arc<dyn StochasticOracle>> {
        Ok(match self {
            OracleSpec::Rosenbrock { sigma } => Arc::new(RosenbrockOracle::new(*sigma)),
            OracleSpec::Quadratic { diag, noise } => {
                let noise = noise.clone().unwrap_or_else(|| vec![0.0; diag.len()]);
                Arc::new(QuadraticOracle::new(diag.clone(), noise)?)
            }
            OracleSpec::Sigmoid {
                path,
                batch_size,
                balance,
                n_features,
            } => {
                let opts = LibsvmOptions {
                    n_features: *n_features,
                    ..LibsvmOptions::default()
                };
                let mut data = load_libsvm(path, opts)?;
                if *balance {
                    let mut rng = StreamId::new(Purpose::Subsample, 0, 0).stream(seed);
                    data = balance_subsample(&data, &mut rng)?;
                }
                Arc::new(SigmoidLossOracle::new(
                    Arc::new(data),
                    (*batch_size).into(),
                )?)
            }
        })
    }
}

/// Starting point for an oracle of dimension `dim`.
pub(crate) fn starting_point(settings: &ExperimentSettings, dim: usize) -> Result<Vector> {
    match &settings.x1 {
        Some(x1) => {
            let x = Vector::new(x1.clone())?;
            x.check_dim(dim)?;
            Ok(x)
        }
        None => Ok(Vector::zeros(dim)),
    }
}
