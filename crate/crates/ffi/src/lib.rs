//! C ABI for the sgdol optimizers and oracles.
//!
//! Objects are opaque handles created by `*_new` functions and released by
//! the matching `*_free`. Every fallible call returns an [`SgdolStatus`];
//! on failure, [`sgdol_last_error`] gives a message for the calling thread.
//! Panics never cross the boundary: they are caught and reported as
//! `SGDOL_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;
use std::sync::Arc;

use sgdol::harness::{run_experiment, write_outputs, ExperimentSpec};
use sgdol::online::FtrlState;
use sgdol::oracles::{
    load_libsvm, BatchSize, LibsvmOptions, QuadraticOracle, RosenbrockOracle, SigmoidLossOracle,
};
use sgdol::{Error, GradientPair, Optimizer, OptimizerConfig, RngStream, StochasticOracle, Vector};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgdolStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NonFinite = 4,
    Diverged = 5,
    ContractViolation = 6,
    ParseError = 7,
    ValidationError = 8,
    IoError = 9,
    Panic = 10,
}

/// A random stream: fixed by `(seed, stream_id)`.
pub struct SgdolRng(RngStream);

/// A stochastic gradient oracle.
pub struct SgdolOracle(Arc<dyn StochasticOracle>);

/// An optimizer with its current iterate.
pub struct SgdolOptimizer(Optimizer);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SgdolStatus {
    match e {
        Error::DimensionMismatch { .. } => SgdolStatus::DimensionMismatch,
        Error::NonFinite { .. } => SgdolStatus::NonFinite,
        Error::Diverged { .. } => SgdolStatus::Diverged,
        Error::Contract(_) => SgdolStatus::ContractViolation,
        Error::Parse { .. } => SgdolStatus::ParseError,
        Error::Validation(_) => SgdolStatus::ValidationError,
        Error::Io { .. } => SgdolStatus::IoError,
    }
}

/// Internal failure carrying its status and message.
struct Failure(SgdolStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SgdolStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(SgdolStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SgdolStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SgdolStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("panic: {msg}"));
            SgdolStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn vector(p: *const f64, len: usize, what: &str) -> Result<Vector, Failure> {
    Ok(Vector::new(slice(p, len, what)?.to_vec())?)
}

unsafe fn string(p: *const c_char, what: &str) -> Result<String, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn out_ptr<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message for the last failed call on this thread, or null if the last
/// call succeeded. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sgdol_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a random stream.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sgdol_rng_new(
    seed: u64,
    stream_id: u64,
    out: *mut *mut SgdolRng,
) -> SgdolStatus {
    guard(|| out_ptr(out, SgdolRng(RngStream::new(seed, stream_id))))
}

/// # Safety
/// `rng` must come from [`sgdol_rng_new`] (or be null) and not be used after.
#[no_mangle]
pub unsafe extern "C" fn sgdol_rng_free(rng: *mut SgdolRng) {
    if !rng.is_null() {
        drop(Box::from_raw(rng));
    }
}

/// Two-dimensional Rosenbrock function with additive Gaussian gradient noise
/// of standard deviation `sigma`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sgdol_oracle_rosenbrock(
    sigma: f64,
    out: *mut *mut SgdolOracle,
) -> SgdolStatus {
    guard(|| {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(invalid(format!(
                "sigma must be finite and >= 0, got {sigma}"
            )));
        }
        out_ptr(out, SgdolOracle(Arc::new(RosenbrockOracle::new(sigma))))
    })
}

/// `f(x) = ½ Σ diag[i]·x[i]²` with per-coordinate Gaussian noise `noise[i]`
/// (`noise` may be null for none).
///
/// # Safety
/// `diag` (and `noise`, if non-null) must point to `dim` doubles; `out` must
/// be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sgdol_oracle_quadratic(
    diag: *const f64,
    noise: *const f64,
    dim: usize,
    out: *mut *mut SgdolOracle,
) -> SgdolStatus {
    guard(|| {
        let diag = slice(diag, dim, "diag")?.to_vec();
        let noise = if noise.is_null() {
            vec![0.0; dim]
        } else {
            slice(noise, dim, "noise")?.to_vec()
        };
        out_ptr(
            out,
            SgdolOracle(Arc::new(QuadraticOracle::new(diag, noise)?)),
        )
    })
}

/// Bounded-loss classification objective over a LibSVM file (bias column
/// appended). `batch_size == 0` means full batch; `n_features == 0` infers
/// the feature count.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sgdol_oracle_libsvm(
    path: *const c_char,
    batch_size: usize,
    n_features: usize,
    out: *mut *mut SgdolOracle,
) -> SgdolStatus {
    guard(|| {
        let path = string(path, "path")?;
        let opts = LibsvmOptions {
            n_features: (n_features > 0).then_some(n_features),
            ..LibsvmOptions::default()
        };
        let data = load_libsvm(PathBuf::from(path), opts)?;
        let batch = if batch_size == 0 {
            BatchSize::Full
        } else {
            BatchSize::Rows(batch_size)
        };
        out_ptr(
            out,
            SgdolOracle(Arc::new(SigmoidLossOracle::new(Arc::new(data), batch)?)),
        )
    })
}

/// # Safety
/// `oracle` must come from an `sgdol_oracle_*` constructor (or be null).
#[no_mangle]
pub unsafe extern "C" fn sgdol_oracle_free(oracle: *mut SgdolOracle) {
    if !oracle.is_null() {
        drop(Box::from_raw(oracle));
    }
}

/// Dimension of the oracle's domain (0 for a null handle).
///
/// # Safety
/// `oracle` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn sgdol_oracle_dim(oracle: *const SgdolOracle) -> usize {
    oracle.as_ref().map_or(0, |o| o.0.dim())
}

/// Draws a pair of independent stochastic gradients at `x` into `g` and
/// `g_prime`.
///
/// # Safety
/// `x`, `g` and `g_prime` must point to `dim` doubles; handles must be valid.
#[no_mangle]
pub unsafe extern "C" fn sgdol_oracle_sample_pair(
    oracle: *const SgdolOracle,
    x: *const f64,
    dim: usize,
    rng: *mut SgdolRng,
    g: *mut f64,
    g_prime: *mut f64,
) -> SgdolStatus {
    guard(|| {
        let oracle = oracle.as_ref().ok_or_else(|| null("oracle"))?;
        let rng = rng.as_mut().ok_or_else(|| null("rng"))?;
        let x = vector(x, dim, "x")?;
        let pair = oracle.0.sample_pair(&x, &mut rng.0)?;
        slice_mut(g, dim, "g")?.copy_from_slice(pair.g.as_slice());
        slice_mut(g_prime, dim, "g_prime")?.copy_from_slice(pair.g_prime.as_slice());
        Ok(())
    })
}

/// Exact `f(x)`.
///
/// # Safety
/// `x` must point to `dim` doubles; `value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sgdol_oracle_value(
    oracle: *const SgdolOracle,
    x: *const f64,
    dim: usize,
    value: *mut f64,
) -> SgdolStatus {
    guard(|| {
        let oracle = oracle.as_ref().ok_or_else(|| null("oracle"))?;
        let value = value.as_mut().ok_or_else(|| null("value"))?;
        let x = vector(x, dim, "x")?;
        x.check_dim(oracle.0.dim())?;
        *value = oracle.0.value(&x).ok_or_else(|| {
            Failure(
                SgdolStatus::ContractViolation,
                "oracle has no exact f".into(),
            )
        })?;
        Ok(())
    })
}

unsafe fn new_optimizer(
    config: OptimizerConfig,
    x1: *const f64,
    dim: usize,
    out: *mut *mut SgdolOptimizer,
) -> Result<(), Failure> {
    let x1 = vector(x1, dim, "x1")?;
    out_ptr(out, SgdolOptimizer(Optimizer::new(&config, x1)?))
}

/// SGD with a single stepsize learned by FTRL on surrogate losses.
///
/// # Safety
/// `x1` must point to `dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sgdol_optimizer_new(
    m: f64,
    alpha: f64,
    x1: *const f64,
    dim: usize,
    out: *mut *mut SgdolOptimizer,
) -> SgdolStatus {
    guard(|| new_optimizer(OptimizerConfig::sgdol(m, alpha), x1, dim, out))
}

/// Any optimizer, described by TOML text such as
/// `kind = "adam"\nlr = 0.01` (the keys of one `[[optimizer]]` entry).
///
/// # Safety
/// `config` must be nul-terminated; `x1` must point to `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn sgdol_optimizer_from_toml(
    config: *const c_char,
    x1: *const f64,
    dim: usize,
    out: *mut *mut SgdolOptimizer,
) -> SgdolStatus {
    guard(|| {
        let text = string(config, "config")?;
        let config: OptimizerConfig = toml::from_str(&text)
            .map_err(|e| Failure(SgdolStatus::ValidationError, e.message().to_string()))?;
        new_optimizer(config, x1, dim, out)
    })
}

/// # Safety
/// `opt` must come from an `sgdol_optimizer_*` constructor (or be null).
#[no_mangle]
pub unsafe extern "C" fn sgdol_optimizer_free(opt: *mut SgdolOptimizer) {
    if !opt.is_null() {
        drop(Box::from_raw(opt));
    }
}

/// Plays one round with the pair `(g, g_prime)`. Writes the mean stepsize
/// used to `eta` when it is non-null.
///
/// # Safety
/// `g` and `g_prime` must point to `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn sgdol_optimizer_step(
    opt: *mut SgdolOptimizer,
    g: *const f64,
    g_prime: *const f64,
    dim: usize,
    eta: *mut f64,
) -> SgdolStatus {
    guard(|| {
        let opt = opt.as_mut().ok_or_else(|| null("optimizer"))?;
        let pair = GradientPair::new(vector(g, dim, "g")?, vector(g_prime, dim, "g_prime")?)?;
        let report = opt.0.step(&pair)?;
        if let Some(eta) = eta.as_mut() {
            *eta = report.eta.mean();
        }
        Ok(())
    })
}

/// Copies the current iterate into `x`.
///
/// # Safety
/// `x` must point to `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn sgdol_optimizer_x(
    opt: *const SgdolOptimizer,
    x: *mut f64,
    dim: usize,
) -> SgdolStatus {
    guard(|| {
        let opt = opt.as_ref().ok_or_else(|| null("optimizer"))?;
        if dim != opt.0.dim() {
            return Err(Error::DimensionMismatch {
                expected: opt.0.dim(),
                found: dim,
            }
            .into());
        }
        slice_mut(x, dim, "x")?.copy_from_slice(opt.0.x().as_slice());
        Ok(())
    })
}

/// Closed-form FTRL stepsize from the running sums `Σ⟨g, g'⟩` and `Σ‖g‖²`.
///
/// # Safety
/// `eta` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sgdol_ftrl_stepsize(
    alpha: f64,
    m: f64,
    sum_inner: f64,
    sum_sq: f64,
    eta: *mut f64,
) -> SgdolStatus {
    guard(|| {
        let eta = eta.as_mut().ok_or_else(|| null("eta"))?;
        let state = FtrlState::from_sums(alpha, m, sum_inner, sum_sq)?;
        *eta = state.stepsize();
        Ok(())
    })
}

/// Runs the experiment in a TOML config file and writes its CSV/JSON output
/// to `output_dir` (or the config's `output` when null).
///
/// # Safety
/// `config_path` must be nul-terminated; `output_dir` nul-terminated or null.
#[no_mangle]
pub unsafe extern "C" fn sgdol_run_config(
    config_path: *const c_char,
    output_dir: *const c_char,
) -> SgdolStatus {
    guard(|| {
        let spec = ExperimentSpec::load(PathBuf::from(string(config_path, "config_path")?))?;
        let dir = if output_dir.is_null() {
            spec.experiment
                .output
                .clone()
                .ok_or_else(|| invalid("no output directory given"))?
        } else {
            PathBuf::from(string(output_dir, "output_dir")?)
        };
        let table = run_experiment(&spec)?;
        write_outputs(&table, &dir)?;
        Ok(())
    })
}
