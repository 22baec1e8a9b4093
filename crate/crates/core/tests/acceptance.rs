//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! prints exactly one PASS/FAIL line; exits non-zero if any criterion fails.
//!
//! Set `SGDOL_A9A` to a LibSVM a9a file to run the classification criterion
//! on the real dataset instead of the bundled 500-row fixture.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use sgdol::diagnostics::{descent_check, ftrl_argmin_oracle, regret_grid_check, RegretCheck};
use sgdol::harness::{
    run_with_oracle, BatchSpec, ExperimentSettings, ExperimentSpec, FullBatch, NamedOptimizer,
    OracleSpec, RegretSummary, ResultTable, SeriesPoint,
};
use sgdol::online::{ftrl_stepsize, FtrlState, SurrogateForm, SurrogateLoss};
use sgdol::optimizers::{run, Optimizer, OptimizerConfig, RunOptions};
use sgdol::oracles::{
    balance_subsample, load_libsvm, BatchSize, Dataset, LibsvmOptions, QuadraticOracle,
    RosenbrockOracle, SigmoidLossOracle, StochasticOracle,
};
use sgdol::rng::{Purpose, StreamId};
use sgdol::vector::sq_norm;
use sgdol::{GradientPair, RngStream, Vector};

const ROSENBROCK_M: f64 = 1002.0;
const ALPHA: f64 = 10.0;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// Regret checks gathered from every run that kept per-round records.
#[derive(Default)]
struct RegretLog {
    checks: Vec<(String, RegretSummary)>,
}

impl RegretLog {
    fn add(&mut self, label: &str, c: RegretCheck) {
        self.checks.push((label.to_string(), c.into()));
    }

    fn add_table(&mut self, label: &str, table: &ResultTable) {
        for s in &table.series {
            for (k, rep) in s.repetitions.iter().enumerate() {
                if let Some(r) = rep.regret {
                    self.checks
                        .push((format!("{label}/{}#{}", s.name, k + 1), r));
                }
            }
        }
    }
}

fn experiment(
    horizon: usize,
    repetitions: usize,
    seed: u64,
    report_every: usize,
    oracle: OracleSpec,
    optimizers: Vec<(&str, OptimizerConfig)>,
) -> ExperimentSpec {
    ExperimentSpec {
        experiment: ExperimentSettings {
            horizon,
            repetitions,
            seed,
            report_every: Some(report_every),
            output: None,
            x1: None,
            keep_raw: false,
            check_regret: true,
        },
        oracle,
        optimizers: optimizers
            .into_iter()
            .map(|(name, config)| NamedOptimizer {
                name: name.to_string(),
                config,
            })
            .collect(),
    }
}

fn uniform(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Mean of `value` over points with `t` in `[lo, hi]`.
fn window_mean(
    points: &[SeriesPoint],
    lo: usize,
    hi: usize,
    value: impl Fn(&SeriesPoint) -> f64,
) -> f64 {
    let sel: Vec<f64> = points
        .iter()
        .filter(|p| p.t >= lo && p.t <= hi)
        .map(value)
        .collect();
    sel.iter().sum::<f64>() / sel.len() as f64
}

fn first_decile(t: usize) -> (usize, usize) {
    (1, t / 10)
}

fn last_decile(t: usize) -> (usize, usize) {
    (t - t / 10 + 1, t)
}

// 1 ------------------------------------------------------------------------

fn closed_form_equivalence() -> Verdict {
    let mut rng = RngStream::new(1, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let alpha = [0.1, 1.0, 10.0][rng.index(3)];
        let m = [0.5, 1.0, 2.0][rng.index(3)];
        let len = rng.index(51);
        let d = 1 + rng.index(4);
        let mut state = FtrlState::new(alpha, m).unwrap();
        let mut history = Vec::with_capacity(len);
        for _ in 0..len {
            let g = Vector::new((0..d).map(|_| uniform(&mut rng, -1.0, 1.0)).collect()).unwrap();
            let gp = Vector::new((0..d).map(|_| uniform(&mut rng, -1.0, 1.0)).collect()).unwrap();
            state
                .observe(&SurrogateLoss::new(m, &g, &gp).unwrap())
                .unwrap();
            history.push(GradientPair::new(g, gp).unwrap());
        }
        let diff = (ftrl_stepsize(&state) - ftrl_argmin_oracle(alpha, m, &history)).abs();
        worst = worst.max(diff);
    }
    verdict(
        worst <= 1e-8,
        format!("200 histories, max |closed form - search| = {worst:.2e}"),
    )
}

// 2 ------------------------------------------------------------------------

fn noiseless_recovery(regret: &mut RegretLog) -> Verdict {
    let oracle = RosenbrockOracle::new(0.0);
    let lr = 1.0 / 1002.0;
    let mut sgdol = Optimizer::with_diagnostics(
        &OptimizerConfig::sgdol(ROSENBROCK_M, ALPHA),
        Vector::zeros(2),
        true,
    )
    .unwrap();
    let mut sgd = Optimizer::new(&OptimizerConfig::Sgd { lr }, Vector::zeros(2)).unwrap();
    let mut rng = StreamId::oracle(0).stream(2);
    let mut identical = true;
    let mut exact_stepsize = true;
    for _ in 0..10_000 {
        let pair = oracle.sample_pair(sgdol.x(), &mut rng).unwrap();
        let a = sgdol.step(&pair).unwrap();
        let b = sgd.step(&pair).unwrap();
        exact_stepsize &= a.eta.values() == [lr];
        identical &= sgdol.x() == sgd.x() && a.eta == b.eta;
    }
    regret.add(
        "noiseless rosenbrock",
        regret_grid_check(sgdol.ledger().unwrap(), 32).unwrap(),
    );
    verdict(
        identical && exact_stepsize,
        format!(
            "T=10000: iterates bitwise identical: {identical}; every stepsize == 1/1002: {exact_stepsize}; x_T+1 = {:?}",
            sgdol.x().as_slice()
        ),
    )
}

// 3, 4 ----------------------------------------------------------------------

fn rosenbrock_runs(regret: &mut RegretLog) -> (ResultTable, ResultTable) {
    let go = |sigma: f64| {
        let spec = experiment(
            100_000,
            40,
            3,
            1,
            OracleSpec::Rosenbrock { sigma },
            vec![
                ("sgdol", OptimizerConfig::sgdol(ROSENBROCK_M, ALPHA)),
                ("sgd", OptimizerConfig::Sgd { lr: 1.0 / 1002.0 }),
            ],
        );
        run_with_oracle(&spec, &RosenbrockOracle::new(sigma)).unwrap()
    };
    let low = go(0.2);
    let high = go(5.0);
    regret.add_table("rosenbrock sigma=0.2", &low);
    regret.add_table("rosenbrock sigma=5", &high);
    (low, high)
}

fn noise_adaptivity(low: &ResultTable, high: &ResultTable) -> Verdict {
    let t = high.horizon;
    let hi = &high.get("sgdol").unwrap().averaged;
    let lo = &low.get("sgdol").unwrap().averaged;
    let (a, b) = first_decile(t);
    let first = window_mean(hi, a, b, |p| p.stepsize_mean);
    let (a, b) = last_decile(t);
    let last = window_mean(hi, a, b, |p| p.stepsize_mean);
    let ratio = first / last;
    let threshold = 0.5 / ROSENBROCK_M;
    let drop = |s: &[SeriesPoint]| s.iter().find(|p| p.stepsize_mean < threshold).map(|p| p.t);
    let (drop_hi, drop_lo) = (drop(hi), drop(lo));
    let earlier = match (drop_hi, drop_lo) {
        (Some(h), Some(l)) => h < l,
        (Some(_), None) => true,
        _ => false,
    };
    verdict(
        ratio >= 5.0 && earlier,
        format!(
            "sigma=5 first/last-decile stepsize ratio {ratio:.2} (need >= 5); first t below 0.5/M: sigma=5 {drop_hi:?}, sigma=0.2 {drop_lo:?}"
        ),
    )
}

fn convergence_vs_oscillation(high: &ResultTable) -> Verdict {
    let t = high.horizon;
    let (a, b) = last_decile(t);
    let grad = |name: &str| {
        window_mean(&high.get(name).unwrap().averaged, a, b, |p| {
            p.grad_sq_norm.unwrap()
        })
    };
    let (sgdol, sgd) = (grad("sgdol"), grad("sgd"));
    verdict(
        sgdol * 10.0 <= sgd,
        format!(
            "sigma=5 final-decile mean |grad f|^2: sgdol {sgdol:.3e}, sgd {sgd:.3e} (ratio {:.1})",
            sgd / sgdol
        ),
    )
}

// 5 ------------------------------------------------------------------------

/// `count` points along a surrogate-learned trajectory, each with the
/// stepsize the learner would play there.
fn probe_points(
    oracle: &dyn StochasticOracle,
    m: f64,
    x1: Vector,
    horizon: usize,
    count: usize,
    seed: u64,
) -> Vec<(Vector, f64)> {
    let mut opt = Optimizer::new(&OptimizerConfig::sgdol(m, ALPHA), x1).unwrap();
    let mut rng = StreamId::oracle(0).stream(seed);
    let every = horizon / count;
    let mut out = Vec::with_capacity(count);
    for t in 0..horizon {
        if t % every == 0 && out.len() < count {
            out.push((opt.x().clone(), opt.learner().unwrap().stepsize()));
        }
        let pair = oracle.sample_pair(opt.x(), &mut rng).unwrap();
        opt.step(&pair).unwrap();
    }
    out
}

fn descent_at_probes(
    label: &str,
    oracle: &dyn StochasticOracle,
    m: f64,
    x1: Vector,
    draws: usize,
    seed: u64,
    failures: &mut Vec<String>,
) -> usize {
    let points = probe_points(oracle, m, x1, 2000, 20, seed);
    for (i, (x, eta)) in points.iter().enumerate() {
        let mut rng = StreamId::new(Purpose::Diagnostics, 0, i as u32).stream(seed);
        let v = descent_check(oracle, x, *eta, m, draws, &mut rng).unwrap();
        if !v.pass {
            failures.push(format!(
                "{label} point {i}: decrease {:.3e} > surrogate {:.3e} + 3*{:.2e}",
                v.mean_decrease, v.mean_surrogate, v.std_error
            ));
        }
    }
    points.len()
}

fn expected_decrease(fixture: &Arc<Dataset>) -> Verdict {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (k, sigma) in [0.2, 5.0].into_iter().enumerate() {
        checked += descent_at_probes(
            &format!("rosenbrock sigma={sigma}"),
            &RosenbrockOracle::new(sigma),
            ROSENBROCK_M,
            Vector::zeros(2),
            100_000,
            50 + k as u64,
            &mut failures,
        );
    }
    let m = 2.0 * fixture.max_row_sq_norm();
    for (k, batch) in [1, 50].into_iter().enumerate() {
        let oracle = SigmoidLossOracle::new(fixture.clone(), BatchSize::Rows(batch)).unwrap();
        checked += descent_at_probes(
            &format!("sigmoid batch={batch}"),
            &oracle,
            m,
            Vector::zeros(fixture.n_features()),
            2_000,
            60 + k as u64,
            &mut failures,
        );
    }
    let detail = if failures.is_empty() {
        format!("{checked} probe points (rosenbrock 1e5 draws each, sigmoid 2000 draws each), all within 3 SE")
    } else {
        failures.join("; ")
    };
    verdict(failures.is_empty(), detail)
}

// 6 ------------------------------------------------------------------------

fn pl_linear_rate(regret: &mut RegretLog) -> Verdict {
    let diag = vec![0.1, 0.3, 0.5, 0.7, 1.0];
    let (mu, m) = (0.1, 1.0);
    let oracle = QuadraticOracle::noiseless(diag).unwrap();
    let x1 = Vector::new(vec![1.0; 5]).unwrap();
    let f1 = oracle.value(&x1).unwrap();
    let mut opt = Optimizer::with_diagnostics(&OptimizerConfig::sgdol(m, ALPHA), x1, true).unwrap();
    let mut rng = RngStream::new(6, 0);
    let mut rate_ok = true;
    let mut decrease_ok = true;
    let mut worst_rate: f64 = 0.0;
    for t in 1..=200 {
        let f_before = oracle.value(opt.x()).unwrap();
        let grad_sq = sq_norm(&oracle.gradient(opt.x()).unwrap());
        let pair = oracle.sample_pair(opt.x(), &mut rng).unwrap();
        opt.step(&pair).unwrap();
        let f_after = oracle.value(opt.x()).unwrap();
        let bound = (1.0 - mu / m).powi(t) * f1;
        rate_ok &= f_after <= bound;
        worst_rate = worst_rate.max(f_after / bound);
        decrease_ok &= f_before - f_after >= grad_sq / (2.0 * m);
    }
    regret.add(
        "pl quadratic",
        regret_grid_check(opt.ledger().unwrap(), 32).unwrap(),
    );
    verdict(
        rate_ok && decrease_ok,
        format!("T<=200: gap within (1-mu/M)^T bound: {rate_ok} (max ratio {worst_rate:.3e}); per-step decrease >= |grad|^2/2M: {decrease_ok}"),
    )
}

// 7 ------------------------------------------------------------------------

fn per_coordinate_adaptivity() -> Verdict {
    let m = 1.0;
    let mut spec = experiment(
        10_000,
        20,
        7,
        1,
        OracleSpec::Quadratic {
            diag: vec![0.5, 1.0],
            noise: Some(vec![0.0, 1.0]),
        },
        vec![("coord", OptimizerConfig::SgdolCoord { m, alpha: ALPHA })],
    );
    spec.experiment.x1 = Some(vec![1.0, 1.0]);
    spec.experiment.keep_raw = true;
    let oracle = QuadraticOracle::new(vec![0.5, 1.0], vec![0.0, 1.0]).unwrap();
    let table = run_with_oracle(&spec, &oracle).unwrap();
    let series = table.get("coord").unwrap();
    let exact = series
        .raw
        .as_ref()
        .unwrap()
        .iter()
        .flatten()
        .all(|p| p.stepsize_coords.as_ref().unwrap()[0] == 1.0 / m);
    let (a, b) = last_decile(table.horizon);
    let second = window_mean(&series.averaged, a, b, |p| {
        p.stepsize_coords.as_ref().unwrap()[1]
    });
    verdict(
        exact && second < 0.5 / m,
        format!("coordinate 1 stepsize == 1/M at every step of 20 reps: {exact}; coordinate 2 final-decile mean {second:.4} (need < 0.5)"),
    )
}

// 9 ------------------------------------------------------------------------

struct ClassificationData {
    data: Arc<Dataset>,
    label: String,
    counts_ok: bool,
}

fn classification_data(fixture: &Arc<Dataset>) -> ClassificationData {
    match std::env::var_os("SGDOL_A9A") {
        Some(path) => {
            let opts = LibsvmOptions {
                n_features: Some(123),
                ..LibsvmOptions::default()
            };
            let raw = load_libsvm(PathBuf::from(&path), opts).expect("load a9a");
            let mut rng = StreamId::new(Purpose::Subsample, 0, 0).stream(9);
            let data = balance_subsample(&raw, &mut rng).unwrap();
            let counts_ok = data.len() == 15_682 && data.n_features() == 124;
            ClassificationData {
                label: format!(
                    "a9a ({} rows, {} features + bias)",
                    data.len(),
                    data.n_features() - 1
                ),
                data: Arc::new(data),
                counts_ok,
            }
        }
        None => ClassificationData {
            data: fixture.clone(),
            label: format!(
                "fixture ({} rows, {} features + bias)",
                fixture.len(),
                fixture.n_features() - 1
            ),
            counts_ok: true,
        },
    }
}

/// `M = 1 / best full-batch SGD learning rate` over the grid `2^k`,
/// `k = -4..=4`, scored by final-decile `‖∇f‖²` after 1000 steps.
fn tuned_smoothness(data: &Arc<Dataset>) -> f64 {
    let oracle = SigmoidLossOracle::new(data.clone(), BatchSize::Full).unwrap();
    let mut best = (f64::INFINITY, 1.0);
    for k in -4..=4 {
        let lr = 2f64.powi(k);
        let out = run(
            &OptimizerConfig::Sgd { lr },
            &oracle,
            Vector::zeros(data.n_features()),
            &RunOptions::new(1000, 10),
            &mut StreamId::oracle(0).stream(0),
            &mut StreamId::output(0, 0).stream(0),
        );
        let Ok(out) = out else { continue };
        let tail: Vec<f64> = out.records[90..]
            .iter()
            .map(|r| r.true_grad_sq_norm.unwrap())
            .collect();
        let score = tail.iter().sum::<f64>() / tail.len() as f64;
        if score < best.0 {
            best = (score, lr);
        }
    }
    1.0 / best.1
}

fn classification_shape(fixture: &Arc<Dataset>, regret: &mut RegretLog) -> Verdict {
    let cd = classification_data(fixture);
    let m = tuned_smoothness(&cd.data);
    let horizon = 10_000;
    let mut notes = vec![cd.label.clone(), format!("M = {m}")];
    let mut pass = cd.counts_ok;
    for batch in [BatchSize::Full, BatchSize::Rows(50), BatchSize::Rows(1)] {
        let spec_batch = match batch {
            BatchSize::Full => BatchSpec::Named(FullBatch::Full),
            BatchSize::Rows(n) => BatchSpec::Rows(n),
        };
        let spec = experiment(
            horizon,
            5,
            9,
            20,
            OracleSpec::Sigmoid {
                path: PathBuf::new(),
                batch_size: spec_batch,
                balance: false,
                n_features: None,
            },
            vec![
                ("sgdol", OptimizerConfig::sgdol(m, ALPHA)),
                ("sgd", OptimizerConfig::Sgd { lr: 1.0 / m }),
            ],
        );
        let oracle = SigmoidLossOracle::new(cd.data.clone(), batch).unwrap();
        let table = run_with_oracle(&spec, &oracle).unwrap();
        regret.add_table(&format!("sigmoid {batch:?}"), &table);
        let sgdol = table.get("sgdol").unwrap();
        let sgd = table.get("sgd").unwrap();
        match batch {
            BatchSize::Full => {
                let same = sgdol.averaged == sgd.averaged
                    && sgdol
                        .repetitions
                        .iter()
                        .zip(&sgd.repetitions)
                        .all(|(a, b)| a.final_point == b.final_point);
                pass &= same;
                notes.push(format!("full batch identical to SGD: {same}"));
            }
            BatchSize::Rows(n) => {
                let (a, b) = last_decile(horizon);
                let g_ol = window_mean(&sgdol.averaged, a, b, |p| p.grad_sq_norm.unwrap());
                let g_sgd = window_mean(&sgd.averaged, a, b, |p| p.grad_sq_norm.unwrap());
                let eta_first = sgdol.averaged[0].stepsize_mean;
                let eta_last = window_mean(&sgdol.averaged, a, b, |p| p.stepsize_mean);
                let decreasing = eta_first == 1.0 / m && eta_last < eta_first;
                if n == 1 {
                    pass &= g_ol < g_sgd;
                }
                pass &= decreasing;
                notes.push(format!(
                    "batch {n}: final-decile |grad f|^2 sgdol {g_ol:.3e} vs sgd {g_sgd:.3e}, stepsize {eta_first:.4e} -> {eta_last:.4e}"
                ));
            }
        }
    }
    verdict(pass, notes.join("; "))
}

// 8 ------------------------------------------------------------------------

fn regret_inequality(log: &RegretLog) -> Verdict {
    let violations: Vec<&String> = log
        .checks
        .iter()
        .filter(|(_, c)| !c.holds)
        .map(|(label, _)| label)
        .collect();
    let tightest = log
        .checks
        .iter()
        .map(|(_, c)| c.worst_margin)
        .fold(f64::INFINITY, f64::min);
    verdict(
        violations.is_empty() && !log.checks.is_empty(),
        format!(
            "{} stored runs, 32-point grid; violations: {:?}; smallest margin {tightest:.3e}",
            log.checks.len(),
            violations
        ),
    )
}

// 10 -----------------------------------------------------------------------

fn momentum_degeneracy() -> Verdict {
    let oracle = RosenbrockOracle::new(1.0);
    let frozen = OptimizerConfig::SgdolMomentum {
        m: ROSENBROCK_M,
        alpha: ALPHA,
        freeze_beta: true,
    };
    let plain = OptimizerConfig::SgdolGlobal {
        m: ROSENBROCK_M,
        alpha: ALPHA,
        form: SurrogateForm::FullM,
    };
    let mut identical = true;
    for seed in 0..10 {
        let mut a = Optimizer::new(&frozen, Vector::zeros(2)).unwrap();
        let mut b = Optimizer::new(&plain, Vector::zeros(2)).unwrap();
        let mut rng = StreamId::oracle(0).stream(1000 + seed);
        for _ in 0..100 {
            let pair = oracle.sample_pair(a.x(), &mut rng).unwrap();
            let ra = a.step(&pair).unwrap();
            let rb = b.step(&pair).unwrap();
            identical &= a.x() == b.x() && ra.eta == rb.eta;
        }
    }
    verdict(
        identical,
        format!("10 seeds x 100 steps, iterates bitwise identical: {identical}"),
    )
}

fn main() -> ExitCode {
    let fixture_path =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/synthetic500.svm");
    let opts = LibsvmOptions {
        n_features: Some(123),
        ..LibsvmOptions::default()
    };
    let fixture = Arc::new(load_libsvm(&fixture_path, opts).expect("bundled fixture"));
    let mut regret = RegretLog::default();
    let mut results: Vec<(usize, &str, Verdict, f64)> = Vec::new();
    let mut timed = |n: usize, name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let v = f();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "criterion {n:>2} {} {name} ({secs:.1}s): {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        results.push((n, name, v, secs));
    };

    timed(
        1,
        "ftrl closed form matches brute-force argmin",
        &mut closed_form_equivalence,
    );
    timed(2, "noiseless rosenbrock recovers SGD", &mut || {
        noiseless_recovery(&mut regret)
    });
    let start = Instant::now();
    let (low, high) = rosenbrock_runs(&mut regret);
    println!(
        "             (rosenbrock runs for 3-4: {:.1}s)",
        start.elapsed().as_secs_f64()
    );
    timed(3, "stepsize adapts to noise", &mut || {
        noise_adaptivity(&low, &high)
    });
    timed(4, "sgdol converges where sgd oscillates", &mut || {
        convergence_vs_oscillation(&high)
    });
    drop((low, high));
    timed(5, "expected decrease bounded by surrogate", &mut || {
        expected_decrease(&fixture)
    });
    timed(6, "linear rate under PL", &mut || {
        pl_linear_rate(&mut regret)
    });
    timed(
        7,
        "per-coordinate stepsizes adapt per coordinate",
        &mut per_coordinate_adaptivity,
    );
    timed(9, "classification experiment shape", &mut || {
        classification_shape(&fixture, &mut regret)
    });
    timed(8, "regret within FTRL bound on stored runs", &mut || {
        regret_inequality(&regret)
    });
    timed(
        10,
        "frozen momentum reduces to plain sgdol",
        &mut momentum_degeneracy,
    );

    let failed = results.iter().filter(|(_, _, v, _)| !v.pass).count();
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
