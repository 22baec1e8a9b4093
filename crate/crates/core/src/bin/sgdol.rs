use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sgdol::diagnostics::run_suite;
use sgdol::harness::{run_experiment, write_outputs, ExperimentSpec};
use sgdol::oracles::{load_libsvm, LibsvmOptions};
use sgdol::Error;

#[derive(Parser)]
#[command(
    name = "sgdol",
    version,
    about = "SGD with online-learned stepsizes: experiments and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config file.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config's `output`).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the built-in verification checks.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Validate a LibSVM file and print its size.
    ParseLibsvm {
        path: PathBuf,
        /// Feature count (excluding bias); inferred when absent.
        #[arg(long)]
        n_features: Option<usize>,
        /// Do not append a bias column.
        #[arg(long)]
        no_bias: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run { config, output } => cmd_run(config, output),
        Command::Verify { seed } => cmd_verify(seed),
        Command::ParseLibsvm {
            path,
            n_features,
            no_bias,
        } => cmd_parse_libsvm(path, n_features, !no_bias),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 2,
        _ => 1,
    }
}

fn cmd_run(config: PathBuf, output: Option<PathBuf>) -> Result<ExitCode, Error> {
    let spec = ExperimentSpec::load(&config)?;
    let dir = output
        .or_else(|| spec.experiment.output.clone())
        .unwrap_or_else(|| PathBuf::from("results"));
    let table = run_experiment(&spec)?;
    for series in &table.series {
        let last = series.averaged.last();
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.6e}"));
        println!(
            "{:<16} final grad_sq_norm {}  f {}  stepsize {}",
            series.name,
            fmt(last.and_then(|p| p.grad_sq_norm)),
            fmt(last.and_then(|p| p.f_value)),
            fmt(last.map(|p| p.stepsize_mean)),
        );
    }
    for path in write_outputs(&table, &dir)? {
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(seed: u64) -> Result<ExitCode, Error> {
    let outcomes = run_suite(seed);
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    for o in &outcomes {
        println!("{o}");
    }
    println!(
        "{} of {} checks passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_parse_libsvm(
    path: PathBuf,
    n_features: Option<usize>,
    append_bias: bool,
) -> Result<ExitCode, Error> {
    let opts = LibsvmOptions {
        append_bias,
        n_features,
        ..LibsvmOptions::default()
    };
    let data = load_libsvm(&path, opts)?;
    let features = data.n_features() - usize::from(data.has_bias());
    let positive = data.labels().iter().filter(|y| **y > 0.0).count();
    print!("{} rows, {} features", data.len(), features);
    if data.has_bias() {
        print!(" (plus a bias column)");
    }
    println!();
    println!(
        "labels: {} positive, {} negative",
        positive,
        data.len() - positive
    );
    Ok(ExitCode::SUCCESS)
}
