//! Benchmark CLI: run experiment configs, cross-check derivatives, and
//! print worst-case iteration bounds.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ahom::ahom::theoretical_bounds;
use ahom::cubic_subsolver::SubsolverMode;
use ahom::harness::{
    self, build_problem, initial_point, run_experiment, ExperimentConfig, HarnessError,
    ProblemSpec, SyntheticSpec, DERIVATIVE_TOLERANCE,
};

#[derive(Parser)]
#[command(
    name = "ahom",
    version,
    about = "Degenerate-saddle escape benchmarks: a third-order adaptive method against GD, ARC, and TR"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Krylov,
}

impl From<ModeArg> for SubsolverMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Exact => SubsolverMode::Exact,
            ModeArg::Krylov => SubsolverMode::Krylov,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every algorithm in a JSON experiment config; write one trace
    /// CSV per algorithm plus summary.csv.
    Run {
        /// Path to the experiment config (JSON).
        config: PathBuf,
        /// Override the config's RNG seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's subsolver mode.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Directory the trace and summary files are written into.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Compare a problem's analytic derivatives against central
    /// differences at seeded random points.
    CheckDerivatives {
        /// Problem name: monkey, coercive, quadratic, or logistic.
        problem: String,
        /// LIBSVM dataset file (logistic only).
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Generated dataset spec (logistic only).
        #[arg(long, value_name = "M,D,SEED", value_parser = parse_synthetic)]
        synthetic: Option<SyntheticSpec>,
        /// Ridge weight (logistic only).
        #[arg(long, default_value_t = 1e-5)]
        alpha: f64,
        /// Dimension of the quadratic bowl.
        #[arg(long)]
        dim: Option<usize>,
        /// Seed for the sample points.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the worst-case resource bounds implied by a config's
    /// constants and the problem's known Lipschitz data, as JSON.
    Bounds {
        /// Path to the experiment config (JSON).
        config: PathBuf,
    },
}

fn parse_synthetic(raw: &str) -> Result<SyntheticSpec, String> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected M,D,SEED, got {raw:?}"));
    }
    let parse = |what: &str, field: &str| {
        field
            .trim()
            .parse::<u64>()
            .map_err(|_| format!("{what} must be a nonnegative integer, got {field:?}"))
    };
    Ok(SyntheticSpec {
        m: parse("M", parts[0])? as usize,
        d: parse("D", parts[1])? as usize,
        seed: parse("SEED", parts[2])?,
    })
}

fn run(command: Command) -> Result<ExitCode, HarnessError> {
    match command {
        Command::Run {
            config,
            seed,
            mode,
            out_dir,
        } => {
            let mut config = ExperimentConfig::from_file(&config)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            if let Some(mode) = mode {
                config.subsolver_mode = mode.into();
            }
            let outcome = run_experiment(&config, &out_dir)?;
            for path in &outcome.trace_paths {
                println!("wrote {}", path.display());
            }
            println!("wrote {}", outcome.summary_path.display());
            println!();
            println!("{}", harness::SUMMARY_HEADER);
            for summary in &outcome.summaries {
                println!("{}", summary.to_csv());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckDerivatives {
            problem,
            dataset,
            synthetic,
            alpha,
            dim,
            seed,
        } => {
            let spec = ProblemSpec {
                name: problem,
                dataset_path: dataset,
                alpha,
                synthetic,
                dim,
            };
            let oracle = build_problem(&spec)?;
            let report = harness::check_derivatives(oracle.as_ref(), seed);
            println!(
                "gradient max relative error: {:.3e}",
                report.gradient
            );
            println!("hessian  max relative error: {:.3e}", report.hessian);
            println!("third    max relative error: {:.3e}", report.third);
            if report.within_tolerance() {
                println!("all orders within {DERIVATIVE_TOLERANCE:.0e}");
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!(
                    "error: derivative mismatch exceeds {DERIVATIVE_TOLERANCE:.0e}"
                );
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Bounds { config } => {
            let config = ExperimentConfig::from_file(&config)?;
            let oracle = build_problem(&config.problem)?;
            let x0 = initial_point(&config, oracle.meta())?;
            let f0 = oracle.value(&x0);
            let ahom_config = harness::ahom_config_for(&config);
            let bounds = theoretical_bounds(&ahom_config, oracle.meta(), Some(f0));
            let json = serde_json::to_string_pretty(&bounds)
                .expect("bounds always serialize");
            println!("{json}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
