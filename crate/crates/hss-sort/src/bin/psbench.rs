//! Benchmark CLI over the partition-sorting simulator. CSV goes to
//! `--out` (or stdout); a human-readable summary goes to stderr.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 oracle violation.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use hss_sort::driver::{
    run_experiment, AlgoSel, DriverError, ExperimentConfig, ModeSel, RoundsArg,
};
use hss_sort::keyspace::DistributionKind;

#[derive(Parser, Debug)]
#[command(
    name = "psbench",
    about = "Benchmark partition-based parallel sorting algorithms on a simulated BSP machine"
)]
struct Cli {
    /// Partitioning algorithm, or 'all' for a paired comparison.
    #[arg(long, default_value = "hss")]
    algo: AlgoSel,

    /// Virtual processor count.
    #[arg(long, default_value_t = 64)]
    p: usize,

    /// Keys per processor.
    #[arg(long = "n-per-proc", default_value_t = 4096)]
    n_per_proc: usize,

    /// Load-balance tolerance.
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,

    /// Histogramming rounds: an integer or 'auto'.
    #[arg(long, default_value = "auto")]
    rounds: RoundsArg,

    /// Per-interval per-round samples for hyksort.
    #[arg(long, default_value_t = 1)]
    beta: usize,

    /// Sorting stages; p^(1/stages) must be integral.
    #[arg(long, default_value_t = 1)]
    stages: usize,

    /// Input distribution: unif, skew1, skew2, skew3, gauss, zeros.
    #[arg(long, default_value = "unif")]
    dist: DistributionKind,

    /// Base RNG seed; trial t uses seed + t.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Seeds per configuration.
    #[arg(long, default_value_t = 10)]
    trials: usize,

    /// Fixed per-round sample budget (expected samples per processor per
    /// round) instead of the ratio schedule.
    #[arg(long = "samples-per-proc")]
    samples_per_proc: Option<u64>,

    /// fixed: run exactly k rounds; guarantee: repeat until every target
    /// range holds a seen key.
    #[arg(long, default_value = "fixed")]
    mode: ModeSel,

    /// Cross-validate every run against the full-sort oracle (slow).
    #[arg(long = "check-oracle", default_value_t = false)]
    check_oracle: bool,

    /// Interpret --epsilon as the per-stage tolerance.
    #[arg(long = "epsilon-per-stage", default_value_t = false)]
    epsilon_per_stage: bool,

    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Sweep specification, e.g. "algo=hss,hyksort;p=16,64,256,1024".
    #[arg(long)]
    sweep: Option<String>,
}

impl Cli {
    fn into_config(self) -> ExperimentConfig {
        ExperimentConfig {
            algo: self.algo,
            p: self.p,
            n_per_proc: self.n_per_proc,
            eps: self.epsilon,
            rounds: self.rounds,
            beta: self.beta,
            stages: self.stages,
            dist: self.dist,
            seed: self.seed,
            trials: self.trials,
            samples_per_proc: self.samples_per_proc,
            mode: self.mode,
            check_oracle: self.check_oracle,
            epsilon_per_stage: self.epsilon_per_stage,
            out: self.out,
            sweep: self.sweep,
        }
    }
}

fn main() -> ExitCode {
    let cfg = Cli::parse().into_config();
    let result = match &cfg.out {
        Some(path) => match File::create(path) {
            Ok(f) => run_experiment(&cfg, f),
            Err(e) => {
                eprintln!("psbench: cannot create {}: {e}", path.display());
                return ExitCode::from(1);
            }
        },
        None => run_experiment(&cfg, io::stdout().lock()),
    };
    match result {
        Ok(summary) => {
            let _ = writeln!(io::stderr(), "{summary}");
            ExitCode::SUCCESS
        }
        Err(e @ (DriverError::Config(_) | DriverError::Regime(_))) => {
            eprintln!("psbench: {e}");
            ExitCode::from(2)
        }
        Err(e @ DriverError::OracleViolation(_)) => {
            eprintln!("psbench: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("psbench: {e}");
            ExitCode::from(1)
        }
    }
}
