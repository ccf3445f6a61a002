//! Driving experiments from code: the same engine behind the psbench CLI.
//! Runs a small paired comparison of all partitioners and prints the CSV
//! plus the stderr-style summary.
//!
//! Run: cargo run --release -p hss-sort --example csv_experiments

use hss_sort::driver::{run_experiment, AlgoSel, ExperimentConfig};
use hss_sort::keyspace::DistributionKind;

fn main() {
    let cfg = ExperimentConfig {
        algo: AlgoSel::All,
        p: 16,
        n_per_proc: 1024,
        eps: 0.1,
        dist: DistributionKind::Skew3,
        trials: 3,
        seed: 5,
        ..Default::default()
    };
    let mut csv = Vec::new();
    let summary = run_experiment(&cfg, &mut csv).unwrap();
    // Print the summary rows only (round rows elided for brevity).
    for line in String::from_utf8(csv).unwrap().lines() {
        let cols: Vec<&str> = line.split(',').collect();
        if cols[6].is_empty() {
            println!("{line}");
        }
    }
    eprintln!("\n{summary}");
}
