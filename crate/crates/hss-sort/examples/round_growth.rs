//! Round-count growth of HSS versus HykSort at one sample per processor
//! per round, across processor counts. HSS allocates its per-round budget
//! proportionally to interval sizes, so its convergence tracks
//! `ln(ln p / eps)`; HykSort's uniform per-interval draw leaves stragglers
//! that grow like `ln p / ln ln p`.
//!
//! Run: cargo run --release -p hss-sort --example round_growth

use hss_sort::baselines::hyksort_partition;
use hss_sort::hss::{hss_partition, HssConfig, PartitionMode};
use hss_sort::keyspace::{generate_input, tag_input, DistributionKind};
use hss_sort::Machine;

fn main() {
    let eps = 0.02;
    let n_per_proc = 512;
    let seeds = 20u64;
    println!("{:>6} {:>12} {:>14} {:>10}", "p", "hss_rounds", "hyksort_rounds", "gap");
    for p in [16usize, 64, 256, 1024] {
        let n = p * n_per_proc;
        let mut hss_total = 0usize;
        let mut hyk_total = 0usize;
        for seed in 0..seeds {
            let mut input = tag_input(generate_input(DistributionKind::Unif, n, p, seed));
            input.local_sort();

            let mut m = Machine::new(p);
            let mut cfg = HssConfig::new(eps, seed);
            cfg.mode = PartitionMode::Guarantee;
            cfg.samples_per_proc = Some(1);
            let (_, stats) = hss_partition(&mut m, &input, &cfg).unwrap();
            hss_total += stats.rounds_run + stats.extra_rounds;

            let mut m = Machine::new(p);
            let (_, stats) = hyksort_partition(&mut m, &input, eps, 1, seed);
            hyk_total += stats.rounds_run;
        }
        let hss_mean = hss_total as f64 / seeds as f64;
        let hyk_mean = hyk_total as f64 / seeds as f64;
        println!("{:>6} {:>12.2} {:>14.2} {:>10.2}", p, hss_mean, hyk_mean, hyk_mean - hss_mean);
    }
}
