//! One HSS splitter-selection run with the per-round table: sampling
//! ratios, realized sample sizes, and the shrinking interval union.
//!
//! Run: cargo run --release -p hss-sort --example hss_partition

use hss_sort::hss::{hss_partition, optimal_round_count, HssConfig};
use hss_sort::keyspace::{generate_input, tag_input, DistributionKind};
use hss_sort::partition::target_range;
use hss_sort::Machine;

fn main() {
    let p = 64;
    let n = 1 << 18;
    let eps = 0.05;
    let seed = 7;

    let mut input = tag_input(generate_input(DistributionKind::Skew1, n, p, seed));
    input.local_sort();
    let mut machine = Machine::new(p);
    let cfg = HssConfig::new(eps, seed);
    let (cuts, stats) = hss_partition(&mut machine, &input, &cfg).unwrap();

    println!(
        "p={p}, N={n}, eps={eps}: k=auto={} rounds",
        optimal_round_count(p, eps)
    );
    println!(
        "{:>6} {:>10} {:>12} {:>12} {:>12}",
        "round", "ratio", "sample", "gamma", "domain"
    );
    for r in &stats.per_round {
        println!(
            "{:>6} {:>10.2} {:>12} {:>12} {:>12}",
            r.round, r.ratio, r.sample_size, r.gamma_size, r.domain_size
        );
    }
    println!(
        "total sample {} ({:.2} per processor); eps achieved {:.5}; globally balanced: {}",
        stats.total_sample,
        stats.total_sample as f64 / p as f64,
        stats.eps_achieved,
        stats.globally_balanced
    );

    // Every cut rank sits inside its target range when the run is balanced.
    let ranks = cuts.ranks.as_ref().unwrap();
    let hits = ranks
        .iter()
        .enumerate()
        .filter(|&(j, &rank)| target_range(j + 1, n, p, eps).contains(rank))
        .count();
    println!("{hits}/{} splitter ranks inside their target ranges", ranks.len());
    let cost = stats.cost;
    println!(
        "partition ledger: supersteps={} comp={} comm={}",
        cost.supersteps, cost.comp, cost.comm
    );
}
