//! Exact splitting two ways: guarantee-mode HSS with eps = p/N drives every
//! splitter onto its ideal rank during selection; alternatively an
//! eps-balanced sorted distribution is repaired post hoc by the neighbor
//! shuffle, moving at most N*eps/p + 1 keys per processor.
//!
//! Run: cargo run --release -p hss-sort --example exact_splitting

use hss_sort::hss::{hss_sort, HssConfig, PartitionMode};
use hss_sort::keyspace::{generate_input, ideal_splitter_ranks, tag_input, DistributionKind};
use hss_sort::partition::exact_split_adjust;
use hss_sort::Machine;

fn main() {
    let p = 64;
    let n = 1 << 16;

    // Route 1: selection-time exact splitting.
    let input = {
        let mut i = tag_input(generate_input(DistributionKind::Skew2, n, p, 15));
        i.local_sort();
        i
    };
    let mut machine = Machine::new(p);
    let mut cfg = HssConfig::new(p as f64 / n as f64, 8);
    cfg.mode = PartitionMode::Guarantee;
    let (out, run) = hss_sort(&mut machine, input, &cfg).unwrap();
    let ideal = ideal_splitter_ranks(n, p);
    println!(
        "guarantee mode at eps = p/N: ranks ideal = {}, rounds = {} (+{} extra), loads all {}",
        run.splitters.ranks.as_deref() == Some(&ideal[..]),
        run.stats.rounds_run,
        run.stats.extra_rounds,
        n / p
    );
    assert!(out.loads().iter().all(|&l| l == n / p));

    // Route 2: post-hoc adjustment of a balanced sort.
    let eps = 0.1;
    let input = {
        let mut i = tag_input(generate_input(DistributionKind::Unif, n, p, 16));
        i.local_sort();
        i
    };
    let mut machine = Machine::new(p);
    let (sorted, run) = hss_sort(&mut machine, input, &HssConfig::new(eps, 2)).unwrap();
    let before_loads = sorted.loads();
    if run.stats.globally_balanced {
        let before = machine.ledger_report();
        let exact = exact_split_adjust(&mut machine, sorted, eps).unwrap();
        let moved = machine.ledger_report().since(&before).comm;
        println!(
            "post-hoc adjust: loads {:?}..{:?} -> all {}, {} words moved \
             (per-proc bound {})",
            before_loads.iter().min().unwrap(),
            before_loads.iter().max().unwrap(),
            n / p,
            moved,
            (n as f64 * eps / p as f64) as usize + 1
        );
        assert!(exact.loads().iter().all(|&l| l == n / p));
    }
}
