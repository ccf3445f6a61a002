//! End-to-end sorted runs: partition, exchange, merge, then verify the
//! output is a globally sorted permutation against the full-sort oracle.
//!
//! Run: cargo run --release -p hss-sort --example full_sort

use hss_sort::hss::{hss_sort, HssConfig};
use hss_sort::keyspace::{generate_input, materialize_sorted, tag_input, DistributionKind};
use hss_sort::partition::achieved_imbalance;
use hss_sort::Machine;

fn main() {
    let p = 32;
    let n = 1 << 17;
    let eps = 0.05;

    for dist in DistributionKind::ALL {
        let input = tag_input(generate_input(dist, n, p, 99));
        let expect = materialize_sorted(&input);
        let mut machine = Machine::new(p);
        let (output, run) = hss_sort(&mut machine, input, &HssConfig::new(eps, 5)).unwrap();

        let sorted = output.is_globally_sorted();
        let permutation = materialize_sorted(&output) == expect;
        let imb = achieved_imbalance(&output.loads(), n, p);
        let max_sent = run.sent_words.iter().max().copied().unwrap_or(0);
        let r = machine.ledger_report();
        println!(
            "{:<8} sorted={sorted} permutation={permutation} eps_achieved={imb:.4} \
             max_sent={max_sent} supersteps={} comm={}",
            dist.token(),
            r.supersteps,
            r.comm
        );
        assert!(sorted && permutation);
    }
}
