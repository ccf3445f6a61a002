//! Two-stage sorting: partition into sqrt(p) groups, exchange, recurse.
//! Per-stage partition communication is overlaid against the closed-form
//! prediction; the exchange phase is exactly one all-to-all per stage.
//!
//! Run: cargo run --release -p hss-sort --example multistage

use hss_sort::driver::{multistage_sort, predicted_costs, Algorithm, MultistageAlgo};
use hss_sort::hss::{optimal_round_count, PartitionMode};
use hss_sort::keyspace::{generate_input, tag_input, DistributionKind};
use hss_sort::partition::achieved_imbalance;
use hss_sort::Machine;

fn main() {
    let p = 256;
    let l = 2;
    let r = 16;
    let n = 1 << 20;
    let eps_stage = 0.01;

    let mut input = tag_input(generate_input(DistributionKind::Unif, n, p, 77));
    input.local_sort();
    let mut machine = Machine::new(p);
    let (out, reports) = multistage_sort(
        &mut machine,
        input,
        l,
        eps_stage,
        MultistageAlgo::Hss,
        PartitionMode::Guarantee,
        9,
    )
    .unwrap();

    let k = optimal_round_count(r, eps_stage);
    println!(
        "{:>6} {:>8} {:>8} {:>10} {:>14} {:>14} {:>8}",
        "stage", "groups", "rounds", "sample", "part_comm", "pred_comm", "ratio"
    );
    for sr in &reports {
        let pred = predicted_costs(Algorithm::Hss, r, eps_stage, k, 1, n / sr.groups);
        println!(
            "{:>6} {:>8} {:>8} {:>10} {:>14} {:>14} {:>8.2}",
            sr.stage,
            sr.groups,
            sr.rounds_run + sr.extra_rounds,
            sr.total_sample,
            sr.partition_cost.comm,
            pred.comm as u64,
            sr.partition_cost.comm as f64 / pred.comm
        );
    }
    let ledger = machine.ledger_report();
    let imb = achieved_imbalance(&out.loads(), n, p);
    println!(
        "\nsorted: {}; overall imbalance {:.5} (bound {:.5}); \
         exchange all-to-alls {}; total supersteps {}",
        out.is_globally_sorted(),
        imb,
        (1.0 + eps_stage).powi(l as i32) - 1.0,
        ledger.alltoalls,
        ledger.supersteps
    );
}
