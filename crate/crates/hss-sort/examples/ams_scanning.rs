//! Single-stage AMS partitioning: one Bernoulli sample, one histogram, one
//! greedy scan under the (1+eps)N/p cap. Shows the scan on a hand-sized
//! rank set, then full runs with the histogram route cross-checked against
//! the direct-rank oracle route.
//!
//! Run: cargo run --release -p hss-sort --example ams_scanning

use hss_sort::baselines::{ams_partition, ams_partition_direct, ams_scan, AmsLogBase};
use hss_sort::keyspace::{generate_input, tag_input, DistributionKind};
use hss_sort::Machine;

fn main() {
    // The scan itself, on ranks small enough to follow by hand.
    let scan = ams_scan(&[10, 22, 30, 55, 60, 80], 100, 4, 0.2);
    println!(
        "hand-sized scan: splitter ranks {:?}, loads {:?}, overflow {}",
        scan.splitter_ranks, scan.loads, scan.overflow
    );

    let p = 64;
    let n = 1 << 18;
    let eps = 0.1;
    let cap = ((1.0 + eps) * n as f64 / p as f64).floor() as usize;
    println!("\np={p}, N={n}, eps={eps}, cap={cap}");
    println!("{:<8} {:>9} {:>9} {:>9} {:>10} {:>12}", "dist", "sample", "max", "min", "overflow", "agree");
    for dist in DistributionKind::ALL {
        let mut input = tag_input(generate_input(dist, n, p, 3));
        input.local_sort();
        let mut machine = Machine::new(p);
        let (_, stats, scan) = ams_partition(&mut machine, &input, eps, AmsLogBase::Natural, 17);
        // The oracle route ranks the same drawn sample without a machine.
        let direct = ams_partition_direct(&input, eps, AmsLogBase::Natural, 17);
        println!(
            "{:<8} {:>9} {:>9} {:>9} {:>10} {:>12}",
            dist.token(),
            stats.total_sample,
            scan.loads.iter().max().unwrap(),
            scan.loads.iter().min().unwrap(),
            scan.overflow,
            scan.splitter_ranks == direct.splitter_ranks
        );
    }
}
