//! Classical histogram sort (no sampling): probe refinement over the key
//! domain. Convergence is fast on uniform inputs where rank interpolation
//! is exact in expectation, slow on skewed ones, and value-only probing is
//! rejected outright when duplicates make the value range unsplittable.
//!
//! Run: cargo run --release -p hss-sort --example classic_histogram_sort

use hss_sort::baselines::{histogramsort_classic_partition, ProbeSpace};
use hss_sort::hss::{hss_partition, HssConfig};
use hss_sort::keyspace::{generate_input, tag_input, DistributionKind};
use hss_sort::Machine;

fn main() {
    let p = 64;
    let n = 1 << 16;
    let eps = 0.05;
    let probes_per_round = 2 * p;

    println!("{:<8} {:>16} {:>12} {:>12}", "dist", "histsort_rounds", "probes", "hss_rounds");
    for dist in DistributionKind::ALL {
        let mut input = tag_input(generate_input(dist, n, p, 13));
        input.local_sort();
        let mut machine = Machine::new(p);
        let (_, stats) = histogramsort_classic_partition(
            &mut machine,
            &input,
            eps,
            probes_per_round,
            ProbeSpace::Tagged,
        )
        .unwrap();
        let mut m2 = Machine::new(p);
        let (_, hss_stats) = hss_partition(&mut m2, &input, &HssConfig::new(eps, 13)).unwrap();
        println!(
            "{:<8} {:>16} {:>12} {:>12}",
            dist.token(),
            stats.rounds_run,
            stats.total_sample,
            hss_stats.rounds_run
        );
    }

    // All-zero values leave nothing for value-space probes to bisect.
    let mut zeros = tag_input(generate_input(DistributionKind::AllZeros, n, p, 1));
    zeros.local_sort();
    let mut machine = Machine::new(p);
    match histogramsort_classic_partition(&mut machine, &zeros, eps, probes_per_round, ProbeSpace::ValuesOnly)
    {
        Err(e) => println!("\nvalues-only on zeros: rejected as expected: {e}"),
        Ok(_) => println!("\nvalues-only on zeros: unexpectedly succeeded"),
    }
}
