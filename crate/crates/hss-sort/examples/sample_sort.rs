//! Sample sort baselines: regular sampling's deterministic guarantee needs
//! s = p/eps keys per processor, random block sampling gets the same
//! balance w.h.p. from ln(N)/eps^2 — compare achieved imbalance and sample
//! volume.
//!
//! Run: cargo run --release -p hss-sort --example sample_sort

use hss_sort::baselines::{samplesort_splitters, SampleMethod};
use hss_sort::keyspace::{generate_input, tag_input, DistributionKind};
use hss_sort::partition::{achieved_imbalance, exchange_and_merge};
use hss_sort::Machine;

fn main() {
    let p = 32;
    let n = p * 4096;
    let eps = 0.1;
    let s_regular = (p as f64 / eps).ceil() as usize;
    let s_random = ((n as f64).ln() / (eps * eps)).ceil() as usize;

    println!("p={p}, N={n}, eps={eps}");
    println!(
        "{:<8} {:<22} {:>12} {:>12} {:>8}",
        "dist", "method", "sample", "imbalance", "<= eps"
    );
    for dist in DistributionKind::ALL {
        for (label, method) in [
            ("regular s=p/eps", SampleMethod::Regular { s: s_regular }),
            ("random s=lnN/eps^2", SampleMethod::RandomBlocks { s: s_random }),
        ] {
            let mut input = tag_input(generate_input(dist, n, p, 7));
            input.local_sort();
            let mut machine = Machine::new(p);
            let (cuts, stats) = samplesort_splitters(&mut machine, &input, method, 11);
            let (out, _) = exchange_and_merge(&mut machine, input, &cuts);
            let imb = achieved_imbalance(&out.loads(), n, p);
            println!(
                "{:<8} {:<22} {:>12} {:>12.5} {:>8}",
                dist.token(),
                label,
                stats.total_sample,
                imb,
                imb <= eps
            );
        }
    }
}
