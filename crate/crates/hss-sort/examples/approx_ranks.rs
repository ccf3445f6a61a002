//! Approximate rank queries from a representative sample: one random key
//! per block of the locally sorted data answers global rank queries within
//! N*eps/p using sqrt(2 p ln p)/eps keys per processor.
//!
//! Run: cargo run --release -p hss-sort --example approx_ranks

use rand::Rng;

use hss_sort::keyspace::{generate_input, materialize_sorted, proc_rng, tag_input, DistributionKind};
use hss_sort::partition::{approx_rank, RepresentativeSample};

fn main() {
    let p = 64;
    let n = 1 << 16;
    let eps = 0.1;
    let s = ((2.0 * p as f64 * (p as f64).ln()).sqrt() / eps).ceil() as usize;
    let tol = n as f64 * eps / p as f64;

    let mut input = tag_input(generate_input(DistributionKind::Gauss, n, p, 5));
    input.local_sort();
    let sorted = materialize_sorted(&input);
    let sample = RepresentativeSample::build(&input, s, 99);
    println!("p={p}, N={n}, eps={eps}: s={s} keys/processor, tolerance {tol:.1} ranks");

    let mut rng = proc_rng(1234, 0);
    let queries = 10_000;
    let mut within = 0usize;
    let mut worst: f64 = 0.0;
    for _ in 0..queries {
        let rank = rng.random_range(0..n);
        let est = approx_rank(sorted[rank], &sample, n);
        let err = (est - rank as f64).abs();
        worst = worst.max(err);
        within += usize::from(err <= tol);
    }
    println!(
        "{within}/{queries} queries within tolerance; worst error {worst:.1} ranks \
         ({:.4} of N/p)",
        worst / (n as f64 / p as f64)
    );
}
