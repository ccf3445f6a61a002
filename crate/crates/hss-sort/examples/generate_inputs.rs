//! The six benchmark input distributions: generate each one, tag it, and
//! print summary statistics of the raw key values.
//!
//! Run: cargo run --release -p hss-sort --example generate_inputs

use hss_sort::keyspace::{generate_input, tag_input, DistributionKind};

fn main() {
    let n = 1 << 16;
    let p = 8;
    let seed = 42;
    println!(
        "{:<8} {:>22} {:>22} {:>10} {:>12}",
        "dist", "min", "max", "distinct", "tagged"
    );
    for dist in DistributionKind::ALL {
        let raw = generate_input(dist, n, p, seed);
        let mut values: Vec<u64> = raw.per_proc.iter().flatten().copied().collect();
        values.sort_unstable();
        let min = values[0];
        let max = *values.last().unwrap();
        values.dedup();
        let distinct = values.len();

        // Tagging yields n pairwise-distinct keys no matter how degenerate
        // the raw values are.
        let input = tag_input(raw);
        let mut tagged: Vec<_> = input.iter_all().collect();
        tagged.sort_unstable();
        tagged.dedup();
        println!(
            "{:<8} {:>22} {:>22} {:>10} {:>12}",
            dist.token(),
            min,
            max,
            distinct,
            tagged.len()
        );
    }
}
