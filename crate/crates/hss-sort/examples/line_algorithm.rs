//! The line algorithm behind one-sample-per-round interval shrinkage:
//! closed-form CDF versus Monte Carlo, and the round count needed to push
//! the tail below 1/p as p grows.
//!
//! Run: cargo run --release -p hss-sort --example line_algorithm

use hss_sort::baselines::{line_cdf, line_rounds_for_tail, line_tail_estimate};
use hss_sort::keyspace::proc_rng;

fn main() {
    println!("{:>6} {:>14} {:>14}", "round", "1-F^r(0.5)", "monte carlo");
    let mut rng = proc_rng(2024, 0);
    for r in 0..6 {
        let exact = 1.0 - line_cdf(0.5, r);
        let est = line_tail_estimate(0.5, r, 100_000, &mut rng);
        println!("{r:>6} {exact:>14.6} {est:>14.6}");
    }

    // Rounds to reach P[w_r > eps] < 1/p: grows like ln(p)/lnln(p).
    println!("\n{:>8} {:>8} {:>16}", "p", "rounds", "ln p / ln ln p");
    for exp in [4u32, 6, 8, 10, 12, 14, 16] {
        let p = (1u64 << exp) as f64;
        let rounds = line_rounds_for_tail(0.02, 1.0 / p);
        println!("{:>8} {:>8} {:>16.2}", 1u64 << exp, rounds, p.ln() / p.ln().ln());
    }
}
