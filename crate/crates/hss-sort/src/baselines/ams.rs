//! Single-stage AMS partitioning: one Bernoulli sampling pass, one
//! histogram round, then a greedy scan that assigns a maximal number of
//! consecutive sample buckets to each processor under the `(1+eps)N/p` cap.

use rand::prelude::*;
use rand_distr::Binomial;

use crate::bsp::{histogram_cost, Machine};
use crate::hss::{PartitionStats, RoundStat};
use crate::keyspace::{proc_rng, rank_oracle, DistributedInput, TaggedKey};
use crate::partition::{global_ranks, local_histogram, SplitterSet};

/// Base used for the `log N` term of the sampling probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmsLogBase {
    #[default]
    Natural,
    /// Sensitivity-analysis variant.
    Base2,
}

/// Scanning probability `p * max(2/eps, 2 log N) / N`, clamped to 1.
pub fn ams_sampling_prob(n_total: usize, p: usize, eps: f64, base: AmsLogBase) -> f64 {
    let log_n = match base {
        AmsLogBase::Natural => (n_total as f64).ln(),
        AmsLogBase::Base2 => (n_total as f64).log2(),
    };
    (p as f64 * (2.0 / eps).max(2.0 * log_n) / n_total as f64).min(1.0)
}

/// Practical sample-size estimate `2 p max(1/eps, ln p)`, the form used for
/// back-of-envelope comparisons against iterative partitioners.
pub fn ams_practical_sample_estimate(p: usize, eps: f64) -> f64 {
    2.0 * p as f64 * (1.0 / eps).max((p as f64).ln())
}

/// Outcome of the greedy scan.
#[derive(Debug, Clone)]
pub struct ScanResult {
    /// Chosen cut ranks `chi_1..chi_{p-1}`.
    pub splitter_ranks: Vec<usize>,
    /// Loads `n_0..n_{p-1}`; they always sum to `N` and loads `0..p-2` never
    /// exceed the cap by construction.
    pub loads: Vec<usize>,
    /// A gap forced a repeated splitter while samples remained, or the last
    /// processor exceeded the cap.
    pub overflow: bool,
}

/// Greedy left-to-right scan over sorted, distinct sample ranks: after
/// cutting at `chi_i`, the next cut is the largest sample rank within
/// `(chi_i, chi_i + (1+eps)N/p]`; the last processor takes the remainder.
/// Running out of samples repeats the last cut silently (trailing empty
/// buckets); an unbridgeable gap or an overloaded last processor sets the
/// overflow flag. Overflow is data, not a fault.
pub fn ams_scan(sample_ranks: &[usize], n_total: usize, p: usize, eps: f64) -> ScanResult {
    debug_assert!(sample_ranks.windows(2).all(|w| w[0] < w[1]));
    let cap = ((1.0 + eps) * n_total as f64 / p as f64).floor() as usize;
    let mut overflow = false;
    let mut prev = 0usize;
    let mut splitter_ranks = Vec::with_capacity(p - 1);
    for _ in 1..p {
        let limit = prev.saturating_add(cap);
        let idx = sample_ranks.partition_point(|&r| r <= limit);
        if idx > 0 && sample_ranks[idx - 1] > prev {
            prev = sample_ranks[idx - 1];
        } else if sample_ranks.last().is_some_and(|&r| r > limit) {
            // Samples remain beyond an unbridgeable gap.
            overflow = true;
        }
        splitter_ranks.push(prev);
    }
    let mut loads = Vec::with_capacity(p);
    let mut bounds = vec![0usize];
    bounds.extend_from_slice(&splitter_ranks);
    bounds.push(n_total);
    for w in bounds.windows(2) {
        loads.push(w[1] - w[0]);
    }
    if *loads.last().unwrap() > cap {
        overflow = true;
    }
    ScanResult { splitter_ranks, loads, overflow }
}

/// Draws the AMS sample: every local key independently with probability
/// `prob`, realized per processor as a binomial count plus uniform position
/// selection.
pub fn ams_draw_sample(input: &DistributedInput, prob: f64, seed: u64) -> Vec<Vec<TaggedKey>> {
    input
        .per_proc
        .iter()
        .enumerate()
        .map(|(proc, local)| {
            let mut rng = proc_rng(seed, proc);
            let m = local.len();
            if m == 0 || prob <= 0.0 {
                return Vec::new();
            }
            if prob >= 1.0 {
                return local.clone();
            }
            let count = Binomial::new(m as u64, prob).unwrap().sample(&mut rng) as usize;
            let mut picks = rand::seq::index::sample(&mut rng, m, count).into_vec();
            picks.sort_unstable();
            picks.into_iter().map(|pos| local[pos]).collect()
        })
        .collect()
}

/// One sampling pass, one histogram round, one scan. The resulting split is
/// locally balanced w.h.p.; the scan outcome is returned alongside the cuts.
pub fn ams_partition(
    machine: &mut Machine,
    input: &DistributedInput,
    eps: f64,
    base: AmsLogBase,
    seed: u64,
) -> (SplitterSet, PartitionStats, ScanResult) {
    ams_partition_into(machine, input, input.p(), eps, base, seed)
}

/// AMS splitting into an arbitrary number of `parts` (used per group by
/// multi-stage sorting).
pub fn ams_partition_into(
    machine: &mut Machine,
    input: &DistributedInput,
    parts: usize,
    eps: f64,
    base: AmsLogBase,
    seed: u64,
) -> (SplitterSet, PartitionStats, ScanResult) {
    let p = parts;
    assert_eq!(machine.p(), input.p());
    assert!(input.locally_sorted);
    let n = input.n_total;
    let ledger_before = machine.ledger_report();
    let mut stats = PartitionStats { eps_target: eps, ..Default::default() };
    if p == 1 {
        stats.globally_balanced = true;
        let scan = ScanResult { splitter_ranks: vec![], loads: vec![n], overflow: false };
        return (SplitterSet::empty(), stats, scan);
    }

    let prob = ams_sampling_prob(n, p, eps, base);
    let contributions = ams_draw_sample(input, prob, seed);
    let mut sample = machine.gather(contributions, 0);
    sample.sort_unstable();
    assert!(!sample.is_empty(), "AMS sample came back empty; eps or N far out of range");
    machine.broadcast(&sample);

    let hist_cost: Vec<u64> =
        input.per_proc.iter().map(|l| histogram_cost(sample.len(), l.len())).collect();
    machine.charge_comp(&hist_cost);
    let locals: Vec<Vec<u64>> =
        input.per_proc.iter().map(|l| local_histogram(l, &sample)).collect();
    let counts = global_ranks(machine, &locals);
    let ranks: Vec<usize> = counts.iter().map(|&c| c as usize - 1).collect();

    let scan = ams_scan(&ranks, n, p, eps);
    let keys: Vec<TaggedKey> = scan
        .splitter_ranks
        .iter()
        .map(|&chi| match ranks.binary_search(&chi) {
            Ok(pos) => sample[pos],
            // chi = 0 with no sample at rank 0: cut below everything.
            Err(_) => TaggedKey::MIN,
        })
        .collect();

    stats.rounds_run = 1;
    stats.total_sample = sample.len();
    stats.per_round.push(RoundStat {
        round: 1,
        ratio: prob * n as f64 / p as f64,
        sample_size: sample.len(),
        gamma_size: n,
        domain_size: n,
        prob_clamped: prob >= 1.0,
    });
    stats.overflow = scan.overflow;
    stats.splitter_ranks = scan.splitter_ranks.clone();
    stats.eps_achieved =
        crate::partition::achieved_imbalance(&scan.loads, n, p);
    stats.cost = machine.ledger_report().since(&ledger_before);
    (SplitterSet { keys, ranks: Some(scan.splitter_ranks.clone()) }, stats, scan)
}

/// Oracle route for cross-checks: ranks the same drawn sample against the
/// materialized global order instead of a histogram round.
pub fn ams_partition_direct(
    input: &DistributedInput,
    eps: f64,
    base: AmsLogBase,
    seed: u64,
) -> ScanResult {
    let n = input.n_total;
    let p = input.p();
    let prob = ams_sampling_prob(n, p, eps, base);
    let mut sample: Vec<TaggedKey> = ams_draw_sample(input, prob, seed).concat();
    sample.sort_unstable();
    let ranks: Vec<usize> = sample.iter().map(|&k| rank_oracle(input, k)).collect();
    ams_scan(&ranks, n, p, eps)
}
