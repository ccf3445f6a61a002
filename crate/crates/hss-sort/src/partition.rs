//! Partition primitives shared by every splitter-selection algorithm:
//! target ranges, histogramming, balance metrics, exact-split adjustment,
//! and the representative-sample approximate-rank oracle.
//!
//! Rank conventions used throughout the crate:
//!
//! - The *rank* of an input key is the number of input keys strictly below
//!   it (its zero-based position in the global sorted order).
//! - Histograms are cumulative: entry `t` counts input keys less than or
//!   equal to probe `t`, so for a probe that is itself an input key the
//!   histogram entry is `rank + 1`.
//! - A splitter *cut* with rank `r` assigns the `r` smallest keys to the
//!   buckets on its left; bucket `i` owns keys in `[cut[i-1], cut[i])`.

use thiserror::Error;

use crate::bsp::Machine;
use crate::keyspace::{proc_rng, DistributedInput, TaggedKey};
use rand::prelude::*;

/// Rank window `[Ni/p - Nε/2p, Ni/p + Nε/2p]` for splitter `i`, rounded
/// inward (ceil on `lo`, floor on `hi`) so membership implies the
/// real-valued condition, and clamped to valid ranks `[0, N-1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TargetRange {
    pub index: usize,
    pub lo: usize,
    pub hi: usize,
}

impl TargetRange {
    pub fn contains(&self, rank: usize) -> bool {
        self.lo <= rank && rank <= self.hi
    }
}

/// Target range for splitter `i` (`1 <= i <= p-1`). Panics if `eps <= 0`.
pub fn target_range(i: usize, n_total: usize, p: usize, eps: f64) -> TargetRange {
    assert!(eps > 0.0, "target_range: eps must be positive");
    assert!(p >= 2 && i >= 1 && i < p, "target_range: splitter index out of range");
    let center = n_total as f64 * i as f64 / p as f64;
    let half = n_total as f64 * eps / (2.0 * p as f64);
    let lo = (center - half).ceil().max(0.0) as usize;
    let hi = ((center + half).floor() as usize).min(n_total.saturating_sub(1));
    TargetRange { index: i, lo, hi }
}

/// The `p-1` splitter cuts selected by a partitioner.
#[derive(Debug, Clone, Default)]
pub struct SplitterSet {
    /// Non-decreasing cut keys; bucket `i` owns keys in `[keys[i-1], keys[i])`.
    pub keys: Vec<TaggedKey>,
    /// Rank of each cut (keys strictly below it), when known.
    pub ranks: Option<Vec<usize>>,
}

impl SplitterSet {
    pub fn empty() -> SplitterSet {
        SplitterSet { keys: Vec::new(), ranks: None }
    }

    /// Destination bucket of `key` under the cut convention above.
    pub fn bucket_of(&self, key: TaggedKey) -> usize {
        self.keys.partition_point(|&c| c <= key)
    }

    /// Bucket loads implied by the cut ranks.
    pub fn loads_from_ranks(&self, n_total: usize) -> Option<Vec<usize>> {
        let ranks = self.ranks.as_ref()?;
        let mut bounds = Vec::with_capacity(ranks.len() + 2);
        bounds.push(0);
        bounds.extend_from_slice(ranks);
        bounds.push(n_total);
        Some(bounds.windows(2).map(|w| w[1] - w[0]).collect())
    }
}

/// Per-processor piece of a representative sample: one random key from each
/// of `s` equal blocks of the locally sorted data.
#[derive(Debug, Clone)]
pub struct RepresentativeSample {
    pub per_proc: Vec<Vec<TaggedKey>>,
    pub s: usize,
}

impl RepresentativeSample {
    /// Builds the sample for a whole input with per-processor RNG streams
    /// derived from `(seed, proc)`.
    pub fn build(input: &DistributedInput, s: usize, seed: u64) -> RepresentativeSample {
        assert!(input.locally_sorted, "representative sample needs locally sorted input");
        let per_proc = input
            .per_proc
            .iter()
            .enumerate()
            .map(|(proc, local)| {
                let mut rng = proc_rng(seed, proc);
                build_representative_sample(local, s, &mut rng)
            })
            .collect();
        RepresentativeSample { per_proc, s }
    }
}

/// One uniformly random key per contiguous block of `local_sorted`, with
/// block `b` spanning positions `[floor(b*n/s), floor((b+1)*n/s))`.
pub fn build_representative_sample(
    local_sorted: &[TaggedKey],
    s: usize,
    rng: &mut impl Rng,
) -> Vec<TaggedKey> {
    let n = local_sorted.len();
    assert!(s >= 1 && s <= n, "block count must be in [1, local size]");
    (0..s)
        .map(|b| {
            let lo = b * n / s;
            let hi = (b + 1) * n / s;
            local_sorted[rng.random_range(lo..hi)]
        })
        .collect()
}

/// Estimated global rank of `key` from a representative sample: if `r`
/// sample keys across all processors are `<= key`, the estimate is
/// `N * r / (p * s)`.
pub fn approx_rank(key: TaggedKey, sample: &RepresentativeSample, n_total: usize) -> f64 {
    let p = sample.per_proc.len();
    let r: usize = sample
        .per_proc
        .iter()
        .map(|piece| piece.partition_point(|&k| k <= key))
        .sum();
    n_total as f64 * r as f64 / (p as f64 * sample.s as f64)
}

/// Cumulative local histogram: entry `t` counts local keys `<=` probe `t`.
/// Per-bucket counts are first differences. Unsorted probes are a hard
/// fault.
pub fn local_histogram(local_sorted: &[TaggedKey], probes: &[TaggedKey]) -> Vec<u64> {
    assert!(probes.windows(2).all(|w| w[0] <= w[1]), "local_histogram: probes must be sorted");
    debug_assert!(local_sorted.windows(2).all(|w| w[0] <= w[1]));
    probes
        .iter()
        .map(|&probe| local_sorted.partition_point(|&k| k <= probe) as u64)
        .collect()
}

/// Sums per-processor cumulative histograms into global cumulative counts:
/// entry `t` is the number of input keys `<=` probe `t`.
pub fn global_ranks(machine: &mut Machine, local_histograms: &[Vec<u64>]) -> Vec<u64> {
    machine.reduce_sum(local_histograms)
}

/// `max(loads) * p / N - 1`, reported raw (may be negative only through
/// rounding when loads are sub-ideal).
pub fn achieved_imbalance(loads: &[usize], n_total: usize, p: usize) -> f64 {
    let max = loads.iter().copied().max().unwrap_or(0);
    max as f64 * p as f64 / n_total as f64 - 1.0
}

/// True iff every splitter rank lies in its target range. Vacuously true
/// for `p = 1`.
pub fn is_globally_balanced(splitter_ranks: &[usize], n_total: usize, p: usize, eps: f64) -> bool {
    assert_eq!(splitter_ranks.len(), p.saturating_sub(1));
    splitter_ranks
        .iter()
        .enumerate()
        .all(|(j, &rank)| target_range(j + 1, n_total, p, eps).contains(rank))
}

/// The data-exchange phase shared by every partition-based sort: broadcast
/// the cuts, route each key to its bucket with one all-to-all, and merge the
/// received sorted runs. Returns the redistributed input and the number of
/// words each processor sent to peers.
pub fn exchange_and_merge(
    machine: &mut Machine,
    input: DistributedInput,
    cuts: &SplitterSet,
) -> (DistributedInput, Vec<u64>) {
    let p = input.p();
    assert!(input.locally_sorted, "exchange expects locally sorted buckets");
    assert_eq!(cuts.keys.len(), p - 1, "need p-1 cuts");
    machine.broadcast(&cuts.keys);

    let (per_proc, n_total, dist, seed) = (input.per_proc, input.n_total, input.dist, input.seed);
    let mut sent = vec![0u64; p];
    let outboxes: Vec<Vec<Vec<TaggedKey>>> = per_proc
        .into_iter()
        .enumerate()
        .map(|(src, local)| {
            let mut bounds = Vec::with_capacity(p + 1);
            bounds.push(0);
            for cut in &cuts.keys {
                bounds.push(local.partition_point(|&k| k < *cut));
            }
            bounds.push(local.len());
            let row: Vec<Vec<TaggedKey>> = bounds
                .windows(2)
                .map(|w| local[w[0]..w[1]].to_vec())
                .collect();
            sent[src] = row
                .iter()
                .enumerate()
                .filter(|&(dst, _)| dst != src)
                .map(|(_, payload)| payload.len() as u64)
                .sum();
            row
        })
        .collect();
    let inboxes = machine.all_to_all(outboxes);

    let merge_costs: Vec<u64> = inboxes
        .iter()
        .map(|pieces| {
            let n: usize = pieces.iter().map(Vec::len).sum();
            let ways = pieces.iter().filter(|piece| !piece.is_empty()).count();
            crate::bsp::merge_cost(n, ways)
        })
        .collect();
    machine.charge_comp(&merge_costs);
    let per_proc: Vec<Vec<TaggedKey>> = inboxes
        .into_iter()
        .map(|pieces| {
            let mut merged: Vec<TaggedKey> = pieces.into_iter().flatten().collect();
            merged.sort_unstable();
            merged
        })
        .collect();

    let out = DistributedInput { per_proc, n_total, dist, seed, locally_sorted: true };
    (out, sent)
}

#[derive(Debug, Error)]
pub enum ExactSplitError {
    #[error("input is not globally sorted")]
    NotGloballySorted,
    #[error("boundary {index} has rank {rank}, outside its eps={eps} target range; \
             exact-split adjustment requires a globally balanced input")]
    NotGloballyBalanced { index: usize, rank: usize, eps: f64 },
}

/// Neighbor shuffle that turns a globally sorted, globally `eps`-balanced
/// distribution into an exact split (loads of `floor`/`ceil(N/p)`, extras on
/// the lowest-index processors). Charged as one all-to-all; per-processor
/// moved volume is at most `N*eps/p + 1`.
pub fn exact_split_adjust(
    machine: &mut Machine,
    input: DistributedInput,
    eps: f64,
) -> Result<DistributedInput, ExactSplitError> {
    let p = input.p();
    let n = input.n_total;
    if !input.is_globally_sorted() {
        return Err(ExactSplitError::NotGloballySorted);
    }

    // Current and target prefix boundaries.
    let loads = input.loads();
    let mut prefix = vec![0usize; p + 1];
    for (i, &load) in loads.iter().enumerate() {
        prefix[i + 1] = prefix[i] + load;
    }
    if p > 1 {
        for (i, &rank) in prefix.iter().enumerate().take(p).skip(1) {
            let t = target_range(i, n, p, eps);
            if !t.contains(rank) {
                return Err(ExactSplitError::NotGloballyBalanced { index: i, rank, eps });
            }
        }
    }
    let base = n / p;
    let extra = n % p;
    let target_prefix: Vec<usize> =
        (0..=p).map(|i| i * base + i.min(extra)).collect();

    let mut outboxes: Vec<Vec<Vec<TaggedKey>>> =
        (0..p).map(|_| vec![Vec::new(); p]).collect();
    let (mut per_proc, dist, seed) = (input.per_proc, input.dist, input.seed);
    for (src, local) in per_proc.drain(..).enumerate() {
        let start = prefix[src];
        for (off, key) in local.into_iter().enumerate() {
            let g = start + off;
            let dst = target_prefix.partition_point(|&t| t <= g) - 1;
            outboxes[src][dst].push(key);
        }
    }
    let inboxes = machine.all_to_all(outboxes);
    let per_proc: Vec<Vec<TaggedKey>> = inboxes
        .into_iter()
        .map(|pieces| pieces.into_iter().flatten().collect())
        .collect();

    let out = DistributedInput { per_proc, n_total: n, dist, seed, locally_sorted: true };
    debug_assert!(out.is_globally_sorted());
    Ok(out)
}
