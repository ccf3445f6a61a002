//! Sample sort splitter selection: gather an oversample, pick evenly spaced
//! keys at the root, broadcast.

use rand_chacha::ChaCha8Rng;

use crate::bsp::Machine;
use crate::hss::PartitionStats;
use crate::keyspace::{proc_rng, DistributedInput, TaggedKey};
use crate::partition::{build_representative_sample, SplitterSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMethod {
    /// Deterministic: `s` evenly spaced keys per processor.
    Regular { s: usize },
    /// One random key from each of `s` equal blocks per processor.
    RandomBlocks { s: usize },
}

impl SampleMethod {
    pub fn oversampling(&self) -> usize {
        match *self {
            SampleMethod::Regular { s } | SampleMethod::RandomBlocks { s } => s,
        }
    }
}

/// `s` evenly spaced local keys: positions `ceil(j*n/s) - 1` for `j = 1..s`.
pub fn regular_sample(local_sorted: &[TaggedKey], s: usize) -> Vec<TaggedKey> {
    let n = local_sorted.len();
    assert!(s >= 1 && s <= n, "oversampling ratio must be in [1, local size]");
    (1..=s).map(|j| local_sorted[(j * n).div_ceil(s) - 1]).collect()
}

/// Gathers `p*s` samples at the root, sorts them, picks positions `j*s - 1`
/// for `j = 1..p-1` as splitters, and broadcasts them. Fewer than `p-1`
/// samples is a hard fault.
pub fn samplesort_splitters(
    machine: &mut Machine,
    input: &DistributedInput,
    method: SampleMethod,
    seed: u64,
) -> (SplitterSet, PartitionStats) {
    let p = input.p();
    assert!(input.locally_sorted);
    let ledger_before = machine.ledger_report();
    let mut stats = PartitionStats::default();
    if p == 1 {
        stats.globally_balanced = true;
        return (SplitterSet::empty(), stats);
    }
    let s = method.oversampling();
    let contributions: Vec<Vec<TaggedKey>> = input
        .per_proc
        .iter()
        .enumerate()
        .map(|(proc, local)| match method {
            SampleMethod::Regular { s } => regular_sample(local, s),
            SampleMethod::RandomBlocks { s } => {
                let mut rng: ChaCha8Rng = proc_rng(seed, proc);
                build_representative_sample(local, s, &mut rng)
            }
        })
        .collect();
    let mut sample = machine.gather(contributions, 0);
    assert!(sample.len() >= p - 1, "need at least p-1 samples, got {}", sample.len());
    sample.sort_unstable();

    let keys: Vec<TaggedKey> = (1..p).map(|j| sample[j * s - 1]).collect();
    machine.broadcast(&keys);

    stats.total_sample = sample.len();
    stats.cost = machine.ledger_report().since(&ledger_before);
    (SplitterSet { keys, ranks: None }, stats)
}
