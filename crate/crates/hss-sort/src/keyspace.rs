//! Input generation, duplicate disambiguation, and ground-truth rank oracles.
//!
//! Keys are unsigned 64-bit values. Duplicate keys are disambiguated by
//! tagging every key with its origin `(processor, index)` pair, which makes
//! the order on [`TaggedKey`] a strict total order regardless of the input
//! distribution. All generators are deterministic for a fixed
//! `(distribution, n_total, p, seed)` tuple; per-processor streams are
//! derived from `(seed, proc)` so processors can be generated independently.

use std::fmt;
use std::str::FromStr;

use rand::distr::Uniform;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

/// An input key augmented with its origin so that comparisons never tie.
///
/// Ordering is lexicographic on `(key, proc, idx)`; since `(proc, idx)` pairs
/// are unique across a [`DistributedInput`], two distinct tagged keys always
/// compare strictly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaggedKey {
    pub key: u64,
    pub proc: u32,
    pub idx: u32,
}

impl TaggedKey {
    /// Smallest representable tagged key, used as a wire placeholder for
    /// the virtual minus-infinity sentinel.
    pub const MIN: TaggedKey = TaggedKey { key: 0, proc: 0, idx: 0 };
    /// Largest representable tagged key, the plus-infinity placeholder.
    pub const MAX: TaggedKey = TaggedKey { key: u64::MAX, proc: u32::MAX, idx: u32::MAX };

    pub const fn new(key: u64, proc: u32, idx: u32) -> Self {
        TaggedKey { key, proc, idx }
    }

    /// The 128-bit integer whose natural order equals `TaggedKey` order.
    pub const fn composite(self) -> u128 {
        ((self.key as u128) << 64) | ((self.proc as u128) << 32) | self.idx as u128
    }

    pub const fn from_composite(c: u128) -> Self {
        TaggedKey {
            key: (c >> 64) as u64,
            proc: ((c >> 32) & 0xffff_ffff) as u32,
            idx: (c & 0xffff_ffff) as u32,
        }
    }
}

impl fmt::Display for TaggedKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, p{}, i{})", self.key, self.proc, self.idx)
    }
}

/// The six benchmark input distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistributionKind {
    /// Uniform over the entire 64-bit range.
    Unif,
    /// Half uniform over the entire range, half uniform over a contiguous
    /// range of size 1000 anchored at the low end of the key space.
    Skew1,
    /// Uniform over the integer range `[0, 100]`.
    Skew2,
    /// Bitwise AND of two independent full-range draws.
    Skew3,
    /// Gaussian with mean `2^63` and standard deviation `2^59`, clamped to
    /// the 64-bit range.
    Gauss,
    /// Every key is zero.
    AllZeros,
}

impl DistributionKind {
    pub const ALL: [DistributionKind; 6] = [
        DistributionKind::Unif,
        DistributionKind::Skew1,
        DistributionKind::Skew2,
        DistributionKind::Skew3,
        DistributionKind::Gauss,
        DistributionKind::AllZeros,
    ];

    pub fn token(self) -> &'static str {
        match self {
            DistributionKind::Unif => "unif",
            DistributionKind::Skew1 => "skew1",
            DistributionKind::Skew2 => "skew2",
            DistributionKind::Skew3 => "skew3",
            DistributionKind::Gauss => "gauss",
            DistributionKind::AllZeros => "zeros",
        }
    }
}

impl fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for DistributionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unif" => Ok(DistributionKind::Unif),
            "skew1" => Ok(DistributionKind::Skew1),
            "skew2" => Ok(DistributionKind::Skew2),
            "skew3" => Ok(DistributionKind::Skew3),
            "gauss" => Ok(DistributionKind::Gauss),
            "zeros" => Ok(DistributionKind::AllZeros),
            other => Err(format!("unknown distribution '{other}'")),
        }
    }
}

/// Untagged generator output: `p` per-processor sequences of raw key values.
#[derive(Debug, Clone)]
pub struct RawInput {
    pub per_proc: Vec<Vec<u64>>,
    pub n_total: usize,
    pub dist: DistributionKind,
    pub seed: u64,
}

impl RawInput {
    pub fn p(&self) -> usize {
        self.per_proc.len()
    }
}

/// `p` per-processor sequences of tagged keys plus generation metadata.
#[derive(Debug, Clone)]
pub struct DistributedInput {
    pub per_proc: Vec<Vec<TaggedKey>>,
    pub n_total: usize,
    pub dist: DistributionKind,
    pub seed: u64,
    /// Set once every per-processor sequence is sorted ascending.
    pub locally_sorted: bool,
}

impl DistributedInput {
    pub fn p(&self) -> usize {
        self.per_proc.len()
    }

    /// Sorts each per-processor sequence in place and sets the flag.
    pub fn local_sort(&mut self) {
        for seq in &mut self.per_proc {
            seq.sort_unstable();
        }
        self.locally_sorted = true;
    }

    pub fn loads(&self) -> Vec<usize> {
        self.per_proc.iter().map(Vec::len).collect()
    }

    pub fn iter_all(&self) -> impl Iterator<Item = TaggedKey> + '_ {
        self.per_proc.iter().flat_map(|seq| seq.iter().copied())
    }

    /// Order-independent content fingerprint, used for permutation checks.
    pub fn checksum(&self) -> u64 {
        self.iter_all()
            .map(|k| splitmix64(k.key ^ splitmix64(((k.proc as u64) << 32) | k.idx as u64)))
            .fold(0u64, u64::wrapping_add)
    }

    /// True iff the input is sorted within and across processor boundaries.
    pub fn is_globally_sorted(&self) -> bool {
        let mut prev: Option<TaggedKey> = None;
        for seq in &self.per_proc {
            for &k in seq {
                if let Some(p) = prev {
                    if p > k {
                        return false;
                    }
                }
                prev = Some(k);
            }
        }
        true
    }
}

/// Stateless 64-bit mixer (splitmix64 finalizer).
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a base seed and a tag.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    splitmix64(base ^ splitmix64(tag))
}

/// Independent deterministic RNG stream for one virtual processor.
pub fn proc_rng(seed: u64, proc: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(proc as u64);
    rng
}

const SKEW1_NARROW_RANGE: u64 = 1000;
const GAUSS_MEAN: f64 = 9_223_372_036_854_775_808.0; // 2^63
const GAUSS_SD: f64 = 576_460_752_303_423_488.0; // 2^59

/// Generates `n_total` raw keys spread over `p` processors.
///
/// When `p` does not divide `n_total`, the extra keys go to the lowest-index
/// processors. Panics if `p == 0` or `n_total < p`.
pub fn generate_input(dist: DistributionKind, n_total: usize, p: usize, seed: u64) -> RawInput {
    assert!(p >= 1, "generate_input: p must be at least 1");
    assert!(n_total >= p, "generate_input: need at least one key per processor");

    let base = n_total / p;
    let extra = n_total % p;
    let narrow = Uniform::new(0u64, SKEW1_NARROW_RANGE).unwrap();
    let skew2 = Uniform::new_inclusive(0u64, 100).unwrap();
    let gauss = Normal::new(GAUSS_MEAN, GAUSS_SD).unwrap();

    let per_proc = (0..p)
        .map(|proc| {
            let mut rng = proc_rng(seed, proc);
            let len = base + usize::from(proc < extra);
            (0..len)
                .map(|j| match dist {
                    DistributionKind::Unif => rng.random::<u64>(),
                    DistributionKind::Skew1 => {
                        if j % 2 == 0 {
                            rng.random::<u64>()
                        } else {
                            narrow.sample(&mut rng)
                        }
                    }
                    DistributionKind::Skew2 => skew2.sample(&mut rng),
                    DistributionKind::Skew3 => rng.random::<u64>() & rng.random::<u64>(),
                    // The as-cast saturates, which is exactly the clamp to
                    // the 64-bit range.
                    DistributionKind::Gauss => gauss.sample(&mut rng) as u64,
                    DistributionKind::AllZeros => 0,
                })
                .collect()
        })
        .collect();

    RawInput { per_proc, n_total, dist, seed }
}

/// Replaces each key value `k` at local position `j` on processor `i` with
/// the tagged key `(k, i, j)`, enforcing a strict total order.
pub fn tag_input(raw: RawInput) -> DistributedInput {
    let per_proc = raw
        .per_proc
        .iter()
        .enumerate()
        .map(|(proc, seq)| {
            seq.iter()
                .enumerate()
                .map(|(j, &k)| TaggedKey::new(k, proc as u32, j as u32))
                .collect()
        })
        .collect();
    DistributedInput {
        per_proc,
        n_total: raw.n_total,
        dist: raw.dist,
        seed: raw.seed,
        locally_sorted: false,
    }
}

/// The exact-splitting ranks `floor(n_total * i / p)` for `i = 1..p-1`.
pub fn ideal_splitter_ranks(n_total: usize, p: usize) -> Vec<usize> {
    assert!(p >= 1);
    (1..p).map(|i| n_total * i / p).collect()
}

/// Number of tagged keys in the whole input strictly less than `key`,
/// computed by materializing and sorting the full input. `O(N log N)`;
/// intended for tests and `--check-oracle` runs.
pub fn rank_oracle(input: &DistributedInput, key: TaggedKey) -> usize {
    let mut all: Vec<TaggedKey> = input.iter_all().collect();
    all.sort_unstable();
    all.partition_point(|&k| k < key)
}

/// Sorted copy of the full input, for oracle comparisons.
pub fn materialize_sorted(input: &DistributedInput) -> Vec<TaggedKey> {
    let mut all: Vec<TaggedKey> = input.iter_all().collect();
    all.sort_unstable();
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn all_zeros_holds_zero_values_before_tagging() {
        let raw = generate_input(DistributionKind::AllZeros, 8, 2, 123);
        assert_eq!(raw.per_proc, vec![vec![0u64; 4], vec![0u64; 4]]);
    }

    #[test]
    fn skew2_values_stay_in_range() {
        let raw = generate_input(DistributionKind::Skew2, 10_000, 4, 7);
        for seq in &raw.per_proc {
            assert!(seq.iter().all(|&k| k <= 100));
        }
    }

    #[test]
    fn generation_is_reproducible() {
        let a = generate_input(DistributionKind::Unif, 4096, 4, 42);
        let b = generate_input(DistributionKind::Unif, 4096, 4, 42);
        assert_eq!(a.per_proc, b.per_proc);
    }

    #[test]
    fn skew1_touches_both_ranges() {
        let raw = generate_input(DistributionKind::Skew1, 4096, 4, 9);
        let narrow = raw
            .per_proc
            .iter()
            .flatten()
            .filter(|&&k| k < SKEW1_NARROW_RANGE)
            .count();
        assert!(narrow >= 2048, "narrow half missing: {narrow}");
        assert!(narrow < 4096, "wide half missing");
    }

    #[test]
    #[should_panic]
    fn rejects_zero_processors() {
        generate_input(DistributionKind::Unif, 8, 0, 1);
    }

    #[test]
    #[should_panic]
    fn rejects_fewer_keys_than_processors() {
        generate_input(DistributionKind::Unif, 3, 4, 1);
    }

    #[test]
    fn uneven_division_favors_low_procs() {
        let raw = generate_input(DistributionKind::Unif, 10, 3, 5);
        let lens: Vec<usize> = raw.per_proc.iter().map(Vec::len).collect();
        assert_eq!(lens, vec![4, 3, 3]);
    }

    #[test]
    fn tag_breaks_ties_lexicographically() {
        let a = TaggedKey::new(0, 1, 5);
        let b = TaggedKey::new(0, 2, 0);
        assert!(a < b);
        let c = TaggedKey::new(5, 3, 9);
        let d = TaggedKey::new(7, 0, 0);
        assert!(c < d);
    }

    #[test]
    fn all_zeros_tags_are_distinct() {
        let input = tag_input(generate_input(DistributionKind::AllZeros, 8, 2, 1));
        let mut all: Vec<TaggedKey> = input.iter_all().collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 8);
    }

    #[test]
    fn ideal_ranks_match_floor_convention() {
        assert_eq!(ideal_splitter_ranks(100, 4), vec![25, 50, 75]);
        assert_eq!(ideal_splitter_ranks(100, 1), Vec::<usize>::new());
        assert_eq!(ideal_splitter_ranks(10, 3), vec![3, 6]);
    }

    #[test]
    fn rank_oracle_pins_extremes_and_positions() {
        let mut input = tag_input(generate_input(DistributionKind::Unif, 100, 4, 77));
        input.local_sort();
        let sorted = materialize_sorted(&input);
        assert_eq!(rank_oracle(&input, sorted[0]), 0);
        assert_eq!(rank_oracle(&input, sorted[99]), 99);
        for (i, &k) in sorted.iter().enumerate() {
            assert_eq!(rank_oracle(&input, k), i);
        }
    }

    #[test]
    fn composite_roundtrip_preserves_order() {
        let a = TaggedKey::new(17, 3, 4);
        assert_eq!(TaggedKey::from_composite(a.composite()), a);
        let b = TaggedKey::new(17, 3, 5);
        assert!(a.composite() < b.composite());
    }

    proptest! {
        #[test]
        fn tagging_yields_distinct_keys(
            dist_idx in 0usize..6,
            n in 1usize..200,
            p in 1usize..8,
            seed in any::<u64>(),
        ) {
            let n = n.max(p);
            let dist = DistributionKind::ALL[dist_idx];
            let input = tag_input(generate_input(dist, n, p, seed));
            let mut all: Vec<TaggedKey> = input.iter_all().collect();
            let total = all.len();
            prop_assert_eq!(total, n);
            all.sort_unstable();
            all.dedup();
            prop_assert_eq!(all.len(), total);
        }

        #[test]
        fn ideal_ranks_strictly_increase(n in 1usize..10_000, p in 1usize..64) {
            let n = n.max(p);
            let ranks = ideal_splitter_ranks(n, p);
            for w in ranks.windows(2) {
                prop_assert!(w[0] < w[1]);
            }
        }
    }
}
