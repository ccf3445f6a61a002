//! The Histogram-Sort-with-Sampling partitioner.
//!
//! Splitter selection runs in rounds. Each round Bernoulli-samples keys from
//! the union of the current splitter intervals, ranks the sample with one
//! histogram (gather, probe broadcast, reduction), and tightens every
//! interval with the ranked sample keys. After the last round each splitter
//! is the seen key ranked closest to its ideal rank `Ni/p`.
//!
//! Two sampling regimes are supported:
//!
//! - *ratio schedule*: round `j` samples each key in the interval union
//!   independently with probability `p * s_j / N`, where
//!   `s_j = (2 ln p / eps)^(j/k)`;
//! - *fixed budget* (`samples_per_proc`): each round draws an expected
//!   `samples_per_proc * p` keys from the union, the practical configuration
//!   for round-count comparisons against other iterative partitioners.
//!
//! Two stopping modes: `FixedRounds` runs exactly `k` rounds and accepts the
//! closest seen key even when a target range was missed; `Guarantee` keeps
//! repeating final-ratio rounds over the unresolved intervals until every
//! target range holds a seen key (with `eps = p/N` this yields exact
//! splitting).

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;
use thiserror::Error;

use crate::bsp::{histogram_cost, local_sort_cost, CostReport, Machine};
use crate::keyspace::{proc_rng, DistributedInput, TaggedKey};
use crate::partition::{
    achieved_imbalance, exchange_and_merge, global_ranks, is_globally_balanced, local_histogram,
    target_range, SplitterSet,
};

#[derive(Debug, Error, PartialEq)]
pub enum HssError {
    #[error(
        "no histogramming needed: 2*ln(p)/eps = {ratio:.3} <= 1, every key sits in some \
         target range in this trivial regime"
    )]
    TrivialRegime { ratio: f64 },
}

/// Bracketing state for one splitter: the tightest sample ranks seen below
/// and at-or-above the ideal rank `Ni/p`, with the bounding keys.
///
/// `lo_rank <= floor(Ni/p) <= hi_rank` always; `lo_rank` only grows and
/// `hi_rank` only shrinks across rounds. `None` keys are the virtual
/// minus/plus infinity sentinels paired with ranks `0` and `N`. The interval
/// content is the set of input keys `k` with `lo_key < k <= hi_key`, of size
/// `hi_rank - lo_rank`.
#[derive(Debug, Clone)]
pub struct SplitterInterval {
    /// Splitter index `i` in `1..p`.
    pub index: usize,
    pub lo_rank: usize,
    pub hi_rank: usize,
    pub lo_key: Option<TaggedKey>,
    pub hi_key: Option<TaggedKey>,
    /// Set once some seen rank landed in the target range `T_i`.
    pub resolved: bool,
}

impl SplitterInterval {
    pub fn width(&self) -> usize {
        self.hi_rank - self.lo_rank
    }
}

/// Sentinel intervals covering the whole input, one per splitter.
pub fn init_intervals(n_total: usize, p: usize) -> Vec<SplitterInterval> {
    (1..p)
        .map(|index| SplitterInterval {
            index,
            lo_rank: 0,
            hi_rank: n_total,
            lo_key: None,
            hi_key: None,
            resolved: false,
        })
        .collect()
}

/// Per-round sampling ratios.
#[derive(Debug, Clone)]
pub struct RoundSchedule {
    pub rounds: usize,
    pub ratios: Vec<f64>,
}

/// Geometric ratio schedule `s_j = (2 ln p / eps)^(j/k)` for `j = 1..k`.
/// The trivial regime `2 ln(p)/eps <= 1` is rejected.
pub fn schedule_ratios(k: usize, p: usize, eps: f64) -> Result<RoundSchedule, HssError> {
    assert!(k >= 1, "schedule needs at least one round");
    assert!(p >= 2, "schedule needs at least two processors");
    assert!(eps > 0.0, "eps must be positive");
    let final_ratio = 2.0 * (p as f64).ln() / eps;
    if final_ratio <= 1.0 {
        return Err(HssError::TrivialRegime { ratio: final_ratio });
    }
    let ratios = (1..=k).map(|j| final_ratio.powf(j as f64 / k as f64)).collect();
    Ok(RoundSchedule { rounds: k, ratios })
}

/// Round count minimizing total samples: `max(1, round(ln(ln(p)/eps)))`.
pub fn optimal_round_count(p: usize, eps: f64) -> usize {
    assert!(p >= 2 && eps > 0.0);
    let x = ((p as f64).ln() / eps).ln();
    x.round().max(1.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionMode {
    /// Run exactly `k` rounds; accept the closest seen key per splitter.
    FixedRounds,
    /// Repeat final-ratio rounds over unresolved intervals until every
    /// target range holds a seen key.
    Guarantee,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerKind {
    /// Scan only keys inside the interval union (default).
    IntervalRestricted,
    /// Sample from the whole local input and discard keys outside the
    /// interval union; distributionally identical, kept for fidelity
    /// experiments against implementations that sample that way.
    DiscardFromAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundsSpec {
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone)]
pub struct HssConfig {
    pub eps: f64,
    pub rounds: RoundsSpec,
    pub mode: PartitionMode,
    pub sampler: SamplerKind,
    /// Fixed per-round sample budget (expected `samples_per_proc * p` keys)
    /// instead of the ratio schedule.
    pub samples_per_proc: Option<u64>,
    pub seed: u64,
}

impl HssConfig {
    pub fn new(eps: f64, seed: u64) -> HssConfig {
        HssConfig {
            eps,
            rounds: RoundsSpec::Auto,
            mode: PartitionMode::FixedRounds,
            sampler: SamplerKind::IntervalRestricted,
            samples_per_proc: None,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RoundStat {
    pub round: usize,
    /// Scheduled ratio `s_j`, or the effective ratio `N*q/p` in budget mode.
    pub ratio: f64,
    pub sample_size: usize,
    /// `|gamma_j|`: size of the merged union of all splitter intervals after
    /// the round.
    pub gamma_size: usize,
    /// Size of the sampled domain entering the round.
    pub domain_size: usize,
    /// The requested Bernoulli probability exceeded 1 and was clamped.
    pub prob_clamped: bool,
}

#[derive(Debug, Clone, Default)]
pub struct PartitionStats {
    /// Scheduled rounds executed (excludes guarantee-mode repeats).
    pub rounds_run: usize,
    /// Repeats of the final round in guarantee mode.
    pub extra_rounds: usize,
    pub per_round: Vec<RoundStat>,
    pub total_sample: usize,
    pub splitter_ranks: Vec<usize>,
    pub eps_target: f64,
    pub eps_achieved: f64,
    pub globally_balanced: bool,
    /// `2 ln(p)/eps` exceeded `sqrt(2p/ln p)`, outside the regime where the
    /// interval-union tail bound applies.
    pub regime_warning: bool,
    /// Scanning-based baselines set this when a load cap was violated.
    pub overflow: bool,
    /// Partition-phase ledger delta.
    pub cost: CostReport,
}

/// A merged run of the interval union in rank space, bounded by keys.
#[derive(Debug, Clone)]
pub struct DomainRun {
    pub lo_rank: usize,
    pub hi_rank: usize,
    pub lo_key: Option<TaggedKey>,
    pub hi_key: Option<TaggedKey>,
}

impl DomainRun {
    pub fn width(&self) -> usize {
        self.hi_rank - self.lo_rank
    }

    /// Bounds of the run inside one locally sorted sequence.
    fn local_range(&self, local: &[TaggedKey]) -> (usize, usize) {
        let start = match self.lo_key {
            None => 0,
            Some(lk) => local.partition_point(|&k| k <= lk),
        };
        let end = match self.hi_key {
            None => local.len(),
            Some(hk) => local.partition_point(|&k| k <= hk),
        };
        (start, end)
    }
}

/// Sorted, merged runs of the splitter intervals. Intervals are pairwise
/// disjoint or identical, so merging mostly deduplicates; general overlap is
/// handled anyway.
pub fn merged_domain(intervals: &[SplitterInterval], unresolved_only: bool) -> Vec<DomainRun> {
    let mut spans: Vec<&SplitterInterval> = intervals
        .iter()
        .filter(|iv| !(unresolved_only && iv.resolved) && iv.width() > 0)
        .collect();
    spans.sort_by_key(|iv| (iv.lo_rank, iv.hi_rank));
    let mut runs: Vec<DomainRun> = Vec::new();
    for iv in spans {
        if let Some(last) = runs.last_mut() {
            if iv.lo_rank <= last.hi_rank {
                if iv.hi_rank > last.hi_rank {
                    last.hi_rank = iv.hi_rank;
                    last.hi_key = iv.hi_key;
                }
                continue;
            }
        }
        runs.push(DomainRun {
            lo_rank: iv.lo_rank,
            hi_rank: iv.hi_rank,
            lo_key: iv.lo_key,
            hi_key: iv.hi_key,
        });
    }
    runs
}

/// Size of the union of rank spans `(lo, hi]`.
pub fn rank_union_size(spans: &[(usize, usize)]) -> usize {
    let mut spans: Vec<(usize, usize)> = spans.iter().copied().filter(|(lo, hi)| lo < hi).collect();
    spans.sort_unstable();
    let mut total = 0;
    let mut cur: Option<(usize, usize)> = None;
    for (lo, hi) in spans {
        match cur {
            Some((clo, chi)) if lo <= chi => cur = Some((clo, chi.max(hi))),
            Some((clo, chi)) => {
                total += chi - clo;
                cur = Some((lo, hi));
                let _ = clo;
            }
            None => cur = Some((lo, hi)),
        }
    }
    if let Some((clo, chi)) = cur {
        total += chi - clo;
    }
    total
}

/// Number of input keys in the union of all splitter intervals. Identical
/// or overlapping intervals are counted once; an interval with `L = U`
/// contributes nothing.
pub fn gamma_size(intervals: &[SplitterInterval]) -> usize {
    let spans: Vec<(usize, usize)> =
        intervals.iter().map(|iv| (iv.lo_rank, iv.hi_rank)).collect();
    rank_union_size(&spans)
}

/// Clips each interval to `[N(i-1)/p, N(i+1)/p]` without changing the union
/// (supports the shrinkage property suite; the clipped intervals are
/// independent across splitters).
pub fn strip_intervals(
    intervals: &[SplitterInterval],
    n_total: usize,
    p: usize,
) -> Vec<(usize, usize)> {
    intervals
        .iter()
        .map(|iv| {
            let lo_clip = n_total * (iv.index - 1) / p;
            let hi_clip = n_total * (iv.index + 1) / p;
            (iv.lo_rank.max(lo_clip), iv.hi_rank.min(hi_clip))
        })
        .collect()
}

/// One sampling phase: every processor scans its keys inside the domain
/// runs and includes each independently with probability `prob`; samples are
/// gathered to the root, sorted, and broadcast as probes. Per-run draws use
/// a binomial count followed by uniform position selection, which is
/// distributionally identical to per-key Bernoulli trials and costs
/// `O(sample)` instead of `O(domain)`.
pub fn sample_round(
    machine: &mut Machine,
    input: &DistributedInput,
    runs: &[DomainRun],
    prob: f64,
    sampler: SamplerKind,
    rngs: &mut [ChaCha8Rng],
) -> Vec<TaggedKey> {
    assert!((0.0..=1.0).contains(&prob));
    let contributions: Vec<Vec<TaggedKey>> = input
        .per_proc
        .iter()
        .zip(rngs.iter_mut())
        .map(|(local, rng)| match sampler {
            SamplerKind::IntervalRestricted => {
                let mut out = Vec::new();
                for run in runs {
                    let (start, end) = run.local_range(local);
                    draw_from_slice(&local[start..end], prob, rng, &mut out);
                }
                out
            }
            SamplerKind::DiscardFromAll => {
                let mut drawn = Vec::new();
                draw_from_slice(local, prob, rng, &mut drawn);
                // keep only draws inside some run
                drawn
                    .into_iter()
                    .filter(|&k| {
                        runs.iter().any(|run| {
                            run.lo_key.is_none_or(|lk| lk < k)
                                && run.hi_key.is_none_or(|hk| k <= hk)
                        })
                    })
                    .collect()
            }
        })
        .collect();
    let mut sample = machine.gather(contributions, 0);
    sample.sort_unstable();
    machine.broadcast(&sample);
    sample
}

fn draw_from_slice(
    slice: &[TaggedKey],
    prob: f64,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<TaggedKey>,
) {
    let m = slice.len();
    if m == 0 || prob <= 0.0 {
        return;
    }
    if prob >= 1.0 {
        out.extend_from_slice(slice);
        return;
    }
    let count = Binomial::new(m as u64, prob).unwrap().sample(rng) as usize;
    let mut picks = rand::seq::index::sample(rng, m, count).into_vec();
    picks.sort_unstable();
    out.extend(picks.into_iter().map(|pos| slice[pos]));
}

/// Tightens every interval with a rank-sorted sample and marks splitters
/// whose target range now holds a seen rank. Returns the indices of newly
/// resolved splitters. Ranks are zero-based global positions.
pub fn update_intervals(
    intervals: &mut [SplitterInterval],
    ranked_sample: &[(TaggedKey, usize)],
    n_total: usize,
    p: usize,
    eps: f64,
) -> Vec<usize> {
    debug_assert!(ranked_sample.windows(2).all(|w| w[0].1 < w[1].1));
    let mut newly = Vec::new();
    for iv in intervals.iter_mut() {
        let i = iv.index;
        let (old_lo, old_hi) = (iv.lo_rank, iv.hi_rank);
        // First sample position with rank >= Ni/p, compared exactly as
        // rank * p >= n_total * i.
        let split = ranked_sample.partition_point(|&(_, r)| (r * p) < n_total * i);
        if split > 0 {
            let (key, rank) = ranked_sample[split - 1];
            if rank > iv.lo_rank || iv.lo_key.is_none() {
                iv.lo_rank = rank;
                iv.lo_key = Some(key);
            }
        }
        if split < ranked_sample.len() {
            let (key, rank) = ranked_sample[split];
            if rank < iv.hi_rank || iv.hi_key.is_none() {
                iv.hi_rank = rank;
                iv.hi_key = Some(key);
            }
        }
        // Monotone bracketing around the ideal rank.
        let floor_ideal = n_total * i / p;
        assert!(iv.lo_rank >= old_lo && iv.hi_rank <= old_hi);
        assert!(iv.lo_rank <= floor_ideal && floor_ideal <= iv.hi_rank);
        if !iv.resolved {
            let t = target_range(i, n_total, p, eps);
            let lo_hit = iv.lo_key.is_some() && t.contains(iv.lo_rank);
            let hi_hit = iv.hi_key.is_some() && t.contains(iv.hi_rank);
            if lo_hit || hi_hit {
                iv.resolved = true;
                newly.push(i);
            }
        }
    }
    newly
}

/// The seen key ranked closest to `Ni/p`, ties toward the lower rank.
pub(crate) fn closest_seen(
    iv: &SplitterInterval,
    n_total: usize,
    p: usize,
) -> Option<(TaggedKey, usize)> {
    let target = n_total as u128 * iv.index as u128;
    let dist = |rank: usize| (rank as u128 * p as u128).abs_diff(target);
    match (iv.lo_key, iv.hi_key) {
        (None, None) => None,
        (Some(k), None) => Some((k, iv.lo_rank)),
        (None, Some(k)) => Some((k, iv.hi_rank)),
        (Some(lo), Some(hi)) => {
            if dist(iv.lo_rank) <= dist(iv.hi_rank) {
                Some((lo, iv.lo_rank))
            } else {
                Some((hi, iv.hi_rank))
            }
        }
    }
}

/// Runs the full splitter-selection phase on `machine` and returns the cut
/// set together with per-round statistics. Splits into `input.p()` parts.
pub fn hss_partition(
    machine: &mut Machine,
    input: &DistributedInput,
    cfg: &HssConfig,
) -> Result<(SplitterSet, PartitionStats), HssError> {
    hss_partition_into(machine, input, input.p(), cfg)
}

/// Splitter selection into an arbitrary number of `parts` (multi-stage
/// sorting splits a group of processors into fewer parts than it has
/// members). All rank arithmetic (ideal ranks, target ranges, sampling
/// intensities, schedules) uses `parts`; the machine supplies the
/// processors that hold the data.
pub fn hss_partition_into(
    machine: &mut Machine,
    input: &DistributedInput,
    parts: usize,
    cfg: &HssConfig,
) -> Result<(SplitterSet, PartitionStats), HssError> {
    let p = parts;
    assert_eq!(machine.p(), input.p(), "machine and input disagree on p");
    assert!(p >= 1 && p <= input.n_total, "parts must be in [1, n_total]");
    assert!(input.locally_sorted, "hss_partition requires locally sorted input");
    let n = input.n_total;
    let ledger_before = machine.ledger_report();

    let mut stats = PartitionStats { eps_target: cfg.eps, ..Default::default() };
    if p == 1 {
        stats.globally_balanced = true;
        return Ok((SplitterSet::empty(), stats));
    }

    let k = match cfg.rounds {
        RoundsSpec::Auto => optimal_round_count(p, cfg.eps),
        RoundsSpec::Fixed(k) => k.max(1),
    };
    let schedule = match cfg.samples_per_proc {
        None => Some(schedule_ratios(k, p, cfg.eps)?),
        Some(_) => None,
    };
    let final_ratio = 2.0 * (p as f64).ln() / cfg.eps;
    stats.regime_warning = final_ratio > (2.0 * p as f64 / (p as f64).ln()).sqrt();

    let mut intervals = init_intervals(n, p);
    let mut rngs: Vec<ChaCha8Rng> =
        (0..input.p()).map(|i| proc_rng(cfg.seed, i)).collect();
    let mut round = 0usize;
    let mut prev_gamma = usize::MAX;

    loop {
        let pool_empty = intervals.iter().all(|iv| iv.lo_key.is_none() && iv.hi_key.is_none());
        let stop = match cfg.mode {
            PartitionMode::FixedRounds => round >= k && !pool_empty,
            PartitionMode::Guarantee => intervals.iter().all(|iv| iv.resolved),
        };
        if stop {
            break;
        }
        assert!(round < 100_000, "splitter selection failed to converge");
        round += 1;

        let unresolved_only = cfg.mode == PartitionMode::Guarantee;
        let runs = merged_domain(&intervals, unresolved_only);
        let domain: usize = runs.iter().map(DomainRun::width).sum();
        let (prob, ratio, clamped) = match (&schedule, cfg.samples_per_proc) {
            (Some(s), _) => {
                let sj = s.ratios[round.min(k) - 1];
                let q = p as f64 * sj / n as f64;
                (q.min(1.0), sj, q > 1.0)
            }
            (None, Some(budget)) => {
                let q = if domain == 0 {
                    1.0
                } else {
                    (budget as f64 * p as f64 / domain as f64).min(1.0)
                };
                (q, q * n as f64 / p as f64, domain != 0 && budget as usize * p > domain)
            }
            (None, None) => unreachable!(),
        };

        let probes = sample_round(machine, input, &runs, prob, cfg.sampler, &mut rngs);
        let z = probes.len();
        let hist_cost: Vec<u64> =
            input.per_proc.iter().map(|l| histogram_cost(z, l.len())).collect();
        machine.charge_comp(&hist_cost);
        let local_hists: Vec<Vec<u64>> =
            input.per_proc.iter().map(|l| local_histogram(l, &probes)).collect();
        let counts = global_ranks(machine, &local_hists);
        let ranked: Vec<(TaggedKey, usize)> = probes
            .iter()
            .zip(&counts)
            .map(|(&key, &c)| (key, c as usize - 1))
            .collect();
        update_intervals(&mut intervals, &ranked, n, p, cfg.eps);

        // Bounding keys of every interval travel to all processors.
        let bounds: Vec<TaggedKey> = intervals
            .iter()
            .flat_map(|iv| {
                [iv.lo_key.unwrap_or(TaggedKey::MIN), iv.hi_key.unwrap_or(TaggedKey::MAX)]
            })
            .collect();
        machine.broadcast(&bounds);

        let gamma = gamma_size(&intervals);
        assert!(gamma <= prev_gamma, "interval union must not grow");
        prev_gamma = gamma;
        if round > k {
            stats.extra_rounds += 1;
        }
        stats.total_sample += z;
        stats.per_round.push(RoundStat {
            round,
            ratio,
            sample_size: z,
            gamma_size: gamma,
            domain_size: domain,
            prob_clamped: clamped,
        });
    }
    stats.rounds_run = round - stats.extra_rounds;

    let mut keys = Vec::with_capacity(p - 1);
    let mut ranks = Vec::with_capacity(p - 1);
    for iv in &intervals {
        let (key, rank) = closest_seen(iv, n, p)
            .expect("seen pool is non-empty after the final round");
        keys.push(key);
        ranks.push(rank);
    }
    assert!(keys.windows(2).all(|w| w[0] <= w[1]), "cuts must be non-decreasing");

    stats.globally_balanced = is_globally_balanced(&ranks, n, p, cfg.eps);
    let cuts = SplitterSet { keys, ranks: Some(ranks) };
    let loads = cuts.loads_from_ranks(n).unwrap();
    stats.eps_achieved = achieved_imbalance(&loads, n, p);
    stats.splitter_ranks = cuts.ranks.clone().unwrap();
    stats.cost = machine.ledger_report().since(&ledger_before);
    Ok((cuts, stats))
}

/// Outcome of a full sort pipeline.
#[derive(Debug, Clone)]
pub struct SortRun {
    pub splitters: SplitterSet,
    pub stats: PartitionStats,
    /// Per-processor words sent in the data exchange (self-traffic
    /// excluded).
    pub sent_words: Vec<u64>,
}

/// Partition, broadcast the cuts, route all keys with one all-to-all, and
/// merge locally. The output is globally sorted and a permutation of the
/// input.
pub fn hss_sort(
    machine: &mut Machine,
    mut input: DistributedInput,
    cfg: &HssConfig,
) -> Result<(DistributedInput, SortRun), HssError> {
    if !input.locally_sorted {
        let sort_cost: Vec<u64> =
            input.per_proc.iter().map(|l| local_sort_cost(l.len())).collect();
        machine.charge_comp(&sort_cost);
        input.local_sort();
    }
    let (splitters, stats) = hss_partition(machine, &input, cfg)?;
    let (output, sent_words) = exchange_and_merge(machine, input, &splitters);
    Ok((output, SortRun { splitters, stats, sent_words }))
}
