//! Classical histogram sort splitter selection: no sampling. Probes are
//! synthetic points in the key domain; each round refines the bracket of
//! every unresolved splitter by rank-interpolating and bisecting the domain
//! range between its bracketing probes, until a probe's rank lands in every
//! target range. Round count is bounded by the log of the domain span.
//!
//! Domain duplicates stall value-space refinement, so the probe domain is
//! the 128-bit composite `(key, proc, idx)` space by default; a values-only
//! mode exists for sensitivity runs and rejects inputs whose value range
//! cannot separate the splitters.

use thiserror::Error;

use crate::bsp::{histogram_cost, Machine};
use crate::hss::{rank_union_size, PartitionStats, RoundStat};
use crate::keyspace::{DistributedInput, TaggedKey};
use crate::partition::{achieved_imbalance, is_globally_balanced, target_range, SplitterSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProbeSpace {
    /// Probe the full `(key, proc, idx)` composite space; handles any
    /// duplicate structure.
    #[default]
    Tagged,
    /// Probe key values only; duplicate-heavy inputs are rejected.
    ValuesOnly,
}

impl ProbeSpace {
    /// Domain granularity in composite units.
    fn unit_shift(self) -> u32 {
        match self {
            ProbeSpace::Tagged => 0,
            ProbeSpace::ValuesOnly => 64,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum HistSortError {
    #[error(
        "probe refinement exhausted a key-value range (span {span}) before splitter {index} \
         reached its target; duplicate keys require tagged mode"
    )]
    NeedsTaggedMode { index: usize, span: u128 },
}

/// Bracket of one splitter, in domain units (`composite >> unit_shift`).
struct Bracket {
    index: usize,
    lo: u128,
    hi: u128,
    rank_lo: usize,
    rank_hi: usize,
    resolved: Option<(u128, usize)>,
}

fn interpolate_unit(lo: u128, hi: u128, frac: f64) -> u128 {
    debug_assert!(hi - lo >= 2);
    let span = hi - lo;
    let step = (span as f64 * frac.clamp(0.0, 1.0)) as u128;
    (lo + step).clamp(lo + 1, hi - 1)
}

/// Number of input keys with composite strictly below each probe.
fn composite_prefix(local: &[TaggedKey], probes: &[u128]) -> Vec<u64> {
    probes
        .iter()
        .map(|&c| local.partition_point(|k| k.composite() < c) as u64)
        .collect()
}

/// Non-sampling baseline partitioner. `probes_per_round` is split across
/// the unresolved splitters, each receiving at least a rank-interpolated
/// probe and a midpoint probe (the midpoint guarantees the logarithmic
/// round bound on skewed inputs).
pub fn histogramsort_classic_partition(
    machine: &mut Machine,
    input: &DistributedInput,
    eps: f64,
    probes_per_round: usize,
    space: ProbeSpace,
) -> Result<(SplitterSet, PartitionStats), HistSortError> {
    let p = input.p();
    assert!(input.locally_sorted);
    let n = input.n_total;
    let shift = space.unit_shift();
    let ledger_before = machine.ledger_report();
    let mut stats = PartitionStats { eps_target: eps, ..Default::default() };
    if p == 1 {
        stats.globally_balanced = true;
        return Ok((SplitterSet::empty(), stats));
    }

    // Seed the brackets from the global key extremes (one tiny gather).
    let extremes: Vec<Vec<u128>> = input
        .per_proc
        .iter()
        .map(|local| {
            local
                .iter()
                .map(|k| k.composite() >> shift)
                .fold(None::<(u128, u128)>, |acc, c| {
                    Some(acc.map_or((c, c), |(lo, hi)| (lo.min(c), hi.max(c))))
                })
                .map(|(lo, hi)| vec![lo, hi])
                .unwrap_or_default()
        })
        .collect();
    let flat = machine.gather(extremes, 0);
    let domain_lo = flat.iter().step_by(2).min().copied().unwrap_or(0);
    // One unit past the largest key so the upper bracket has prefix N.
    let domain_hi = flat.iter().skip(1).step_by(2).max().copied().unwrap_or(0) + 1;
    if space == ProbeSpace::ValuesOnly && domain_hi - domain_lo <= 1 {
        return Err(HistSortError::NeedsTaggedMode { index: 1, span: domain_hi - domain_lo });
    }

    let mut brackets: Vec<Bracket> = (1..p)
        .map(|index| Bracket {
            index,
            lo: domain_lo,
            hi: domain_hi,
            rank_lo: 0,
            rank_hi: n,
            resolved: None,
        })
        .collect();

    let mut round = 0usize;
    loop {
        let unresolved: Vec<usize> =
            (0..brackets.len()).filter(|&j| brackets[j].resolved.is_none()).collect();
        if unresolved.is_empty() {
            break;
        }
        assert!(round < 400, "probe refinement failed to converge");
        round += 1;

        let quota = (probes_per_round / unresolved.len()).max(2);
        let mut probes: Vec<u128> = Vec::with_capacity(quota * unresolved.len());
        for &j in &unresolved {
            let b = &brackets[j];
            if b.hi - b.lo <= 1 {
                match space {
                    ProbeSpace::ValuesOnly => {
                        return Err(HistSortError::NeedsTaggedMode {
                            index: b.index,
                            span: b.hi - b.lo,
                        })
                    }
                    // Composite prefixes step by at most one per point, so a
                    // width-1 bracket cannot still straddle a target range.
                    ProbeSpace::Tagged => unreachable!("tagged bracket exhausted"),
                }
            }
            let ideal = n * b.index / p;
            let frac = (ideal - b.rank_lo) as f64 / (b.rank_hi - b.rank_lo) as f64;
            probes.push(interpolate_unit(b.lo, b.hi, frac) << shift);
            probes.push(interpolate_unit(b.lo, b.hi, 0.5) << shift);
            for extra in 2..quota {
                probes.push(interpolate_unit(b.lo, b.hi, extra as f64 / quota as f64) << shift);
            }
        }
        probes.sort_unstable();
        probes.dedup();

        machine.broadcast(&probes);
        let hist_cost: Vec<u64> =
            input.per_proc.iter().map(|l| histogram_cost(probes.len(), l.len())).collect();
        machine.charge_comp(&hist_cost);
        let locals: Vec<Vec<u64>> =
            input.per_proc.iter().map(|l| composite_prefix(l, &probes)).collect();
        let prefixes = machine.reduce_sum(&locals);

        for &j in &unresolved {
            let b = &mut brackets[j];
            let ideal = n * b.index / p;
            let t = target_range(b.index, n, p, eps);
            let mut best: Option<(usize, u128)> = None; // (prefix, cut)
            for (&c, &pref) in probes.iter().zip(&prefixes) {
                let pref = pref as usize;
                let cu = c >> shift;
                if t.contains(pref) {
                    let better = match best {
                        None => true,
                        Some((bp, _)) => pref.abs_diff(ideal) < bp.abs_diff(ideal),
                    };
                    if better {
                        best = Some((pref, c));
                    }
                }
                // Probes arrive in ascending order: the last one with
                // prefix <= ideal becomes the lower bracket, the first one
                // beyond it the upper bracket.
                if pref <= ideal && cu > b.lo && cu < b.hi {
                    b.lo = cu;
                    b.rank_lo = pref;
                } else if pref > ideal && cu < b.hi && cu > b.lo {
                    b.hi = cu;
                    b.rank_hi = pref;
                }
            }
            if let Some((pref, c)) = best {
                b.resolved = Some((c, pref));
            }
        }

        let spans: Vec<(usize, usize)> = brackets
            .iter()
            .map(|b| if b.resolved.is_some() { (0, 0) } else { (b.rank_lo, b.rank_hi) })
            .collect();
        stats.total_sample += probes.len();
        stats.per_round.push(RoundStat {
            round,
            ratio: 0.0,
            sample_size: probes.len(),
            gamma_size: rank_union_size(&spans),
            domain_size: unresolved.len(),
            prob_clamped: false,
        });
    }
    stats.rounds_run = round;

    let mut cut_pairs: Vec<(u128, usize)> =
        brackets.iter().map(|b| b.resolved.unwrap()).collect();
    cut_pairs.sort_unstable();
    let keys: Vec<TaggedKey> =
        cut_pairs.iter().map(|&(c, _)| TaggedKey::from_composite(c)).collect();
    let ranks: Vec<usize> = cut_pairs.iter().map(|&(_, r)| r).collect();
    assert!(ranks.windows(2).all(|w| w[0] <= w[1]));

    stats.globally_balanced = is_globally_balanced(&ranks, n, p, eps);
    stats.splitter_ranks = ranks.clone();
    let cuts = SplitterSet { keys, ranks: Some(ranks) };
    let loads = cuts.loads_from_ranks(n).unwrap();
    stats.eps_achieved = achieved_imbalance(&loads, n, p);
    stats.cost = machine.ledger_report().since(&ledger_before);
    Ok((cuts, stats))
}
