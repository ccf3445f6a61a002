//! HykSort-style splitter selection: every round draws `beta` uniform
//! samples from each unresolved splitter interval (uniform over the
//! interval's keys, not proportional to interval size), ranks them, and
//! tightens the intervals until every target range holds a seen key.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::bsp::{histogram_cost, Machine, StepOutput};
use crate::hss::{
    closest_seen, gamma_size, init_intervals, update_intervals, PartitionStats, RoundStat,
    SplitterInterval,
};
use crate::keyspace::{derive_seed, DistributedInput, TaggedKey};
use crate::partition::{
    achieved_imbalance, global_ranks, is_globally_balanced, local_histogram, SplitterSet,
};

/// Unseen content of an interval in rank space: `start..end` exclusive of
/// both bounding (already seen) keys.
fn unseen_span(iv: &SplitterInterval) -> (usize, usize) {
    let start = if iv.lo_key.is_some() { iv.lo_rank + 1 } else { 0 };
    (start, iv.hi_rank)
}

/// Local count and start offset of the unseen content on one processor.
fn local_unseen_range(iv: &SplitterInterval, local: &[TaggedKey]) -> (usize, usize) {
    let start = match iv.lo_key {
        None => 0,
        Some(lk) => local.partition_point(|&k| k <= lk),
    };
    let end = match iv.hi_key {
        None => local.len(),
        Some(hk) => local.partition_point(|&k| k < hk),
    };
    (start, end)
}

/// Iterates rounds of per-interval uniform sampling until all splitters are
/// resolved. `beta` is the per-interval per-round draw count.
pub fn hyksort_partition(
    machine: &mut Machine,
    input: &DistributedInput,
    eps: f64,
    beta: usize,
    seed: u64,
) -> (SplitterSet, PartitionStats) {
    let p = input.p();
    assert!(input.locally_sorted);
    assert!(beta >= 1);
    let n = input.n_total;
    let ledger_before = machine.ledger_report();
    let mut stats = PartitionStats { eps_target: eps, ..Default::default() };
    if p == 1 {
        stats.globally_balanced = true;
        return (SplitterSet::empty(), stats);
    }

    let mut intervals = init_intervals(n, p);
    let mut root_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x4879_6b53));
    let mut round = 0usize;

    loop {
        if intervals.iter().all(|iv| iv.resolved) {
            break;
        }
        assert!(round < 100_000, "hyksort failed to converge");
        round += 1;

        // Every splitter interval is sampled every round (the per-round
        // sample is beta per interval, resolved or not, so the overall
        // per-round volume stays near beta*p); resolution only stops the
        // loop. Intervals whose interior is already exhausted contribute
        // nothing.
        let sampled: Vec<usize> = (0..intervals.len())
            .filter(|&j| {
                let (s, e) = unseen_span(&intervals[j]);
                e > s
            })
            .collect();
        // Per-processor unseen counts for every sampled interval; this
        // count vector plays the role of the histogram.
        let count_vecs: Vec<Vec<u64>> = input
            .per_proc
            .iter()
            .map(|local| {
                sampled
                    .iter()
                    .map(|&j| {
                        let (s, e) = local_unseen_range(&intervals[j], local);
                        (e - s) as u64
                    })
                    .collect()
            })
            .collect();
        let flat = machine.gather(count_vecs.clone(), 0);
        let u = sampled.len();
        debug_assert_eq!(flat.len(), p * u);

        // Root draws uniform offsets per interval and addresses the owning
        // processors through the (processor, local offset) enumeration of
        // the interval content; a uniform subset of offsets maps to a
        // uniform subset of keys.
        let mut requests: Vec<Vec<(usize, usize)>> = vec![Vec::new(); p]; // (interval slot, local offset)
        let mut total_requests = 0usize;
        let mut domain = 0usize;
        for (slot, &j) in sampled.iter().enumerate() {
            let (start, end) = unseen_span(&intervals[j]);
            let total = end - start;
            domain += total;
            let counted: u64 = (0..p).map(|pi| flat[pi * u + slot]).sum();
            debug_assert_eq!(counted as usize, total);
            assert!(total > 0 || intervals[j].resolved, "unresolved interval with empty interior");
            let amount = beta.min(total);
            let mut offsets = rand::seq::index::sample(&mut root_rng, total, amount).into_vec();
            offsets.sort_unstable();
            total_requests += amount;
            let mut pi = 0usize;
            let mut below = 0usize; // offsets covered by processors < pi
            for off in offsets {
                while below + flat[pi * u + slot] as usize <= off {
                    below += flat[pi * u + slot] as usize;
                    pi += 1;
                }
                requests[pi].push((slot, off - below));
            }
        }

        // Deliver the requests (one word each) from the root.
        let mut states = vec![(); p];
        let req_for_step = requests.clone();
        let inboxes = machine.superstep(&mut states, |i, _| {
            if i == 0 {
                StepOutput {
                    comp: 0,
                    outbox: req_for_step
                        .iter()
                        .enumerate()
                        .filter(|(_, r)| !r.is_empty())
                        .map(|(dst, r)| (dst, r.clone()))
                        .collect(),
                }
            } else {
                StepOutput { comp: 0, outbox: vec![] }
            }
        });
        drop(inboxes);

        // Processors resolve the requested offsets to keys; the gathered
        // keys become this round's probes and one histogram round ranks
        // them.
        let responses: Vec<Vec<TaggedKey>> = input
            .per_proc
            .iter()
            .enumerate()
            .map(|(pi, local)| {
                requests[pi]
                    .iter()
                    .map(|&(slot, off)| {
                        let iv = &intervals[sampled[slot]];
                        let (s, _) = local_unseen_range(iv, local);
                        local[s + off]
                    })
                    .collect()
            })
            .collect();
        let mut probes = machine.gather(responses, 0);
        probes.sort_unstable();
        probes.dedup();
        machine.broadcast(&probes);
        let hist_cost: Vec<u64> =
            input.per_proc.iter().map(|l| histogram_cost(probes.len(), l.len())).collect();
        machine.charge_comp(&hist_cost);
        let locals: Vec<Vec<u64>> =
            input.per_proc.iter().map(|l| local_histogram(l, &probes)).collect();
        let counts = global_ranks(machine, &locals);
        let ranked: Vec<(TaggedKey, usize)> = probes
            .iter()
            .zip(&counts)
            .map(|(&key, &c)| (key, c as usize - 1))
            .collect();
        update_intervals(&mut intervals, &ranked, n, p, eps);

        let bounds: Vec<TaggedKey> = intervals
            .iter()
            .flat_map(|iv| {
                [iv.lo_key.unwrap_or(TaggedKey::MIN), iv.hi_key.unwrap_or(TaggedKey::MAX)]
            })
            .collect();
        machine.broadcast(&bounds);

        stats.total_sample += total_requests;
        stats.per_round.push(RoundStat {
            round,
            ratio: beta as f64,
            sample_size: total_requests,
            gamma_size: gamma_size(&intervals),
            domain_size: domain,
            prob_clamped: false,
        });
    }
    stats.rounds_run = round;

    let mut keys = Vec::with_capacity(p - 1);
    let mut cut_ranks = Vec::with_capacity(p - 1);
    for iv in &intervals {
        let (key, rank) = closest_seen(iv, n, p).expect("resolved interval has a seen key");
        keys.push(key);
        cut_ranks.push(rank);
    }
    assert!(keys.windows(2).all(|w| w[0] <= w[1]));
    stats.globally_balanced = is_globally_balanced(&cut_ranks, n, p, eps);
    let cuts = SplitterSet { keys, ranks: Some(cut_ranks) };
    let loads = cuts.loads_from_ranks(n).unwrap();
    stats.eps_achieved = achieved_imbalance(&loads, n, p);
    stats.splitter_ranks = cuts.ranks.clone().unwrap();
    stats.cost = machine.ledger_report().since(&ledger_before);
    (cuts, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keyspace::{generate_input, materialize_sorted, tag_input, DistributionKind};
    use crate::partition::{exchange_and_merge, target_range};

    fn sorted_input(dist: DistributionKind, n: usize, p: usize, seed: u64) -> DistributedInput {
        let mut input = tag_input(generate_input(dist, n, p, seed));
        input.local_sort();
        input
    }

    #[test]
    fn huge_beta_resolves_in_one_round() {
        let n = 1 << 12;
        let p = 8;
        let input = sorted_input(DistributionKind::Unif, n, p, 3);
        let mut m = Machine::new(p);
        let (cuts, stats) = hyksort_partition(&mut m, &input, 0.1, n, 1);
        assert_eq!(stats.rounds_run, 1);
        assert!(stats.globally_balanced);
        assert_eq!(cuts.keys.len(), p - 1);
    }

    #[test]
    fn partition_resolves_all_targets() {
        for dist in [DistributionKind::Skew2, DistributionKind::AllZeros] {
            let n = 1 << 12;
            let p = 16;
            let eps = 0.1;
            let input = sorted_input(dist, n, p, 5);
            let mut m = Machine::new(p);
            let (cuts, stats) = hyksort_partition(&mut m, &input, eps, 1, 9);
            assert!(stats.globally_balanced, "{dist}");
            for (j, &rank) in cuts.ranks.as_ref().unwrap().iter().enumerate() {
                assert!(target_range(j + 1, n, p, eps).contains(rank), "{dist} splitter {j}");
            }
        }
    }

    #[test]
    fn sort_pipeline_is_correct() {
        let n = 3000;
        let p = 8;
        let input = sorted_input(DistributionKind::Gauss, n, p, 77);
        let expect = materialize_sorted(&input);
        let mut m = Machine::new(p);
        let (cuts, _) = hyksort_partition(&mut m, &input, 0.2, 2, 4);
        let (out, _) = exchange_and_merge(&mut m, input, &cuts);
        assert!(out.is_globally_sorted());
        assert_eq!(materialize_sorted(&out), expect);
    }

    /// Reference simulator of the discrete two-sided shrinkage process that
    /// hyksort runs per splitter at p = 2 and beta = 1: repeatedly draw a
    /// uniform unseen rank, tighten the bracket, stop once a drawn or
    /// bounding rank lands in the target range.
    fn reference_rounds(n: usize, eps: f64, rng: &mut ChaCha8Rng) -> usize {
        let t = target_range(1, n, 2, eps);
        let (mut start, mut end) = (0usize, n); // unseen ranks start..end
        let ideal2 = n; // ideal * p with p = 2
        let mut rounds = 0;
        loop {
            rounds += 1;
            let r = start + rng.random_range(0..(end - start));
            if t.contains(r) {
                return rounds;
            }
            if r * 2 < ideal2 {
                start = r + 1;
            } else {
                end = r;
            }
        }
    }

    #[test]
    fn p2_rounds_match_reference_process_in_distribution() {
        let n = 1 << 14;
        let eps = 0.05;
        let trials = 400u64;
        let mut lib_rounds = Vec::new();
        let mut ref_rounds = Vec::new();
        for seed in 0..trials {
            let input = sorted_input(DistributionKind::Unif, n, 2, 40_000 + seed);
            let mut m = Machine::new(2);
            let (_, stats) = hyksort_partition(&mut m, &input, eps, 1, seed);
            lib_rounds.push(stats.rounds_run);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x00dd_ba11_u64));
            ref_rounds.push(reference_rounds(n, eps, &mut rng));
        }
        let mean = |v: &[usize]| v.iter().sum::<usize>() as f64 / v.len() as f64;
        let (ml, mr) = (mean(&lib_rounds), mean(&ref_rounds));
        assert!(
            (ml - mr).abs() <= 0.15 * mr.max(1.0),
            "means diverge: library {ml} vs reference {mr}"
        );
        // Pooled chi-square over round-count bins, df = bins-1, alpha=0.001.
        let max_r = *lib_rounds.iter().chain(&ref_rounds).max().unwrap();
        let bins = (max_r + 1).min(12);
        let mut ha = vec![0f64; bins];
        let mut hb = vec![0f64; bins];
        for &r in &lib_rounds {
            ha[r.min(bins - 1)] += 1.0;
        }
        for &r in &ref_rounds {
            hb[r.min(bins - 1)] += 1.0;
        }
        let mut chi2 = 0.0;
        let mut df = 0usize;
        for b in 0..bins {
            let tot = ha[b] + hb[b];
            if tot < 10.0 {
                continue;
            }
            df += 1;
            let ea = tot / 2.0;
            chi2 += (ha[b] - ea).powi(2) / ea + (hb[b] - ea).powi(2) / ea;
        }
        // Generous critical value for df <= 12 at alpha = 0.001.
        assert!(chi2 < 32.9, "distribution mismatch: chi2 = {chi2} over {df} bins");
    }
}
