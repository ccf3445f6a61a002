//! Multi-stage sorting: each stage partitions every processor group into
//! `r = p^(1/l)` subgroups, exchanges data within the groups, and recurses.
//!
//! Group partitions run on group-local machines whose ledgers are merged
//! into the parent by the parallel-composition rule (the slowest group
//! determines the stage's counters); the data exchanges of all groups share
//! one all-to-all superstep per stage on the parent machine.

use crate::bsp::{local_sort_cost, merge_cost, CostReport, Machine};
use crate::driver::config::integral_root;
use crate::hss::{
    hss_partition_into, HssConfig, HssError, PartitionMode, RoundsSpec, SamplerKind,
};
use crate::keyspace::{derive_seed, DistributedInput, TaggedKey};
use crate::baselines::{ams_partition_into, AmsLogBase};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultistageAlgo {
    Hss,
    Ams,
}

/// Per-stage measurements.
#[derive(Debug, Clone)]
pub struct StageReport {
    pub stage: usize,
    pub groups: usize,
    /// Subgroups each group splits into (`r`).
    pub parts: usize,
    /// Rounds of the slowest group.
    pub rounds_run: usize,
    pub extra_rounds: usize,
    /// Samples drawn across all groups.
    pub total_sample: usize,
    /// Largest per-group sample (the parallel-cost determinant).
    pub max_group_sample: usize,
    /// Max-merged partition ledger across the stage's groups.
    pub partition_cost: CostReport,
    /// Communication charged by the stage's joint exchange.
    pub exchange_comm: u64,
    pub eps_stage: f64,
}

/// Sorts `input` in `stages` stages with per-stage tolerance `eps_stage`.
/// The overall imbalance is at most `(1 + eps_stage)^stages - 1` (plus
/// integer rounding) when every stage meets its target.
pub fn multistage_sort(
    machine: &mut Machine,
    mut input: DistributedInput,
    stages: usize,
    eps_stage: f64,
    algo: MultistageAlgo,
    mode: PartitionMode,
    seed: u64,
) -> Result<(DistributedInput, Vec<StageReport>), HssError> {
    let p = input.p();
    assert_eq!(machine.p(), p);
    let r = integral_root(p, stages).expect("p^(1/stages) must be integral");
    if !input.locally_sorted {
        let costs: Vec<u64> = input.per_proc.iter().map(|l| local_sort_cost(l.len())).collect();
        machine.charge_comp(&costs);
        input.local_sort();
    }

    let mut reports = Vec::with_capacity(stages);
    for stage in 1..=stages {
        let groups = r.pow(stage as u32 - 1);
        let m = p / groups; // processors per group
        let sub = m / r; // processors per subgroup after this stage
        let stage_seed = derive_seed(seed, stage as u64);

        let mut stage_cost = CostReport::default();
        let mut group_cuts = Vec::with_capacity(groups);
        let mut report = StageReport {
            stage,
            groups,
            parts: r,
            rounds_run: 0,
            extra_rounds: 0,
            total_sample: 0,
            max_group_sample: 0,
            partition_cost: CostReport::default(),
            exchange_comm: 0,
            eps_stage,
        };
        for g in 0..groups {
            let base = g * m;
            let gdata: Vec<Vec<TaggedKey>> = input.per_proc[base..base + m].to_vec();
            let gn = gdata.iter().map(Vec::len).sum();
            let ginput = DistributedInput {
                per_proc: gdata,
                n_total: gn,
                dist: input.dist,
                seed: input.seed,
                locally_sorted: true,
            };
            let mut gm = Machine::new(m);
            let gseed = derive_seed(stage_seed, g as u64);
            let (cuts, stats) = match algo {
                MultistageAlgo::Hss => {
                    let cfg = HssConfig {
                        eps: eps_stage,
                        rounds: RoundsSpec::Auto,
                        mode,
                        sampler: SamplerKind::IntervalRestricted,
                        samples_per_proc: None,
                        seed: gseed,
                    };
                    hss_partition_into(&mut gm, &ginput, r, &cfg)?
                }
                MultistageAlgo::Ams => {
                    let (cuts, stats, _) = ams_partition_into(
                        &mut gm,
                        &ginput,
                        r,
                        eps_stage,
                        AmsLogBase::Natural,
                        gseed,
                    );
                    (cuts, stats)
                }
            };
            stage_cost = stage_cost.max_merge(&gm.ledger_report());
            report.rounds_run = report.rounds_run.max(stats.rounds_run);
            report.extra_rounds = report.extra_rounds.max(stats.extra_rounds);
            report.total_sample += stats.total_sample;
            report.max_group_sample = report.max_group_sample.max(stats.total_sample);
            group_cuts.push(cuts);
        }
        machine.absorb_parallel_phase(&stage_cost);
        report.partition_cost = stage_cost;

        // Every group broadcasts its r-1 cuts; the groups do so in
        // parallel, one superstep with the largest group's message charged.
        machine.absorb_parallel_phase(&CostReport {
            supersteps: 1,
            comp: 0,
            comm: (r - 1) as u64,
            alltoalls: 0,
        });

        // Joint exchange: every group routes bucket j to its j-th subgroup,
        // spreading over the subgroup's processors round-robin by sender.
        let before = machine.ledger_report();
        let (per_proc, n_total, dist, in_seed) =
            (input.per_proc, input.n_total, input.dist, input.seed);
        let mut outboxes: Vec<Vec<Vec<TaggedKey>>> =
            (0..p).map(|_| vec![Vec::new(); p]).collect();
        for (src, local) in per_proc.into_iter().enumerate() {
            let g = src / m;
            let qi = src % m;
            let base = g * m;
            let cuts = &group_cuts[g];
            let mut bounds = Vec::with_capacity(r + 1);
            bounds.push(0);
            for cut in &cuts.keys {
                bounds.push(local.partition_point(|&k| k < *cut));
            }
            bounds.push(local.len());
            for (j, w) in bounds.windows(2).enumerate() {
                let dst = base + j * sub + (qi % sub);
                outboxes[src][dst] = local[w[0]..w[1]].to_vec();
            }
        }
        let inboxes = machine.all_to_all(outboxes);
        report.exchange_comm = machine.ledger_report().since(&before).comm;

        let merge_costs: Vec<u64> = inboxes
            .iter()
            .map(|pieces| {
                let n: usize = pieces.iter().map(Vec::len).sum();
                let ways = pieces.iter().filter(|piece| !piece.is_empty()).count();
                merge_cost(n, ways)
            })
            .collect();
        machine.charge_comp(&merge_costs);
        let merged: Vec<Vec<TaggedKey>> = inboxes
            .into_iter()
            .map(|pieces| {
                let mut all: Vec<TaggedKey> = pieces.into_iter().flatten().collect();
                all.sort_unstable();
                all
            })
            .collect();
        input = DistributedInput {
            per_proc: merged,
            n_total,
            dist,
            seed: in_seed,
            locally_sorted: true,
        };
        reports.push(report);
    }
    Ok((input, reports))
}
