//! The experiment loop: generate inputs, run the configured partitioner and
//! exchange per seed, verify the output, and emit tidy CSV rows.
//!
//! Row schema (one header, `CSV_HEADER`): per-round rows carry `round`,
//! `ratio`, `sample_size`, and `gamma_size`; summary rows leave `round`
//! empty and carry the run-level fields. Multi-stage runs emit one summary
//! row per stage plus an overall row with `stage = 0`. Exit codes at the
//! CLI: 0 ok, 2 configuration error, 3 oracle violation.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use thiserror::Error;

use crate::baselines::{
    ams_partition, histogramsort_classic_partition, hyksort_partition, samplesort_splitters,
    AmsLogBase, HistSortError, ProbeSpace, SampleMethod,
};
use crate::bsp::{local_sort_cost, Machine};
use crate::driver::config::{Algorithm, ConfigError, ExperimentConfig};
use crate::driver::multistage::{multistage_sort, MultistageAlgo, StageReport};
use crate::hss::{hss_partition, HssConfig, HssError, PartitionStats, RoundsSpec, SamplerKind};
use crate::keyspace::{generate_input, materialize_sorted, tag_input, DistributedInput};
use crate::partition::{
    achieved_imbalance, exchange_and_merge, is_globally_balanced, SplitterSet,
};

pub const CSV_HEADER: [&str; 19] = [
    "algo",
    "p",
    "n_total",
    "dist",
    "seed",
    "stage",
    "round",
    "ratio",
    "sample_size",
    "gamma_size",
    "rounds_run",
    "extra_rounds",
    "eps_target",
    "eps_achieved",
    "globally_balanced",
    "supersteps",
    "comp",
    "comm",
    "wall_ms",
];

#[derive(Debug, Error)]
pub enum DriverError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Regime(String),
    #[error("oracle violation: {0}")]
    OracleViolation(String),
}

impl From<HssError> for DriverError {
    fn from(e: HssError) -> Self {
        DriverError::Regime(e.to_string())
    }
}

impl From<HistSortError> for DriverError {
    fn from(e: HistSortError) -> Self {
        DriverError::Regime(e.to_string())
    }
}

/// One CSV row; `None` renders as an empty field.
#[derive(Debug, Clone, Default)]
pub struct ResultRow {
    pub algo: String,
    pub p: usize,
    pub n_total: usize,
    pub dist: String,
    pub seed: u64,
    pub stage: usize,
    pub round: Option<usize>,
    pub ratio: Option<f64>,
    pub sample_size: Option<usize>,
    pub gamma_size: Option<usize>,
    pub rounds_run: Option<usize>,
    pub extra_rounds: Option<usize>,
    pub eps_target: f64,
    pub eps_achieved: Option<f64>,
    pub globally_balanced: Option<bool>,
    pub supersteps: Option<u64>,
    pub comp: Option<u64>,
    pub comm: Option<u64>,
    pub wall_ms: Option<f64>,
}

impl ResultRow {
    fn record(&self) -> Vec<String> {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(ToString::to_string).unwrap_or_default()
        }
        vec![
            self.algo.clone(),
            self.p.to_string(),
            self.n_total.to_string(),
            self.dist.clone(),
            self.seed.to_string(),
            self.stage.to_string(),
            opt(&self.round),
            self.ratio.map(|r| format!("{r:.6}")).unwrap_or_default(),
            opt(&self.sample_size),
            opt(&self.gamma_size),
            opt(&self.rounds_run),
            opt(&self.extra_rounds),
            format!("{:.6}", self.eps_target),
            self.eps_achieved.map(|e| format!("{e:.6}")).unwrap_or_default(),
            opt(&self.globally_balanced),
            opt(&self.supersteps),
            opt(&self.comp),
            opt(&self.comm),
            self.wall_ms.map(|w| format!("{w:.3}")).unwrap_or_default(),
        ]
    }
}

pub fn write_csv_header<W: Write>(writer: &mut csv::Writer<W>) -> Result<(), csv::Error> {
    writer.write_record(CSV_HEADER)
}

/// Aggregates of one `(algo, p, n, dist)` cell of the sweep.
#[derive(Debug, Clone)]
pub struct SummaryLine {
    pub algo: Algorithm,
    pub p: usize,
    pub n_total: usize,
    pub dist: String,
    pub trials: usize,
    pub mean_rounds: f64,
    pub mean_total_sample: f64,
    pub mean_eps_achieved: f64,
    pub balanced_fraction: f64,
    pub mean_comm: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub lines: Vec<SummaryLine>,
    pub rows_written: usize,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<20} {:>6} {:>9} {:>6} {:>7} {:>8} {:>12} {:>10} {:>9} {:>12}",
            "algo", "p", "n_total", "dist", "trials", "rounds", "sample", "eps", "balanced",
            "comm"
        )?;
        for l in &self.lines {
            writeln!(
                f,
                "{:<20} {:>6} {:>9} {:>6} {:>7} {:>8.2} {:>12.1} {:>10.5} {:>9.2} {:>12.1}",
                l.algo.token(),
                l.p,
                l.n_total,
                l.dist,
                l.trials,
                l.mean_rounds,
                l.mean_total_sample,
                l.mean_eps_achieved,
                l.balanced_fraction,
                l.mean_comm,
            )?;
        }
        write!(f, "{} rows written", self.rows_written)
    }
}

/// Outcome of one (algo, seed) trial.
pub struct TrialOutcome {
    pub stats: PartitionStats,
    pub stage_reports: Vec<StageReport>,
    pub output: DistributedInput,
    pub wall_ms: f64,
}

/// Runs one seeded trial of `algo` under `cfg` and verifies the output.
pub fn run_trial(
    algo: Algorithm,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<TrialOutcome, DriverError> {
    let n = cfg.n_total();
    let p = cfg.p;
    let mut input = tag_input(generate_input(cfg.dist, n, p, seed));
    let checksum_before = input.checksum();
    let oracle = if cfg.check_oracle { Some(materialize_sorted(&input)) } else { None };

    let mut machine = Machine::new(p);
    let sort_costs: Vec<u64> = input.per_proc.iter().map(|l| local_sort_cost(l.len())).collect();
    machine.charge_comp(&sort_costs);
    input.local_sort();

    let started = Instant::now();
    let (output, mut stats, stage_reports) = if cfg.stages > 1 {
        let malgo = match algo {
            Algorithm::Hss | Algorithm::Hss1 => MultistageAlgo::Hss,
            Algorithm::Ams => MultistageAlgo::Ams,
            other => {
                return Err(DriverError::Regime(format!(
                    "--stages > 1 supports hss and ams partitioning, not {other}"
                )))
            }
        };
        let (output, reports) = multistage_sort(
            &mut machine,
            input,
            cfg.stages,
            cfg.eps_stage(),
            malgo,
            cfg.mode.mode(),
            seed,
        )?;
        let stats = PartitionStats {
            rounds_run: reports.iter().map(|r| r.rounds_run).sum(),
            extra_rounds: reports.iter().map(|r| r.extra_rounds).sum(),
            total_sample: reports.iter().map(|r| r.total_sample).sum(),
            eps_target: cfg.eps_overall(),
            ..Default::default()
        };
        (output, stats, reports)
    } else {
        let (cuts, stats) = run_partitioner(algo, &mut machine, &input, cfg, seed)?;
        let (output, _) = exchange_and_merge(&mut machine, input, &cuts);
        (output, stats, Vec::new())
    };
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;

    // Authoritative balance figures from the final distribution.
    let loads = output.loads();
    let mut prefix = Vec::with_capacity(p.saturating_sub(1));
    let mut acc = 0usize;
    for &l in loads.iter().take(p - 1) {
        acc += l;
        prefix.push(acc);
    }
    stats.eps_achieved = achieved_imbalance(&loads, n, p);
    stats.globally_balanced = is_globally_balanced(&prefix, n, p, cfg.eps_overall());
    stats.splitter_ranks = prefix;
    stats.eps_target = cfg.eps_overall();
    stats.cost = machine.ledger_report();

    if !output.is_globally_sorted() {
        return Err(DriverError::OracleViolation(format!(
            "{algo} seed {seed}: output not globally sorted"
        )));
    }
    if output.checksum() != checksum_before || output.n_total != n {
        return Err(DriverError::OracleViolation(format!(
            "{algo} seed {seed}: output is not a permutation of the input"
        )));
    }
    if let Some(expect) = oracle {
        let got: Vec<_> = output.iter_all().collect();
        if got != expect {
            return Err(DriverError::OracleViolation(format!(
                "{algo} seed {seed}: output differs from the full-sort oracle"
            )));
        }
    }
    Ok(TrialOutcome { stats, stage_reports, output, wall_ms })
}

/// Dispatches the single-stage partitioners.
fn run_partitioner(
    algo: Algorithm,
    machine: &mut Machine,
    input: &DistributedInput,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<(SplitterSet, PartitionStats), DriverError> {
    let p = cfg.p;
    let n = cfg.n_total();
    let min_local = input.per_proc.iter().map(Vec::len).min().unwrap_or(0);
    match algo {
        Algorithm::Hss | Algorithm::Hss1 => {
            let hss_cfg = HssConfig {
                eps: cfg.eps,
                rounds: if algo == Algorithm::Hss1 {
                    RoundsSpec::Fixed(1)
                } else {
                    cfg.rounds.spec()
                },
                mode: cfg.mode.mode(),
                sampler: SamplerKind::IntervalRestricted,
                samples_per_proc: cfg.samples_per_proc,
                seed,
            };
            Ok(hss_partition(machine, input, &hss_cfg)?)
        }
        Algorithm::SamplesortRegular => {
            let s = ((p as f64 / cfg.eps).ceil() as usize).clamp(1, min_local.max(1));
            Ok(samplesort_splitters(machine, input, SampleMethod::Regular { s }, seed))
        }
        Algorithm::SamplesortRandom => {
            let s = (((n as f64).ln() / (cfg.eps * cfg.eps)).ceil() as usize)
                .clamp(1, min_local.max(1));
            Ok(samplesort_splitters(machine, input, SampleMethod::RandomBlocks { s }, seed))
        }
        Algorithm::Ams => {
            let (cuts, stats, _) = ams_partition(machine, input, cfg.eps, AmsLogBase::Natural, seed);
            Ok((cuts, stats))
        }
        Algorithm::Hyksort => Ok(hyksort_partition(machine, input, cfg.eps, cfg.beta, seed)),
        Algorithm::Histsort => Ok(histogramsort_classic_partition(
            machine,
            input,
            cfg.eps,
            2 * p,
            ProbeSpace::Tagged,
        )?),
    }
}

/// Runs the full experiment (sweep x algorithms x seeds), writing CSV rows
/// to `out`. Balance misses are data; only configuration problems, I/O
/// failures, and oracle violations abort.
pub fn run_experiment<W: Write>(
    cfg: &ExperimentConfig,
    out: W,
) -> Result<RunSummary, DriverError> {
    cfg.validate()?;
    let combos = cfg.expand()?;
    let mut writer = csv::Writer::from_writer(out);
    write_csv_header(&mut writer)?;

    let mut summary = RunSummary::default();
    for combo in &combos {
        for algo in combo.algo.expand() {
            let mut agg_rounds = 0usize;
            let mut agg_sample = 0usize;
            let mut agg_eps = 0.0f64;
            let mut agg_balanced = 0usize;
            let mut agg_comm = 0u64;
            for trial in 0..combo.trials {
                let seed = combo.seed.wrapping_add(trial as u64);
                let outcome = run_trial(algo, combo, seed)?;
                summary.rows_written +=
                    write_trial_rows(&mut writer, algo, combo, seed, &outcome)?;
                agg_rounds += outcome.stats.rounds_run + outcome.stats.extra_rounds;
                agg_sample += outcome.stats.total_sample;
                agg_eps += outcome.stats.eps_achieved;
                agg_balanced += outcome.stats.globally_balanced as usize;
                agg_comm += outcome.stats.cost.comm;
            }
            let t = combo.trials as f64;
            summary.lines.push(SummaryLine {
                algo,
                p: combo.p,
                n_total: combo.n_total(),
                dist: combo.dist.token().to_string(),
                trials: combo.trials,
                mean_rounds: agg_rounds as f64 / t,
                mean_total_sample: agg_sample as f64 / t,
                mean_eps_achieved: agg_eps / t,
                balanced_fraction: agg_balanced as f64 / t,
                mean_comm: agg_comm as f64 / t,
            });
        }
    }
    writer.flush()?;
    Ok(summary)
}

fn write_trial_rows<W: Write>(
    writer: &mut csv::Writer<W>,
    algo: Algorithm,
    combo: &ExperimentConfig,
    seed: u64,
    outcome: &TrialOutcome,
) -> Result<usize, csv::Error> {
    let base = ResultRow {
        algo: algo.token().to_string(),
        p: combo.p,
        n_total: combo.n_total(),
        dist: combo.dist.token().to_string(),
        seed,
        stage: 1,
        eps_target: outcome.stats.eps_target,
        ..Default::default()
    };
    let mut written = 0;

    for r in &outcome.stats.per_round {
        let row = ResultRow {
            round: Some(r.round),
            ratio: Some(r.ratio),
            sample_size: Some(r.sample_size),
            gamma_size: Some(r.gamma_size),
            ..base.clone()
        };
        writer.write_record(row.record())?;
        written += 1;
    }
    for (idx, sr) in outcome.stage_reports.iter().enumerate() {
        let row = ResultRow {
            stage: idx + 1,
            sample_size: Some(sr.total_sample),
            rounds_run: Some(sr.rounds_run),
            extra_rounds: Some(sr.extra_rounds),
            eps_target: sr.eps_stage,
            supersteps: Some(sr.partition_cost.supersteps + 1),
            comp: Some(sr.partition_cost.comp),
            comm: Some(sr.partition_cost.comm + sr.exchange_comm),
            ..base.clone()
        };
        writer.write_record(row.record())?;
        written += 1;
    }
    let summary_row = ResultRow {
        stage: if outcome.stage_reports.is_empty() { 1 } else { 0 },
        sample_size: Some(outcome.stats.total_sample),
        gamma_size: outcome.stats.per_round.last().map(|r| r.gamma_size),
        rounds_run: Some(outcome.stats.rounds_run),
        extra_rounds: Some(outcome.stats.extra_rounds),
        eps_achieved: Some(outcome.stats.eps_achieved),
        globally_balanced: Some(outcome.stats.globally_balanced),
        supersteps: Some(outcome.stats.cost.supersteps),
        comp: Some(outcome.stats.cost.comp),
        comm: Some(outcome.stats.cost.comm),
        wall_ms: Some(outcome.wall_ms),
        ..base
    };
    writer.write_record(summary_row.record())?;
    Ok(written + 1)
}
