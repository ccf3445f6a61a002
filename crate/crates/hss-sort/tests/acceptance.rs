//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (run with `--nocapture` to see them). Statistical criteria use
//! fixed seeds, so the suite is deterministic.

use std::time::Instant;

use rand::Rng;

use hss_sort::baselines::{
    ams_partition, ams_practical_sample_estimate, hyksort_partition, line_cdf,
    line_tail_estimate, samplesort_splitters, AmsLogBase, SampleMethod,
};
use hss_sort::driver::{
    multistage_sort, predicted_costs, run_trial, AlgoSel, Algorithm, ExperimentConfig,
    MultistageAlgo, RoundsArg,
};
use hss_sort::hss::{
    hss_partition, optimal_round_count, schedule_ratios, HssConfig, PartitionMode, PartitionStats,
};
use hss_sort::keyspace::{
    generate_input, ideal_splitter_ranks, materialize_sorted, proc_rng, tag_input,
    DistributedInput, DistributionKind,
};
use hss_sort::partition::{achieved_imbalance, exchange_and_merge, RepresentativeSample};
use hss_sort::Machine;

fn sorted_input(dist: DistributionKind, n: usize, p: usize, seed: u64) -> DistributedInput {
    let mut input = tag_input(generate_input(dist, n, p, seed));
    input.local_sort();
    input
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

// 1. Every algorithm x six distributions x p in {4, 64, 256} x 20 seeds
// sorts correctly (checksum + sortedness always; full oracle on p <= 64).
#[test]
fn criterion_01_correctness() {
    let mut runs = 0usize;
    for algo in Algorithm::ALL {
        for dist in DistributionKind::ALL {
            for p in [4usize, 64, 256] {
                for trial in 0..20u64 {
                    let cfg = ExperimentConfig {
                        algo: AlgoSel::One(algo),
                        p,
                        n_per_proc: 64,
                        eps: 0.25,
                        rounds: RoundsArg::Auto,
                        dist,
                        trials: 1,
                        check_oracle: p <= 64,
                        ..Default::default()
                    };
                    let seed = 1000 + trial;
                    run_trial(algo, &cfg, seed).unwrap_or_else(|e| {
                        panic!("{algo} {dist} p={p} seed={seed}: {e}")
                    });
                    runs += 1;
                }
            }
        }
    }
    report("01 correctness", runs == 7 * 6 * 3 * 20, &format!("{runs} runs, zero failures"));
}

struct BalanceRun {
    stats: Vec<PartitionStats>,
    elapsed_s: f64,
    p: usize,
    n: usize,
    eps: f64,
}

// Shared runs for criteria 2-4: p=256, N=2^20, eps=0.05, k=auto, UNIF,
// 100 seeds, fixed-rounds mode.
fn balance_runs() -> BalanceRun {
    let p = 256;
    let n = 1 << 20;
    let eps = 0.05;
    let started = Instant::now();
    let stats: Vec<PartitionStats> = (0..100u64)
        .map(|seed| {
            let input = sorted_input(DistributionKind::Unif, n, p, 7_000 + seed);
            let mut m = Machine::new(p);
            let (_, stats) = hss_partition(&mut m, &input, &HssConfig::new(eps, seed)).unwrap();
            stats
        })
        .collect();
    BalanceRun { stats, elapsed_s: started.elapsed().as_secs_f64(), p, n, eps }
}

// 2. HSS global balance in >= 95/100 seeds within 60 s; 3. interval-union
// shrinkage |gamma_j| <= 4N/s_j in >= 90% of seeds for every round in the
// valid regime; 4. per-round sample sizes Z_j <= 5 p s_j / s_{j-1} in
// >= 95% of (seed, round) pairs.
#[test]
fn criteria_02_03_04_balance_gamma_samples() {
    let run = balance_runs();
    let (p, n, eps) = (run.p, run.n, run.eps);

    let balanced = run.stats.iter().filter(|s| s.globally_balanced).count();
    report(
        "02 hss-balance",
        balanced >= 95 && run.elapsed_s <= 60.0,
        &format!("{balanced}/100 seeds balanced in {:.1} s", run.elapsed_s),
    );

    let k = optimal_round_count(p, eps);
    let ratios = schedule_ratios(k, p, eps).unwrap().ratios;
    let regime_cap = (2.0 * p as f64 / (p as f64).ln()).sqrt();
    let mut gamma_detail = String::new();
    let mut gamma_ok = true;
    for (j, &s_j) in ratios.iter().enumerate() {
        if s_j >= regime_cap {
            continue;
        }
        let bound = 4.0 * n as f64 / s_j;
        let good = run
            .stats
            .iter()
            .filter(|s| (s.per_round[j].gamma_size as f64) <= bound)
            .count();
        gamma_ok &= good >= 90;
        gamma_detail.push_str(&format!("round {}: {good}/100; ", j + 1));
    }
    report("03 gamma-shrinkage", gamma_ok, gamma_detail.trim_end_matches("; "));

    let mut pairs = 0usize;
    let mut within = 0usize;
    for stats in &run.stats {
        for (j, r) in stats.per_round.iter().enumerate() {
            let s_prev = if j == 0 { 1.0 } else { ratios[j - 1] };
            let bound = 5.0 * p as f64 * ratios[j] / s_prev;
            pairs += 1;
            within += usize::from((r.sample_size as f64) <= bound);
        }
    }
    report(
        "04 sample-bound",
        within * 100 >= pairs * 95,
        &format!("{within}/{pairs} (seed, round) pairs within the bound"),
    );
}

// 5. Round-count comparison at one sample per processor per round,
// eps = 0.02, 50 seeds: HSS mean rounds follow the c*ln(ln p/eps) shape
// (no-intercept fit, R^2 >= 0.9), HSS beats HykSort at every p, and the
// gap widens from p=64 to p=1024. Also checks the per-seed total-sample
// ordering at p >= 256.
#[test]
fn criterion_05_round_counts() {
    let eps = 0.02;
    let n_per_proc = 256;
    let seeds = 50u64;
    let ps = [16usize, 64, 256, 1024];
    let mut hss_means = Vec::new();
    let mut hyk_means = Vec::new();
    let mut ordering = Vec::new();
    for &p in &ps {
        let n = p * n_per_proc;
        let mut hss_rounds = 0usize;
        let mut hyk_rounds = 0usize;
        let mut sample_wins = 0usize;
        for seed in 0..seeds {
            let input = sorted_input(DistributionKind::Unif, n, p, 11_000 + seed);
            let mut m = Machine::new(p);
            let mut cfg = HssConfig::new(eps, seed);
            cfg.mode = PartitionMode::Guarantee;
            cfg.samples_per_proc = Some(1);
            let (_, hss_stats) = hss_partition(&mut m, &input, &cfg).unwrap();
            hss_rounds += hss_stats.rounds_run + hss_stats.extra_rounds;

            let mut m = Machine::new(p);
            let (_, hyk_stats) = hyksort_partition(&mut m, &input, eps, 1, seed);
            hyk_rounds += hyk_stats.rounds_run;
            sample_wins += usize::from(hss_stats.total_sample <= hyk_stats.total_sample);
        }
        hss_means.push(hss_rounds as f64 / seeds as f64);
        hyk_means.push(hyk_rounds as f64 / seeds as f64);
        if p >= 256 {
            ordering.push((p, sample_wins));
        }
    }

    // One-parameter fit through the origin against x = ln(ln p / eps);
    // R^2 uses the no-intercept (uncentered) convention.
    let xs: Vec<f64> = ps.iter().map(|&p| ((p as f64).ln() / eps).ln()).collect();
    let c = xs.iter().zip(&hss_means).map(|(x, y)| x * y).sum::<f64>()
        / xs.iter().map(|x| x * x).sum::<f64>();
    let ss_res: f64 = xs.iter().zip(&hss_means).map(|(x, y)| (y - c * x).powi(2)).sum();
    let ss_tot: f64 = hss_means.iter().map(|y| y * y).sum();
    let r2 = 1.0 - ss_res / ss_tot;

    let hss_wins_everywhere = hss_means.iter().zip(&hyk_means).all(|(h, y)| h < y);
    let gap_64 = hyk_means[1] - hss_means[1];
    let gap_1024 = hyk_means[3] - hss_means[3];
    let ordering_ok = ordering.iter().all(|&(_, wins)| wins as f64 >= 0.9 * seeds as f64);
    report(
        "05 round-counts",
        r2 >= 0.9 && hss_wins_everywhere && gap_1024 > gap_64 && ordering_ok,
        &format!(
            "hss {hss_means:.2?} vs hyksort {hyk_means:.2?}, fit c={c:.2} R2={r2:.4}, \
             gap {gap_64:.2}->{gap_1024:.2}, sample ordering {ordering:?}"
        ),
    );
}

// 6. The p=2048, eps=0.02 anchors: exactly 6 rounds, and the practical
// AMS sample estimate evaluates to ~100p within 10%.
#[test]
fn criterion_06_anchor_values() {
    let k = optimal_round_count(2048, 0.02);
    let est = ams_practical_sample_estimate(2048, 0.02);
    let target = 100.0 * 2048.0;
    let within = (est - target).abs() <= 0.1 * target;
    report(
        "06 anchors",
        k == 6 && within,
        &format!("optimal rounds = {k}, ams practical sample = {est:.0} vs 100p = {target:.0}"),
    );
}

// 7. AMS local balance: p=64, N=2^18, eps=0.1, UNIF, 100 seeds; >= 95
// seeds with all loads <= (1+eps)N/p and no overflow flag.
#[test]
fn criterion_07_ams_local_balance() {
    let p = 64;
    let n = 1 << 18;
    let eps = 0.1;
    let cap = ((1.0 + eps) * n as f64 / p as f64).floor() as usize;
    let mut clean = 0;
    for seed in 0..100u64 {
        let input = sorted_input(DistributionKind::Unif, n, p, 21_000 + seed);
        let mut m = Machine::new(p);
        let (_, _, scan) = ams_partition(&mut m, &input, eps, AmsLogBase::Natural, seed);
        if !scan.overflow && scan.loads.iter().all(|&l| l <= cap) {
            clean += 1;
        }
    }
    report("07 ams-balance", clean >= 95, &format!("{clean}/100 seeds locally balanced"));
}

// 8. Regular sampling with s = ceil(p/eps): imbalance <= eps on every run
// and every distribution, deterministically.
#[test]
fn criterion_08_regular_sampling_determinism() {
    let p = 32;
    let eps = 0.1;
    let n = p * 1024;
    let s = (p as f64 / eps).ceil() as usize;
    let mut worst: f64 = f64::MIN;
    for dist in DistributionKind::ALL {
        for seed in 0..5u64 {
            let input = sorted_input(dist, n, p, 31_000 + seed);
            let mut m = Machine::new(p);
            let (cuts, _) = samplesort_splitters(&mut m, &input, SampleMethod::Regular { s }, 0);
            let (out, _) = exchange_and_merge(&mut m, input, &cuts);
            let imb = achieved_imbalance(&out.loads(), n, p);
            worst = worst.max(imb);
            assert!(imb <= eps, "{dist} seed {seed}: imbalance {imb} > {eps}");
        }
    }
    report("08 regular-sampling", worst <= eps, &format!("worst imbalance {worst:.5} <= {eps}"));
}

// 9. The line algorithm: Monte Carlo tail at 10^5 trials within 0.01 of
// the closed form, and F^1(0.5) = 0.5 (1 + ln 2) to 1e-12.
#[test]
fn criterion_09_line_algorithm() {
    let mut rng = proc_rng(424_242, 0);
    let est = line_tail_estimate(0.5, 1, 100_000, &mut rng);
    let exact = 1.0 - line_cdf(0.5, 1);
    let mc_ok = (est - exact).abs() <= 0.01;
    let cdf_ok = (line_cdf(0.5, 1) - 0.5 * (1.0 + 2f64.ln())).abs() <= 1e-12;
    report(
        "09 line-algorithm",
        mc_ok && cdf_ok,
        &format!("MC {est:.5} vs exact {exact:.5}; F1(0.5) err {:.1e}",
            (line_cdf(0.5, 1) - 0.5 * (1.0 + 2f64.ln())).abs()),
    );
}

// 10. Approximate histogramming: p=64, N=2^16, eps=0.1,
// s = ceil(sqrt(2 p ln p)/eps): >= 95% of 1000 rank queries within
// N*eps/p of the oracle rank.
#[test]
fn criterion_10_approximate_ranks() {
    let p = 64;
    let n = 1 << 16;
    let eps = 0.1;
    let s = ((2.0 * p as f64 * (p as f64).ln()).sqrt() / eps).ceil() as usize;
    let input = sorted_input(DistributionKind::Unif, n, p, 51_000);
    let sorted = materialize_sorted(&input);
    let sample = RepresentativeSample::build(&input, s, 515);
    let tol = n as f64 * eps / p as f64;
    let mut qrng = proc_rng(51_999, 0);
    let mut within = 0;
    for _ in 0..1000 {
        let rank = qrng.random_range(0..n);
        let est = hss_sort::partition::approx_rank(sorted[rank], &sample, n);
        within += usize::from((est - rank as f64).abs() <= tol);
    }
    report(
        "10 approx-ranks",
        within >= 950,
        &format!("{within}/1000 queries within N*eps/p = {tol:.1} (s = {s})"),
    );
}

// 11. Distribution robustness: mean rounds and mean total sample vary by
// at most 1.5x min-to-max across the six distributions.
#[test]
fn criterion_11_distribution_robustness() {
    let p = 256;
    let n = 1 << 20;
    let eps = 0.05;
    let seeds = 50u64;
    let mut mean_rounds = Vec::new();
    let mut mean_samples = Vec::new();
    for dist in DistributionKind::ALL {
        let mut rounds = 0usize;
        let mut samples = 0usize;
        for seed in 0..seeds {
            let input = sorted_input(dist, n, p, 61_000 + seed);
            let mut m = Machine::new(p);
            let (_, stats) = hss_partition(&mut m, &input, &HssConfig::new(eps, seed)).unwrap();
            rounds += stats.rounds_run + stats.extra_rounds;
            samples += stats.total_sample;
        }
        mean_rounds.push(rounds as f64 / seeds as f64);
        mean_samples.push(samples as f64 / seeds as f64);
    }
    let spread = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max)
        / v.iter().cloned().fold(f64::MAX, f64::min);
    let round_spread = spread(&mean_rounds);
    let sample_spread = spread(&mean_samples);
    report(
        "11 distribution-robustness",
        round_spread <= 1.5 && sample_spread <= 1.5,
        &format!(
            "rounds spread {round_spread:.3}, sample spread {sample_spread:.3} \
             (rounds {mean_rounds:.2?})"
        ),
    );
}

// 12. Two-stage sorting at p=256 (r=16), eps_stage=0.01: overall imbalance
// <= 0.021 in >= 95/100 seeds, exactly two exchange all-to-alls, and
// per-stage partition communication within [0.2, 5] of the prediction.
#[test]
fn criterion_12_multistage() {
    let p = 256;
    let n = 1 << 20;
    let l = 2;
    let eps_stage = 0.01;
    let r = 16;
    let k = optimal_round_count(r, eps_stage);
    let mut balanced = 0;
    let mut ratio_lo = f64::MAX;
    let mut ratio_hi: f64 = 0.0;
    let mut alltoalls_ok = true;
    for seed in 0..100u64 {
        let input = sorted_input(DistributionKind::Unif, n, p, 71_000 + seed);
        let mut m = Machine::new(p);
        let (out, reports) = multistage_sort(
            &mut m,
            input,
            l,
            eps_stage,
            MultistageAlgo::Hss,
            PartitionMode::Guarantee,
            seed,
        )
        .unwrap();
        let imb = achieved_imbalance(&out.loads(), n, p);
        balanced += usize::from(imb <= 0.021);
        alltoalls_ok &= m.ledger_report().alltoalls == 2;
        for sr in &reports {
            let n_group = n / sr.groups;
            let pred = predicted_costs(Algorithm::Hss, r, eps_stage, k, 1, n_group);
            let ratio = sr.partition_cost.comm as f64 / pred.comm;
            ratio_lo = ratio_lo.min(ratio);
            ratio_hi = ratio_hi.max(ratio);
        }
    }
    report(
        "12 multistage",
        balanced >= 95 && alltoalls_ok && ratio_lo >= 0.2 && ratio_hi <= 5.0,
        &format!(
            "{balanced}/100 seeds <= 2.1% imbalance, comm/predicted in \
             [{ratio_lo:.2}, {ratio_hi:.2}], exchange all-to-alls == 2: {alltoalls_ok}"
        ),
    );
}

// 13. Exact splitting: eps = p/N in guarantee mode lands every splitter
// exactly on its ideal rank, in a median of at most
// 4 (ln(N/p) + ln ln p) rounds.
#[test]
fn criterion_13_exact_splitting() {
    let p = 64;
    let n = 1 << 16;
    let eps = p as f64 / n as f64;
    let ideal = ideal_splitter_ranks(n, p);
    let mut all_exact = true;
    let mut rounds = Vec::new();
    for seed in 0..20u64 {
        let input = sorted_input(DistributionKind::Unif, n, p, 81_000 + seed);
        let mut m = Machine::new(p);
        let mut cfg = HssConfig::new(eps, seed);
        cfg.mode = PartitionMode::Guarantee;
        let (cuts, stats) = hss_partition(&mut m, &input, &cfg).unwrap();
        all_exact &= cuts.ranks.as_deref() == Some(&ideal[..]);
        rounds.push(stats.rounds_run + stats.extra_rounds);
    }
    rounds.sort_unstable();
    let median = rounds[rounds.len() / 2] as f64;
    let bound = 4.0 * ((n as f64 / p as f64).ln() + (p as f64).ln().ln());
    report(
        "13 exact-splitting",
        all_exact && median <= bound,
        &format!("all ranks ideal: {all_exact}, median rounds {median} <= {bound:.1}"),
    );
}
