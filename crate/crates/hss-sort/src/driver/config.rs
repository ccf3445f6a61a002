//! Experiment configuration, validation, and sweep expansion.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::hss::{PartitionMode, RoundsSpec};
use crate::keyspace::DistributionKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Hss,
    Hss1,
    SamplesortRegular,
    SamplesortRandom,
    Ams,
    Hyksort,
    Histsort,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Hss,
        Algorithm::Hss1,
        Algorithm::SamplesortRegular,
        Algorithm::SamplesortRandom,
        Algorithm::Ams,
        Algorithm::Hyksort,
        Algorithm::Histsort,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Algorithm::Hss => "hss",
            Algorithm::Hss1 => "hss1",
            Algorithm::SamplesortRegular => "samplesort-regular",
            Algorithm::SamplesortRandom => "samplesort-random",
            Algorithm::Ams => "ams",
            Algorithm::Hyksort => "hyksort",
            Algorithm::Histsort => "histsort",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.token() == s)
            .ok_or_else(|| format!("unknown algorithm '{s}'"))
    }
}

/// Algorithm selection: a single partitioner or all of them on paired
/// inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgoSel {
    One(Algorithm),
    All,
}

impl AlgoSel {
    pub fn expand(self) -> Vec<Algorithm> {
        match self {
            AlgoSel::One(a) => vec![a],
            AlgoSel::All => Algorithm::ALL.to_vec(),
        }
    }
}

impl fmt::Display for AlgoSel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgoSel::One(a) => a.fmt(f),
            AlgoSel::All => f.write_str("all"),
        }
    }
}

impl FromStr for AlgoSel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            Ok(AlgoSel::All)
        } else {
            Ok(AlgoSel::One(s.parse()?))
        }
    }
}

/// `--rounds {int|auto}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundsArg {
    Auto,
    Fixed(usize),
}

impl RoundsArg {
    pub fn spec(self) -> RoundsSpec {
        match self {
            RoundsArg::Auto => RoundsSpec::Auto,
            RoundsArg::Fixed(k) => RoundsSpec::Fixed(k),
        }
    }
}

impl fmt::Display for RoundsArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoundsArg::Auto => f.write_str("auto"),
            RoundsArg::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for RoundsArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(RoundsArg::Auto);
        }
        s.parse::<usize>()
            .map_err(|_| format!("--rounds takes an integer or 'auto', got '{s}'"))
            .and_then(|k| {
                if k >= 1 {
                    Ok(RoundsArg::Fixed(k))
                } else {
                    Err("--rounds must be at least 1".into())
                }
            })
    }
}

/// `--mode {fixed|guarantee}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeSel {
    #[default]
    Fixed,
    Guarantee,
}

impl ModeSel {
    pub fn mode(self) -> PartitionMode {
        match self {
            ModeSel::Fixed => PartitionMode::FixedRounds,
            ModeSel::Guarantee => PartitionMode::Guarantee,
        }
    }
}

impl fmt::Display for ModeSel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeSel::Fixed => "fixed",
            ModeSel::Guarantee => "guarantee",
        })
    }
}

impl FromStr for ModeSel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fixed" => Ok(ModeSel::Fixed),
            "guarantee" => Ok(ModeSel::Guarantee),
            other => Err(format!("unknown mode '{other}'")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("p must be at least 1")]
    ZeroProcessors,
    #[error("n-per-proc must be at least 1")]
    ZeroKeys,
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("trials must be at least 1")]
    ZeroTrials,
    #[error("beta must be at least 1")]
    ZeroBeta,
    #[error("stages must be at least 1")]
    ZeroStages,
    #[error("p = {p} has no integral {l}-th root; multi-stage needs r = p^(1/l) integral")]
    NonIntegralRoot { p: usize, l: usize },
    #[error("sweep clause '{0}' is not key=v1,v2,...")]
    BadSweepClause(String),
    #[error("sweep key '{0}' is not one of algo,p,n_per_proc,epsilon,dist")]
    BadSweepKey(String),
    #[error("sweep value '{value}' invalid for {key}: {msg}")]
    BadSweepValue { key: String, value: String, msg: String },
    #[error("sweep range for '{0}' is empty")]
    EmptySweep(String),
}

/// One experiment specification; a sweep expands into many of these.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub algo: AlgoSel,
    pub p: usize,
    pub n_per_proc: usize,
    pub eps: f64,
    pub rounds: RoundsArg,
    pub beta: usize,
    pub stages: usize,
    pub dist: DistributionKind,
    pub seed: u64,
    pub trials: usize,
    pub samples_per_proc: Option<u64>,
    pub mode: ModeSel,
    pub check_oracle: bool,
    /// Interpret `--epsilon` as the per-stage tolerance instead of the
    /// overall one when `--stages > 1`.
    pub epsilon_per_stage: bool,
    pub out: Option<PathBuf>,
    pub sweep: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            algo: AlgoSel::One(Algorithm::Hss),
            p: 64,
            n_per_proc: 4096,
            eps: 0.05,
            rounds: RoundsArg::Auto,
            beta: 1,
            stages: 1,
            dist: DistributionKind::Unif,
            seed: 1,
            trials: 10,
            samples_per_proc: None,
            mode: ModeSel::Fixed,
            check_oracle: false,
            epsilon_per_stage: false,
            out: None,
            sweep: None,
        }
    }
}

impl ExperimentConfig {
    /// Per-stage tolerance: `--epsilon` directly when `--epsilon-per-stage`
    /// is given, else the `l`-th-root split of the overall tolerance.
    pub fn eps_stage(&self) -> f64 {
        if self.epsilon_per_stage || self.stages == 1 {
            self.eps
        } else {
            (1.0 + self.eps).powf(1.0 / self.stages as f64) - 1.0
        }
    }

    /// Overall tolerance implied by the configuration.
    pub fn eps_overall(&self) -> f64 {
        if self.epsilon_per_stage && self.stages > 1 {
            (1.0 + self.eps).powi(self.stages as i32) - 1.0
        } else {
            self.eps
        }
    }
}

/// `r` with `r^l == p`, if any.
pub(crate) fn integral_root(p: usize, l: usize) -> Option<usize> {
    if l == 1 {
        return Some(p);
    }
    let guess = (p as f64).powf(1.0 / l as f64).round() as usize;
    (guess.saturating_sub(1)..=guess + 1)
        .find(|&r| r >= 1 && r.checked_pow(l as u32) == Some(p))
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.p == 0 {
            return Err(ConfigError::ZeroProcessors);
        }
        if self.n_per_proc == 0 {
            return Err(ConfigError::ZeroKeys);
        }
        if self.eps <= 0.0 {
            return Err(ConfigError::BadEpsilon(self.eps));
        }
        if self.trials == 0 {
            return Err(ConfigError::ZeroTrials);
        }
        if self.beta == 0 {
            return Err(ConfigError::ZeroBeta);
        }
        if self.stages == 0 {
            return Err(ConfigError::ZeroStages);
        }
        if self.stages > 1 && integral_root(self.p, self.stages).is_none() {
            return Err(ConfigError::NonIntegralRoot { p: self.p, l: self.stages });
        }
        Ok(())
    }

    /// Expands the sweep clause (if any) into the cartesian product of
    /// configurations; every combination keeps the base seed so runs are
    /// paired. Each returned configuration is validated.
    pub fn expand(&self) -> Result<Vec<ExperimentConfig>, ConfigError> {
        let mut combos = vec![self.clone()];
        if let Some(spec) = &self.sweep {
            for clause in spec.split(';').filter(|c| !c.trim().is_empty()) {
                let (key, values) = clause
                    .split_once('=')
                    .ok_or_else(|| ConfigError::BadSweepClause(clause.to_string()))?;
                let key = key.trim();
                let values: Vec<&str> =
                    values.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
                if values.is_empty() {
                    return Err(ConfigError::EmptySweep(key.to_string()));
                }
                let mut next = Vec::with_capacity(combos.len() * values.len());
                for combo in &combos {
                    for value in &values {
                        let mut c = combo.clone();
                        c.apply_sweep_value(key, value)?;
                        next.push(c);
                    }
                }
                combos = next;
            }
        }
        for c in &combos {
            c.validate()?;
        }
        Ok(combos)
    }

    fn apply_sweep_value(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |msg: String| ConfigError::BadSweepValue {
            key: key.to_string(),
            value: value.to_string(),
            msg,
        };
        match key {
            "algo" => self.algo = value.parse().map_err(bad)?,
            "p" => self.p = value.parse().map_err(|e| bad(format!("{e}")))?,
            "n_per_proc" => self.n_per_proc = value.parse().map_err(|e| bad(format!("{e}")))?,
            "epsilon" => self.eps = value.parse().map_err(|e| bad(format!("{e}")))?,
            "dist" => self.dist = value.parse().map_err(bad)?,
            other => return Err(ConfigError::BadSweepKey(other.to_string())),
        }
        Ok(())
    }

    pub fn n_total(&self) -> usize {
        self.p * self.n_per_proc
    }
}
