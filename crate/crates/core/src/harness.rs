//! Seeded Monte Carlo experiments, CSV output and the text front ends used
//! by the command line tool.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{self, BoundsReport};
use crate::error::{invalid, Error, Result};
use crate::noise::{format_sig6, NoiseModel};
use crate::oracles::{simulated_binary, simulated_kary, CoinListOracle};
use crate::search::{search_binary, search_kary, HaltReason, Overrides, SearchParams};

pub const CSV_HEADER: &str =
    "trial,seed,n,algo,k,noise,delta,true_index,estimated_index,success,queries,halt_reason";

/// Environment variable consulted when no seed is given.
pub const SEED_ENV: &str = "NOISY_BISECT_SEED";

/// Instances with at most this many cells cycle through every index when
/// there are at least as many trials as cells.
const EXHAUSTIVE_LIMIT: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Binary,
    Kary,
}

impl Algo {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algo::Binary => "binary",
            Algo::Kary => "kary",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(Algo::Binary),
            "kary" => Ok(Algo::Kary),
            other => invalid(format!("unknown algo {other:?} (expected binary or kary)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub noise: NoiseModel,
    pub delta: f64,
    pub algo: Algo,
    pub trials: usize,
    pub master_seed: u64,
    pub output_path: Option<PathBuf>,
    pub overrides: Overrides,
}

impl ExperimentConfig {
    pub fn new(n: usize, noise: NoiseModel, delta: f64, trials: usize, master_seed: u64) -> Self {
        let algo = match noise {
            NoiseModel::Binary { .. } => Algo::Binary,
            NoiseModel::Kary { .. } => Algo::Kary,
        };
        ExperimentConfig {
            n,
            noise,
            delta,
            algo,
            trials,
            master_seed,
            output_path: None,
            overrides: Overrides::default(),
        }
    }

    pub fn k(&self) -> usize {
        self.noise.k()
    }

    pub fn search_params(&self) -> Result<SearchParams> {
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.algo == Algo::Binary && !matches!(self.noise, NoiseModel::Binary { .. }) {
            return invalid("algo=binary needs --p, not --probs");
        }
        SearchParams::with_overrides(self.n, self.delta, self.search_noise(), self.overrides)
    }

    // kary runs always carry an explicit distribution
    fn search_noise(&self) -> NoiseModel {
        match (&self.algo, &self.noise) {
            (Algo::Kary, NoiseModel::Binary { p }) => NoiseModel::Kary {
                probs: vec![*p, 1.0 - *p],
            },
            _ => self.noise.clone(),
        }
    }
}

/// Seed for trial `trial` of an experiment: the first word of ChaCha8
/// stream `trial` keyed by the master seed.
pub fn derive_seed(master_seed: u64, trial: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng.next_u64()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub derived_seed: u64,
    pub true_index: usize,
    pub estimated_index: usize,
    pub success: bool,
    pub queries_used: u64,
    pub halt_reason: HaltReason,
    pub wall_time: Duration,
}

/// Runs a single trial. The true index is cycled when the experiment is
/// exhaustive, otherwise drawn from the trial's own seed.
pub fn run_trial(config: &ExperimentConfig, params: &SearchParams, trial_index: usize) -> Result<TrialRecord> {
    let started = Instant::now();
    let seed = derive_seed(config.master_seed, trial_index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let drawn = rng.gen_range(1..=config.n);
    let true_index = if exhaustive(config) {
        trial_index % config.n + 1
    } else {
        drawn
    };
    let oracle_seed = rng.next_u64();
    let outcome = match config.algo {
        Algo::Binary => {
            let mut oracle = simulated_binary(config.n, true_index, params.noise.correct_prob(), oracle_seed)?;
            search_binary(params, &mut oracle)?
        }
        Algo::Kary => {
            let mut oracle = simulated_kary(config.n, true_index, &params.noise.probs(), oracle_seed)?;
            search_kary(params, &mut oracle)?
        }
    };
    Ok(TrialRecord {
        trial_index,
        derived_seed: seed,
        true_index,
        estimated_index: outcome.estimated_index,
        success: outcome.estimated_index == true_index,
        queries_used: outcome.queries_used,
        halt_reason: outcome.halt_reason,
        wall_time: started.elapsed(),
    })
}

fn exhaustive(config: &ExperimentConfig) -> bool {
    config.trials >= config.n && config.n <= EXHAUSTIVE_LIMIT
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_queries: f64,
    pub median_queries: f64,
    pub p95_queries: u64,
    pub max_queries: u64,
    pub info_bits: f64,
    /// `log2(n) / I`.
    pub leading_term: f64,
    /// `C` in `mean = log2 n / I + C log2 log2 n log2(1/δ) / I`.
    pub overhead_constant: f64,
    /// `c1` in `mean = log2 n / I + c1 log2 log2 n / (I log2(1/δ))`.
    pub c1: f64,
    /// `(chi, threshold, fraction of trials above threshold)`.
    pub tail: Vec<(f64, f64, f64)>,
    pub halted_on_cap: usize,
    pub verify_exhausted: usize,
}

impl Summary {
    pub fn from_records(config: &ExperimentConfig, records: &[TrialRecord]) -> Result<Self> {
        if records.is_empty() {
            return invalid("no trials to summarize");
        }
        let trials = records.len();
        let successes = records.iter().filter(|r| r.success).count();
        let mut queries: Vec<u64> = records.iter().map(|r| r.queries_used).collect();
        queries.sort_unstable();
        let mean = queries.iter().sum::<u64>() as f64 / trials as f64;
        let median = if trials % 2 == 1 {
            queries[trials / 2] as f64
        } else {
            (queries[trials / 2 - 1] + queries[trials / 2]) as f64 / 2.0
        };
        // nearest-rank percentile
        let rank = ((0.95 * trials as f64).ceil() as usize).clamp(1, trials);
        let info = config.noise.info_bits();
        let log_n = (config.n as f64).log2();
        let loglog = log_n.log2();
        let log_inv_delta = (1.0 / config.delta).log2();
        let leading = log_n / info;
        let excess = (mean - leading) * info;
        let (overhead_constant, c1) = if loglog > 0.0 {
            (excess / (loglog * log_inv_delta), excess * log_inv_delta / loglog)
        } else {
            (f64::NAN, f64::NAN)
        };
        let mut tail = Vec::new();
        if let (NoiseModel::Binary { p }, true) = (&config.noise, config.n >= 2 && c1.is_finite()) {
            if *p < 1.0 {
                for chi in [2.0, 4.0] {
                    let (threshold, _) = bounds::runtime_tail(config.n as u64, *p, config.delta, chi, c1.max(0.0))?;
                    let above = queries.iter().filter(|&&q| q as f64 > threshold).count();
                    tail.push((chi, threshold, above as f64 / trials as f64));
                }
            }
        }
        Ok(Summary {
            trials,
            successes,
            success_rate: successes as f64 / trials as f64,
            mean_queries: mean,
            median_queries: median,
            p95_queries: queries[rank - 1],
            max_queries: queries[trials - 1],
            info_bits: info,
            leading_term: leading,
            overhead_constant,
            c1,
            tail,
            halted_on_cap: records.iter().filter(|r| r.halt_reason == HaltReason::QueryCap).count(),
            verify_exhausted: records
                .iter()
                .filter(|r| r.halt_reason == HaltReason::VerifyExhausted)
                .count(),
        })
    }

    pub fn to_key_values(&self) -> Vec<String> {
        let mut lines = vec![
            format!("trials={}", self.trials),
            format!("successes={}", self.successes),
            format!("success_rate={}", format_sig6(self.success_rate)),
            format!("mean_queries={}", format_sig6(self.mean_queries)),
            format!("median_queries={}", format_sig6(self.median_queries)),
            format!("p95_queries={}", self.p95_queries),
            format!("max_queries={}", self.max_queries),
            format!("info_bits={}", format_sig6(self.info_bits)),
            format!("leading_term={}", format_sig6(self.leading_term)),
            format!("overhead_constant={}", format_sig6(self.overhead_constant)),
            format!("c1={}", format_sig6(self.c1)),
        ];
        for (chi, threshold, fraction) in &self.tail {
            lines.push(format!(
                "tail_chi{}={} above={}",
                format_sig6(*chi),
                format_sig6(*threshold),
                format_sig6(*fraction)
            ));
        }
        lines.push(format!("halted_on_cap={}", self.halted_on_cap));
        lines.push(format!("verify_exhausted={}", self.verify_exhausted));
        lines
    }
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub params: SearchParams,
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

impl Experiment {
    pub fn csv(&self) -> String {
        to_csv(&self.config, &self.records)
    }
}

/// Runs every trial (in parallel), summarizes, and writes the CSV when the
/// config names an output path.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Experiment> {
    let params = config.search_params()?;
    let records = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, &params, t))
        .collect::<Result<Vec<_>>>()?;
    let summary = Summary::from_records(config, &records)?;
    let experiment = Experiment {
        config: config.clone(),
        params,
        records,
        summary,
    };
    if let Some(path) = &config.output_path {
        fs::write(path, experiment.csv())?;
    }
    Ok(experiment)
}

pub fn to_csv(config: &ExperimentConfig, records: &[TrialRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    let noise = config.noise.describe();
    let delta = format_sig6(config.delta);
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.trial_index,
            r.derived_seed,
            config.n,
            config.algo.as_str(),
            config.k(),
            noise,
            delta,
            r.true_index,
            r.estimated_index,
            u8::from(r.success),
            r.queries_used,
            r.halt_reason.as_str()
        );
    }
    out
}

/// Settings for `run` as strings-to-be-parsed, filled from a config file
/// and then from command line flags (flags win).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSettings {
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub probs: Option<Vec<f64>>,
    pub k: Option<usize>,
    pub algo: Option<Algo>,
    pub delta: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub eps_par: Option<f64>,
    pub l_sur: Option<usize>,
    pub gamma: Option<f64>,
    pub max_queries: Option<u64>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad value for {key}: {value:?}")))
}

pub fn parse_probs(text: &str) -> Result<Vec<f64>> {
    text.split([',', ';'])
        .map(|s| parse_value("probs", s))
        .collect()
}

impl RunSettings {
    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    /// Keys use the flag spelling (`eps-par`, `max-queries`; `_` also works).
    pub fn from_config_text(text: &str) -> Result<Self> {
        let mut s = RunSettings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return invalid(format!("config line {}: expected key=value", lineno + 1));
            };
            let key = key.trim().replace('_', "-");
            let value = value.trim();
            match key.as_str() {
                "n" => s.n = Some(parse_value(&key, value)?),
                "p" => s.p = Some(parse_value(&key, value)?),
                "probs" => s.probs = Some(parse_probs(value)?),
                "k" => s.k = Some(parse_value(&key, value)?),
                "algo" => s.algo = Some(Algo::parse(value)?),
                "delta" => s.delta = Some(parse_value(&key, value)?),
                "trials" => s.trials = Some(parse_value(&key, value)?),
                "seed" => s.seed = Some(parse_value(&key, value)?),
                "out" => s.out = Some(PathBuf::from(value)),
                "eps-par" => s.eps_par = Some(parse_value(&key, value)?),
                "l-sur" => s.l_sur = Some(parse_value(&key, value)?),
                "gamma" => s.gamma = Some(parse_value(&key, value)?),
                "max-queries" => s.max_queries = Some(parse_value(&key, value)?),
                other => return invalid(format!("config line {}: unknown key {other:?}", lineno + 1)),
            }
        }
        Ok(s)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: RunSettings) -> RunSettings {
        RunSettings {
            n: over.n.or(self.n),
            p: over.p.or(self.p),
            probs: over.probs.or(self.probs),
            k: over.k.or(self.k),
            algo: over.algo.or(self.algo),
            delta: over.delta.or(self.delta),
            trials: over.trials.or(self.trials),
            seed: over.seed.or(self.seed),
            out: over.out.or(self.out),
            eps_par: over.eps_par.or(self.eps_par),
            l_sur: over.l_sur.or(self.l_sur),
            gamma: over.gamma.or(self.gamma),
            max_queries: over.max_queries.or(self.max_queries),
        }
    }

    /// Builds the experiment config. `env_seed` is used when no seed was
    /// given; defaults are n=1024, p=0.75, delta=0.05, 100 trials, seed 0.
    ///
    /// `--k` with `--p` spreads the error mass evenly: `(p, (1-p)/k, ...)`.
    pub fn into_config(self, env_seed: Option<u64>) -> Result<ExperimentConfig> {
        let noise = match (&self.probs, self.p) {
            (Some(_), Some(_)) => return invalid("give either --p or --probs, not both"),
            (Some(probs), None) => {
                if let Some(k) = self.k {
                    if k + 1 != probs.len() {
                        return invalid(format!("--k {k} needs {} probabilities, got {}", k + 1, probs.len()));
                    }
                }
                NoiseModel::kary(probs.clone())?
            }
            (None, p) => {
                let p = p.unwrap_or(0.75);
                match self.k.unwrap_or(1) {
                    0 => return invalid("--k must be at least 1"),
                    1 => NoiseModel::binary(p)?,
                    k => {
                        let rest = (1.0 - p) / k as f64;
                        let mut probs = vec![p];
                        probs.extend(std::iter::repeat(rest).take(k));
                        NoiseModel::kary(probs)?
                    }
                }
            }
        };
        let mut config = ExperimentConfig::new(
            self.n.unwrap_or(1024),
            noise,
            self.delta.unwrap_or(0.05),
            self.trials.unwrap_or(100),
            self.seed.or(env_seed).unwrap_or(0),
        );
        if let Some(algo) = self.algo {
            config.algo = algo;
        }
        config.output_path = self.out;
        config.overrides = Overrides {
            eps_par: self.eps_par,
            l_sur: self.l_sur,
            gamma: self.gamma,
            max_queries: self.max_queries,
        };
        config.search_params()?;
        Ok(config)
    }
}

/// Thresholds checked after a run; a violation maps to exit code 3.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Assertions {
    pub success_ge: Option<f64>,
    pub mean_queries_le: Option<f64>,
    pub mean_queries_ge: Option<f64>,
}

impl Assertions {
    /// Descriptions of every violated threshold.
    pub fn violations(&self, summary: &Summary) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(min) = self.success_ge {
            if summary.success_rate < min {
                out.push(format!("success_rate {} < {}", format_sig6(summary.success_rate), min));
            }
        }
        if let Some(max) = self.mean_queries_le {
            if summary.mean_queries > max {
                out.push(format!("mean_queries {} > {}", format_sig6(summary.mean_queries), max));
            }
        }
        if let Some(min) = self.mean_queries_ge {
            if summary.mean_queries < min {
                out.push(format!("mean_queries {} < {}", format_sig6(summary.mean_queries), min));
            }
        }
        out
    }
}

/// Arguments of the `bounds` command.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsArgs {
    pub n: u64,
    pub noise: NoiseModel,
    pub tau: f64,
    pub delta: f64,
    pub c1: f64,
    pub chis: Vec<f64>,
    /// Optional quantum rate inputs `(K, t, I)`.
    pub quantum: Option<(u64, f64, f64)>,
}

pub fn run_bounds(args: &BoundsArgs) -> Result<Vec<String>> {
    let report = BoundsReport::compute(args.n, &args.noise, args.tau, args.delta, args.c1, &args.chis)?;
    let mut lines = report.to_key_values();
    if let NoiseModel::Binary { p } = args.noise {
        let lb = bounds::classical_lower_bound(args.n, p, args.tau)?;
        lines.push(format!("classical_lower_bound={}", format_sig6(lb)));
    }
    if let NoiseModel::Kary { probs } = &args.noise {
        lines.push(format!("info_kary={}", format_sig6(bounds::info_kary(probs))));
    }
    if let Some((list_len, t, info)) = args.quantum {
        let rate = bounds::quantum_rate_report(list_len, t, info)?;
        lines.push(format!("quantum_rate={}", format_sig6(rate)));
        lines.push(format!(
            "quantum_lower_bound={}",
            format_sig6(bounds::quantum_lower_bound(list_len, args.delta)?)
        ));
    }
    Ok(lines)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoinDemo {
    pub references: Vec<f64>,
    pub unknown: f64,
    pub p_used: f64,
    /// Number of references with a smaller bias, as estimated.
    pub rank: usize,
    pub true_rank: usize,
    pub comparisons: u64,
    pub flips: u64,
    pub halt_reason: HaltReason,
}

impl CoinDemo {
    pub fn to_key_values(&self) -> Vec<String> {
        let refs: Vec<String> = self.references.iter().map(|x| format_sig6(*x)).collect();
        let below = match self.rank {
            0 => "-inf".to_string(),
            r => format_sig6(self.references[r - 1]),
        };
        let above = self
            .references
            .get(self.rank)
            .map(|x| format_sig6(*x))
            .unwrap_or_else(|| "+inf".to_string());
        vec![
            format!("references={}", refs.join(",")),
            format!("unknown={}", format_sig6(self.unknown)),
            format!("p={}", format_sig6(self.p_used)),
            format!("rank={}", self.rank),
            format!("between={below},{above}"),
            format!("true_rank={}", self.true_rank),
            format!("comparisons={}", self.comparisons),
            format!("flips={}", self.flips),
            format!("halt_reason={}", self.halt_reason.as_str()),
        ]
    }
}

/// Inserts a coin of unknown bias into a sorted list of reference coins.
/// `p` defaults to the smallest effective comparison accuracy.
pub fn run_demo_coins(references: &[f64], unknown: f64, delta: f64, seed: u64, p: Option<f64>) -> Result<CoinDemo> {
    let mut oracle = CoinListOracle::new(references.to_vec(), unknown, seed)?;
    let p_used = p.unwrap_or_else(|| oracle.conservative_p());
    let params = SearchParams::new(references.len() + 1, delta, NoiseModel::binary(p_used)?)?;
    let outcome = search_binary(&params, &mut oracle)?;
    Ok(CoinDemo {
        references: references.to_vec(),
        unknown,
        p_used,
        rank: outcome.estimated_index - 1,
        true_rank: oracle.true_rank(),
        comparisons: outcome.queries_used,
        flips: oracle.flips_used(),
        halt_reason: outcome.halt_reason,
    })
}
