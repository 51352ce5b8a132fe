use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use noisy_bisect::harness::{self, Algo, Assertions, BoundsArgs, RunSettings, SEED_ENV};
use noisy_bisect::{bounds, Error, NoiseModel, Result};

#[derive(Parser)]
#[command(name = "noisy-bisect", version, about = "Bayesian noisy binary search simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo experiment; prints a summary, optionally writes CSV.
    Run(RunCmd),
    /// Information-theoretic bounds as key=value lines.
    Bounds(BoundsCmd),
    /// Insert a coin of unknown bias into a sorted list of reference coins.
    DemoCoins(CoinsCmd),
}

#[derive(Args)]
struct RunCmd {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    /// Comma separated p_0..p_k.
    #[arg(long)]
    probs: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    /// binary or kary
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    eps_par: Option<f64>,
    #[arg(long)]
    l_sur: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    max_queries: Option<u64>,
    #[arg(long)]
    assert_success_ge: Option<f64>,
    #[arg(long)]
    assert_mean_queries_le: Option<f64>,
    #[arg(long)]
    assert_mean_queries_ge: Option<f64>,
}

#[derive(Args)]
struct BoundsCmd {
    #[arg(long)]
    n: u64,
    #[arg(long, conflicts_with_all = ["probs", "info"])]
    p: Option<f64>,
    #[arg(long, conflicts_with = "info")]
    probs: Option<String>,
    /// Bits per comparison; the matching p is used.
    #[arg(long)]
    info: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 0.0)]
    c1: f64,
    #[arg(long = "chi", default_values_t = [2.0, 4.0])]
    chis: Vec<f64>,
    /// Quantum list length K (needs --t and --quantum-info).
    #[arg(long, requires_all = ["t", "quantum_info"])]
    list_len: Option<u64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    quantum_info: Option<f64>,
}

#[derive(Args)]
struct CoinsCmd {
    /// Sorted reference biases, comma separated.
    #[arg(long, default_value = "0.1,0.3,0.5,0.7,0.9")]
    refs: String,
    #[arg(long, default_value_t = 0.6)]
    unknown: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    /// Comparison accuracy assumed by the searcher.
    #[arg(long)]
    p: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(cmd) => run(cmd),
        Command::Bounds(cmd) => print_bounds(cmd).map(|_| 0),
        Command::DemoCoins(cmd) => demo_coins(cmd).map(|_| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cmd: RunCmd) -> Result<u8> {
    let file = match &cmd.config {
        Some(path) => RunSettings::from_config_text(&std::fs::read_to_string(path)?)?,
        None => RunSettings::default(),
    };
    let flags = RunSettings {
        n: cmd.n,
        p: cmd.p,
        probs: cmd.probs.as_deref().map(harness::parse_probs).transpose()?,
        k: cmd.k,
        algo: cmd.algo.as_deref().map(Algo::parse).transpose()?,
        delta: cmd.delta,
        trials: cmd.trials,
        seed: cmd.seed,
        out: cmd.out,
        eps_par: cmd.eps_par,
        l_sur: cmd.l_sur,
        gamma: cmd.gamma,
        max_queries: cmd.max_queries,
    };
    let env_seed = match std::env::var(SEED_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("{SEED_ENV} is not a u64: {v:?}")))?,
        ),
        Err(_) => None,
    };
    let config = file.overlay(flags).into_config(env_seed)?;
    let experiment = harness::run_experiment(&config)?;
    for line in experiment.summary.to_key_values() {
        println!("{line}");
    }
    let asserts = Assertions {
        success_ge: cmd.assert_success_ge,
        mean_queries_le: cmd.assert_mean_queries_le,
        mean_queries_ge: cmd.assert_mean_queries_ge,
    };
    let violations = asserts.violations(&experiment.summary);
    for v in &violations {
        eprintln!("assertion failed: {v}");
    }
    Ok(if violations.is_empty() { 0 } else { 3 })
}

fn print_bounds(cmd: BoundsCmd) -> Result<()> {
    let noise = match (cmd.p, cmd.probs, cmd.info) {
        (_, Some(probs), _) => NoiseModel::kary(harness::parse_probs(&probs)?)?,
        (_, _, Some(info)) => NoiseModel::binary(bounds::p_for_info(info)?)?,
        (Some(p), _, _) => {
            if p <= 0.5 {
                // uninformative comparisons: no finite number of queries suffices
                println!("n={}\nnoise=p={p}\ninfo_bits=0\nlower_bound=inf", cmd.n);
                return Ok(());
            }
            NoiseModel::binary(p)?
        }
        _ => return Err(Error::InvalidArgument("bounds needs --p, --probs or --info".into())),
    };
    let args = BoundsArgs {
        n: cmd.n,
        noise,
        tau: cmd.tau,
        delta: cmd.delta,
        c1: cmd.c1,
        chis: cmd.chis,
        quantum: cmd.list_len.map(|k| (k, cmd.t.unwrap_or(0.0), cmd.quantum_info.unwrap_or(0.0))),
    };
    for line in harness::run_bounds(&args)? {
        println!("{line}");
    }
    Ok(())
}

fn demo_coins(cmd: CoinsCmd) -> Result<()> {
    let refs = harness::parse_probs(&cmd.refs)?;
    let demo = harness::run_demo_coins(&refs, cmd.unknown, cmd.delta, cmd.seed, cmd.p)?;
    for line in demo.to_key_values() {
        println!("{line}");
    }
    Ok(())
}
