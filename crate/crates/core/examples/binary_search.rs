//! One noisy binary search, with the query transcript broken down by phase.
//!
//! cargo run --example binary_search -- [n] [p] [target] [seed]

use noisy_bisect::bounds::info_binary;
use noisy_bisect::{search_binary, simulated_binary, NoiseModel, Phase, SearchParams};

fn main() -> noisy_bisect::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let n: usize = arg(0, "65536").parse().expect("n");
    let p: f64 = arg(1, "0.75").parse().expect("p");
    let target: usize = arg(2, "40000").parse().expect("target");
    let seed: u64 = arg(3, "7").parse().expect("seed");

    let params = SearchParams::new(n, 0.05, NoiseModel::binary(p)?)?;
    println!(
        "eps_par={:.4} l_sur={} verify_rounds={} max_queries={}",
        params.eps_par, params.l_sur, params.verify_rounds, params.max_queries
    );
    let mut oracle = simulated_binary(n, target, p, seed)?;
    let out = search_binary(&params, &mut oracle)?;

    let count = |ph: Phase| out.transcript.iter().filter(|r| r.phase == ph).count();
    println!(
        "estimate {} (true {target}), {} queries: main {}, localize {}, verify {}; retries {}",
        out.estimated_index,
        out.queries_used,
        count(Phase::Main),
        count(Phase::Localize),
        count(Phase::Verify),
        out.rounds_of_retry
    );
    println!("log2(n)/I(p) = {:.1}", (n as f64).log2() / info_binary(p));
    Ok(())
}
