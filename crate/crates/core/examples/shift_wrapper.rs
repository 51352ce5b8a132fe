//! Searching through a random rotation of the doubled domain. The hidden
//! index looks uniformly placed to the searcher, whatever it really is.

use noisy_bisect::{search_circular, shift_wrapped, simulated_binary, CircularOracle, Mirrored, NoiseModel, SearchParams};

fn main() -> noisy_bisect::Result<()> {
    let n = 1000;
    let p = 0.8;
    let params = SearchParams::new(n, 0.05, NoiseModel::binary(p)?)?;
    for (seed, target) in [(1u64, 1usize), (2, 500), (3, 1000)] {
        let inner = Mirrored::new(simulated_binary(n, target, p, seed)?);
        let mut oracle = shift_wrapped(inner, seed * 31);
        let shift = oracle.shift();
        let out = search_circular(&params, &mut oracle)?;
        println!(
            "target {target:>4}, shift {shift:>4}: found {:>4} with {} queries",
            out.estimated_index,
            oracle.queries_used()
        );
    }
    Ok(())
}
