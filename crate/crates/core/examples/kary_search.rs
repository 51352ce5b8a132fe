//! Batch search: every oracle call names one of k+1 parts.

use noisy_bisect::{search_kary, simulated_kary, NoiseModel, SearchParams};

fn main() -> noisy_bisect::Result<()> {
    let n = 4096;
    let probs = vec![0.85, 0.05, 0.05, 0.05];
    let noise = NoiseModel::kary(probs.clone())?;
    let params = SearchParams::new(n, 0.05, noise.clone())?;
    println!("I = {:.4} bits per batch, log2(n)/I = {:.2}", noise.info_bits(), 12.0 / noise.info_bits());

    let mut total = 0;
    for (t, target) in [1, 700, 2048, 3999, 4096].into_iter().enumerate() {
        let mut oracle = simulated_kary(n, target, &probs, t as u64)?;
        let out = search_kary(&params, &mut oracle)?;
        total += out.queries_used;
        println!("target {target:>4} -> {:>4} in {:>2} batches", out.estimated_index, out.queries_used);
    }
    println!("mean {:.1} batches", total as f64 / 5.0);
    Ok(())
}
