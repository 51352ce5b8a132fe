//! Insert a coin of unknown bias into a sorted row of reference coins,
//! comparing two coins by flipping both until they disagree.

use noisy_bisect::coin_effective_p;
use noisy_bisect::harness::run_demo_coins;

fn main() -> noisy_bisect::Result<()> {
    let refs = [0.1, 0.3, 0.5, 0.7, 0.9];
    let unknown = 0.6;
    for r in refs {
        println!("vs {r}: comparison correct with p = {:.3}", coin_effective_p(r, unknown)?);
    }
    let mut correct = 0;
    for seed in 0..20 {
        let demo = run_demo_coins(&refs, unknown, 0.05, seed, None)?;
        if demo.rank == demo.true_rank {
            correct += 1;
        }
        if seed == 0 {
            for line in demo.to_key_values() {
                println!("  {line}");
            }
        }
    }
    println!("correct rank in {correct}/20 sessions");
    Ok(())
}
