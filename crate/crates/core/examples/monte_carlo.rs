//! Seeded experiment: summary on stdout, per-trial CSV in the temp dir.

use noisy_bisect::harness::{run_experiment, ExperimentConfig};
use noisy_bisect::NoiseModel;

fn main() -> noisy_bisect::Result<()> {
    let mut config = ExperimentConfig::new(1 << 16, NoiseModel::binary(0.75)?, 0.05, 1000, 2024);
    let path = std::env::temp_dir().join("noisy_bisect_monte_carlo.csv");
    config.output_path = Some(path.clone());

    let exp = run_experiment(&config)?;
    for line in exp.summary.to_key_values() {
        println!("{line}");
    }
    println!("wrote {} rows to {}", exp.records.len(), path.display());
    Ok(())
}
