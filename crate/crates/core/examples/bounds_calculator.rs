use noisy_bisect::bounds::{
    classical_lower_bound, generalized_markov, info_binary, p_for_info, quantum_lower_bound, quantum_rate_report,
    runtime_tail, BoundsReport,
};
use noisy_bisect::NoiseModel;

fn main() -> noisy_bisect::Result<()> {
    for p in [0.6, 0.75, 0.9, 0.99] {
        println!(
            "p={p:<5} I={:.4}  queries needed for n=2^20: >= {:.1}",
            info_binary(p),
            classical_lower_bound(1 << 20, p, 0.0)?
        );
    }
    let p = p_for_info(0.5)?;
    println!("I=0.5 at p={p:.6}; n=1024 needs {}", classical_lower_bound(1024, p, 0.0)?);

    let (threshold, prob) = runtime_tail(1 << 16, 0.75, 0.05, 4.0, 1.0)?;
    println!("Pr[T > {threshold:.1}] <= {prob}");
    println!("generalized Markov: {:.3}", generalized_markov(100.0, 80.0, 0.1, 200.0)?);

    println!("quantum lower bound, K=52: {:.4}", quantum_lower_bound(52, 0.0)?);
    println!("quantum rate, K=2^23 t=6 I=18.5625: {:.6} log2 n", quantum_rate_report(1 << 23, 6.0, 18.5625)?);

    let report = BoundsReport::compute(1 << 16, &NoiseModel::binary(0.75)?, 0.0, 0.05, 1.0, &[2.0, 4.0])?;
    for line in report.to_key_values() {
        println!("{line}");
    }
    Ok(())
}
