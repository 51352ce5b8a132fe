use noisy_bisect::bounds::{classical_lower_bound, expected_gain, info_binary, info_kary};
use noisy_bisect::harness::{run_experiment, run_trial, ExperimentConfig};
use noisy_bisect::{
    search_binary, search_circular, search_kary, simulated_binary, simulated_kary, HaltReason, Mirrored, NoiseModel,
    Posterior, SearchParams, ShiftWrapped,
};
use proptest::prelude::*;

fn dense_kary_update(w: &mut [f64], splits: &[usize], answer: usize, probs: &[f64]) {
    let parts = probs.len();
    for (idx, x) in w.iter_mut().enumerate() {
        let part = splits.iter().filter(|&&s| s < idx + 1).count();
        *x *= probs[(answer + parts - part) % parts];
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
}

fn distribution(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1u32..100, len).prop_map(|raw| {
        let total: u32 = raw.iter().sum();
        let mut probs: Vec<f64> = raw.iter().map(|&r| r as f64 / total as f64).collect();
        let rest: f64 = probs[1..].iter().sum();
        probs[0] = 1.0 - rest;
        probs
    })
}

// (n, splits, answer) sequences for k-ary updates
fn kary_transcript() -> impl Strategy<Value = (usize, Vec<f64>, Vec<(Vec<usize>, usize)>)> {
    (2usize..5, 8usize..64).prop_flat_map(|(parts, n)| {
        let step = (prop::collection::btree_set(1..n, parts - 1), 0..parts)
            .prop_map(|(set, a)| (set.into_iter().collect::<Vec<_>>(), a));
        (Just(n), distribution(parts), prop::collection::vec(step, 0..30))
    })
}

proptest! {
    #[test]
    fn kary_updates_match_dense_reference((n, probs, steps) in kary_transcript()) {
        let mut pos = Posterior::new_uniform(n).unwrap();
        let mut dense = vec![1.0 / n as f64; n];
        for (t, (splits, answer)) in steps.iter().enumerate() {
            pos.update_kary(splits, *answer, &probs).unwrap();
            dense_kary_update(&mut dense, splits, *answer, &probs);
            let sum: f64 = pos.to_dense().iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
            prop_assert!(pos.segments().len() <= (t + 1) * (probs.len() - 1) + 1);
        }
        for (a, b) in pos.to_dense().iter().zip(&dense) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn binary_segments_grow_by_at_most_one(n in 2usize..200, steps in prop::collection::vec((0.0f64..1.0, 0u8..2, 0.51f64..0.99), 0..50)) {
        let mut pos = Posterior::new_uniform(n).unwrap();
        for (t, (frac, answer, p)) in steps.iter().enumerate() {
            let split = 1 + ((n - 1) as f64 * frac) as usize % (n - 1);
            pos.update_binary(split, *answer, *p).unwrap();
            prop_assert!(pos.segments().len() <= t + 2);
        }
    }

    #[test]
    fn mirrored_update_mirrors_posterior(n in 2usize..64, steps in prop::collection::vec((1usize..64, 0u8..2, 0.51f64..1.0), 1..20)) {
        let mut a = Posterior::new_uniform(n).unwrap();
        let mut b = Posterior::new_uniform(n).unwrap();
        for (raw, answer, p) in steps {
            let split = 1 + raw % (n - 1);
            a.update_binary(split, answer, p).unwrap();
            b.update_binary(n - split, 1 - answer, p).unwrap();
        }
        let da = a.to_dense();
        let db = b.to_dense();
        for i in 0..n {
            prop_assert!((da[i] - db[n - 1 - i]).abs() < 1e-12);
        }
    }

    #[test]
    fn split_respects_partition_slack(weights in prop::collection::vec(1u32..20, 30..120)) {
        let pos = Posterior::from_weights(&weights.iter().map(|&w| w as f64).collect::<Vec<_>>()).unwrap();
        let (_, top) = pos.max_cell();
        let eps = top * 1.0001;
        if eps < 0.5 {
            let i = pos.find_split(eps).unwrap();
            let q = pos.prefix_sum(i).unwrap();
            prop_assert!(q < 0.5 && q >= 0.5 - eps);
        }
    }

    #[test]
    fn gain_peaks_at_even_split(q in 0.0f64..=1.0, p in 0.5f64..=1.0) {
        let g = expected_gain(q, p);
        prop_assert!(g <= info_binary(p) + 1e-12);
        prop_assert!((g - expected_gain(1.0 - q, p)).abs() < 1e-12);
        prop_assert!(g >= -1e-12);
    }

    #[test]
    fn information_is_monotone(p in 0.5f64..0.999, d in 0.0001f64..0.001) {
        prop_assert!(info_binary(p + d) > info_binary(p));
        prop_assert!((info_kary(&[p, 1.0 - p]) - info_binary(p)).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_monotone(n in 2u64..1_000_000, p in 0.55f64..0.99, tau in 0.0f64..0.9) {
        let base = classical_lower_bound(n, p, tau).unwrap();
        prop_assert!(classical_lower_bound(n * 2, p, tau).unwrap() > base);
        prop_assert!(classical_lower_bound(n, p + 0.005, tau).unwrap() < base);
        prop_assert!(classical_lower_bound(n, p, (tau + 0.05).min(0.95)).unwrap() <= base);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn search_halts_within_cap(n in 1usize..3000, p in 0.55f64..1.0, seed: u64, frac in 0.0f64..1.0) {
        let j = 1 + ((n as f64 * frac) as usize).min(n - 1);
        let params = SearchParams::new(n, 0.1, NoiseModel::binary(p).unwrap()).unwrap();
        let mut oracle = simulated_binary(n, j, p, seed).unwrap();
        let out = search_binary(&params, &mut oracle).unwrap();
        prop_assert!(out.queries_used <= params.max_queries);
        prop_assert_eq!(out.queries_used, out.transcript.len() as u64);
        prop_assert!((1..=n).contains(&out.estimated_index));
    }

    #[test]
    fn noiseless_search_is_exact(n in 1usize..=64, k in 1usize..4) {
        prop_assume!(k + 1 <= n);
        let mut probs = vec![0.0; k + 1];
        probs[0] = 1.0;
        let params = SearchParams::new(n, 0.05, NoiseModel::kary(probs.clone()).unwrap()).unwrap();
        for j in 1..=n {
            let out = search_kary(&params, &mut simulated_kary(n, j, &probs, 0).unwrap()).unwrap();
            prop_assert_eq!(out.estimated_index, j);
            prop_assert_eq!(out.halt_reason, HaltReason::Converged);
        }
    }

    #[test]
    fn two_part_batch_search_equals_binary(n in 2usize..2000, p in 0.55f64..1.0, seed: u64, frac in 0.0f64..1.0) {
        let j = 1 + ((n as f64 * frac) as usize).min(n - 1);
        let bp = SearchParams::new(n, 0.05, NoiseModel::binary(p).unwrap()).unwrap();
        let kp = SearchParams::new(n, 0.05, NoiseModel::kary(vec![p, 1.0 - p]).unwrap()).unwrap();
        let b = search_binary(&bp, &mut simulated_binary(n, j, p, seed).unwrap()).unwrap();
        let k = search_kary(&kp, &mut simulated_kary(n, j, &[p, 1.0 - p], seed).unwrap()).unwrap();
        prop_assert_eq!(b, k);
    }

    #[test]
    fn noisy_shifted_search_mostly_succeeds(n in 2usize..200, shift_seed: u64, seed: u64, frac in 0.0f64..1.0) {
        let j = 1 + ((n as f64 * frac) as usize).min(n - 1);
        let params = SearchParams::new(n, 0.01, NoiseModel::binary(0.9).unwrap()).unwrap();
        let inner = Mirrored::new(simulated_binary(n, j, 0.9, seed).unwrap());
        let mut oracle = noisy_bisect::shift_wrapped(inner, shift_seed);
        let out = search_circular(&params, &mut oracle).unwrap();
        prop_assert!(out.queries_used <= params.max_queries);
        prop_assert!((1..=n).contains(&out.estimated_index));
    }

    #[test]
    fn shift_forward_is_a_rotation(n in 1usize..50, shift_frac in 0.0f64..1.0) {
        let shift = ((2 * n) as f64 * shift_frac) as usize % (2 * n);
        let w = ShiftWrapped::with_shift(Mirrored::new(simulated_binary(n, 1, 1.0, 0).unwrap()), shift).unwrap();
        let mut seen: Vec<usize> = (1..=2 * n).map(|x| w.forward(x)).collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (1..=2 * n).collect::<Vec<_>>());
    }
}

#[test]
fn parallel_run_matches_serial_trials() {
    let config = ExperimentConfig::new(500, NoiseModel::binary(0.8).unwrap(), 0.1, 40, 77);
    let exp = run_experiment(&config).unwrap();
    let params = config.search_params().unwrap();
    for (t, rec) in exp.records.iter().enumerate() {
        let serial = run_trial(&config, &params, t).unwrap();
        assert_eq!(serial.trial_index, rec.trial_index);
        assert_eq!(serial.derived_seed, rec.derived_seed);
        assert_eq!(serial.true_index, rec.true_index);
        assert_eq!(serial.estimated_index, rec.estimated_index);
        assert_eq!(serial.queries_used, rec.queries_used);
    }
}

#[test]
fn shifted_noisy_search_success_rate() {
    let n = 128;
    let params = SearchParams::new(n, 0.05, NoiseModel::binary(0.8).unwrap()).unwrap();
    let mut hits = 0;
    for t in 0..300u64 {
        let j = (t as usize * 37) % n + 1;
        let inner = Mirrored::new(simulated_binary(n, j, 0.8, t).unwrap());
        let mut oracle = noisy_bisect::shift_wrapped(inner, t + 1000);
        if search_circular(&params, &mut oracle).unwrap().estimated_index == j {
            hits += 1;
        }
    }
    assert!(hits >= 280, "{hits}/300");
}
