//! Watch the segmented posterior react to a few noisy answers.

use noisy_bisect::{NoiseModel, Posterior};

fn show(label: &str, pos: &Posterior) {
    let (cell, w) = pos.max_cell();
    println!("{label:<28} segments={:<2} heaviest={cell} ({w:.3}) entropy={:.3}", pos.segments().len(), pos.entropy());
}

fn main() -> noisy_bisect::Result<()> {
    let mut pos = Posterior::new_uniform(16)?;
    show("uniform", &pos);

    // "target is at 8 or below", reported with 80% reliability
    pos.update_binary(8, 0, 0.8)?;
    show("after answer 0 at 8", &pos);

    let i = pos.find_split(0.25)?;
    println!("next split {i}, left mass {:.3}", pos.prefix_sum(i)?);
    pos.update_binary(i, 1, 0.8)?;
    show("after answer 1", &pos);

    // a 4-way batch answer
    let noise = NoiseModel::kary(vec![0.85, 0.05, 0.05, 0.05])?;
    let splits = pos.find_k_splits(3, 0.25)?;
    pos.update_kary(&splits, 1, &noise.probs())?;
    show(&format!("batch {splits:?} says part 1"), &pos);

    let window = pos.restrict(5, 12)?;
    println!("mass conditioned on 5..=12: {:?}", window.to_dense()[4..12].iter().map(|w| format!("{w:.3}")).collect::<Vec<_>>());
    Ok(())
}
