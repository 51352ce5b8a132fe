//! Noisy answer sources.
//!
//! Truth convention: for a target in cell `j*`, the comparison at position
//! `i` is `f(i) = 1` iff `i >= j*`, i.e. "the target lies in cells `1..=i`".
//! The search maps `f(i) = 1` to posterior outcome 0 (left part), so an
//! oracle bit and the posterior answer are complements of each other.
//!
//! Randomness: every simulated oracle owns a ChaCha8 stream seeded from a
//! `u64` and consumes exactly one uniform `f64` per answered query, so the
//! answer to call `c` depends only on `(seed, c)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::noise::NoiseModel;

/// Maximum paired flips spent on one coin comparison.
pub const COIN_FLIP_CAP: u64 = 1_000_000;

/// A single noisy comparison per call.
pub trait ComparisonOracle {
    /// Number of cells `n`; valid query positions are `1..=n`.
    fn len(&self) -> usize;
    /// Noisy `f(i)`.
    fn compare(&mut self, i: usize) -> Result<bool>;
    fn queries_used(&self) -> u64;
}

/// One batch query per call: given `k` increasing splits, reports which of
/// the `k + 1` parts holds the target (noisily).
pub trait BatchOracle {
    fn len(&self) -> usize;
    fn k(&self) -> usize;
    fn locate(&mut self, splits: &[usize]) -> Result<usize>;
    fn queries_used(&self) -> u64;
}

/// Oracle over the doubled circular domain `1..=2n`, where positions
/// `n+1..=2n` mirror `1..=n` with negated answers. For a hidden position `J`
/// the answer at `x` is `1` iff `(x - J) mod 2n < n`.
pub trait CircularOracle {
    /// `n`, half the circle.
    fn half_len(&self) -> usize;
    fn evaluate(&mut self, x: usize) -> Result<bool>;
    fn queries_used(&self) -> u64;
    /// Maps a circle position found by a search to an index in `1..=n`.
    fn resolve(&self, position: usize) -> usize {
        let n = self.half_len();
        (position - 1) % n + 1
    }
}

impl<T: ComparisonOracle + ?Sized> ComparisonOracle for &mut T {
    fn len(&self) -> usize {
        (**self).len()
    }
    fn compare(&mut self, i: usize) -> Result<bool> {
        (**self).compare(i)
    }
    fn queries_used(&self) -> u64 {
        (**self).queries_used()
    }
}

impl<T: BatchOracle + ?Sized> BatchOracle for &mut T {
    fn len(&self) -> usize {
        (**self).len()
    }
    fn k(&self) -> usize {
        (**self).k()
    }
    fn locate(&mut self, splits: &[usize]) -> Result<usize> {
        (**self).locate(splits)
    }
    fn queries_used(&self) -> u64 {
        (**self).queries_used()
    }
}

fn check_instance(n: usize, true_index: usize) -> Result<()> {
    if n == 0 {
        return invalid("oracle needs n >= 1");
    }
    if true_index == 0 || true_index > n {
        return invalid(format!("true index {true_index} outside 1..={n}"));
    }
    Ok(())
}

/// Seeded comparison oracle answering `[i >= j*]`, flipped with probability
/// `1 - p`.
#[derive(Debug, Clone)]
pub struct SimulatedBinary {
    n: usize,
    true_index: usize,
    p: f64,
    rng: ChaCha8Rng,
    queries: u64,
}

pub fn simulated_binary(n: usize, true_index: usize, p: f64, seed: u64) -> Result<SimulatedBinary> {
    check_instance(n, true_index)?;
    NoiseModel::binary(p)?;
    Ok(SimulatedBinary {
        n,
        true_index,
        p,
        rng: ChaCha8Rng::seed_from_u64(seed),
        queries: 0,
    })
}

impl SimulatedBinary {
    pub fn true_index(&self) -> usize {
        self.true_index
    }
}

impl ComparisonOracle for SimulatedBinary {
    fn len(&self) -> usize {
        self.n
    }

    fn compare(&mut self, i: usize) -> Result<bool> {
        if i == 0 || i > self.n {
            return invalid(format!("query position {i} outside 1..={}", self.n));
        }
        self.queries += 1;
        let flip = self.rng.gen::<f64>() >= self.p;
        Ok((i >= self.true_index) ^ flip)
    }

    fn queries_used(&self) -> u64 {
        self.queries
    }
}

/// Seeded batch oracle: true part `j`, reported part `(j + h) mod (k+1)`
/// with `h ~ probs`.
#[derive(Debug, Clone)]
pub struct SimulatedKary {
    n: usize,
    true_index: usize,
    cumulative: Vec<f64>,
    rng: ChaCha8Rng,
    queries: u64,
}

pub fn simulated_kary(
    n: usize,
    true_index: usize,
    probs: &[f64],
    seed: u64,
) -> Result<SimulatedKary> {
    check_instance(n, true_index)?;
    NoiseModel::kary(probs.to_vec())?;
    if probs.len() > n {
        return invalid(format!("{} parts need at least as many cells, n = {n}", probs.len()));
    }
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &x in probs {
        acc += x;
        cumulative.push(acc);
    }
    Ok(SimulatedKary {
        n,
        true_index,
        cumulative,
        rng: ChaCha8Rng::seed_from_u64(seed),
        queries: 0,
    })
}

impl SimulatedKary {
    pub fn true_index(&self) -> usize {
        self.true_index
    }
}

impl BatchOracle for SimulatedKary {
    fn len(&self) -> usize {
        self.n
    }

    fn k(&self) -> usize {
        self.cumulative.len() - 1
    }

    fn locate(&mut self, splits: &[usize]) -> Result<usize> {
        let parts = self.cumulative.len();
        if splits.len() + 1 != parts {
            return invalid(format!("expected {} splits, got {}", parts - 1, splits.len()));
        }
        let mut prev = 0;
        for &s in splits {
            if s <= prev || s >= self.n {
                return invalid(format!(
                    "splits {splits:?} must be strictly increasing within 1..{}",
                    self.n
                ));
            }
            prev = s;
        }
        self.queries += 1;
        let truth = splits.iter().filter(|&&s| s < self.true_index).count();
        let u = self.rng.gen::<f64>();
        let shift = self
            .cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(parts - 1);
        Ok((truth + shift) % parts)
    }

    fn queries_used(&self) -> u64 {
        self.queries
    }
}

/// Probability that the coin pair's verdict is right, given that the two
/// coins showed different faces.
pub fn coin_effective_p(reference_bias: f64, unknown_bias: f64) -> Result<f64> {
    let (a, b) = (reference_bias, unknown_bias);
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
        return invalid("coin biases must lie in [0, 1]");
    }
    if a == b {
        return invalid("equal coin biases carry no comparison information");
    }
    let ref_heads = a * (1.0 - b);
    let unk_heads = b * (1.0 - a);
    Ok(ref_heads.max(unk_heads) / (ref_heads + unk_heads))
}

/// Outcome of one coin comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoinVerdict {
    /// The unknown coin showed heads on the deciding flip.
    pub unknown_more_heads: bool,
    /// Paired flips consumed, including the deciding one.
    pub flips: u64,
}

/// Compares an unknown coin against one reference coin by flipping both
/// until their faces differ.
#[derive(Debug, Clone)]
pub struct CoinPairOracle {
    reference_bias: f64,
    unknown_bias: f64,
    rng: ChaCha8Rng,
    queries: u64,
    flips: u64,
}

pub fn coin_pair_oracle(
    reference_bias: f64,
    unknown_bias: f64,
    seed: u64,
) -> Result<(CoinPairOracle, f64)> {
    let p = coin_effective_p(reference_bias, unknown_bias)?;
    Ok((
        CoinPairOracle {
            reference_bias,
            unknown_bias,
            rng: ChaCha8Rng::seed_from_u64(seed),
            queries: 0,
            flips: 0,
        },
        p,
    ))
}

impl CoinPairOracle {
    pub fn compare(&mut self) -> Result<CoinVerdict> {
        let verdict = flip_until_different(
            &mut self.rng,
            self.reference_bias,
            self.unknown_bias,
        )?;
        self.queries += 1;
        self.flips += verdict.flips;
        Ok(verdict)
    }

    pub fn queries_used(&self) -> u64 {
        self.queries
    }

    pub fn flips_used(&self) -> u64 {
        self.flips
    }
}

fn flip_until_different(rng: &mut ChaCha8Rng, reference: f64, unknown: f64) -> Result<CoinVerdict> {
    for flips in 1..=COIN_FLIP_CAP {
        let r = rng.gen::<f64>() < reference;
        let u = rng.gen::<f64>() < unknown;
        if r != u {
            return Ok(CoinVerdict {
                unknown_more_heads: u,
                flips,
            });
        }
    }
    Err(Error::FlipCapExceeded(COIN_FLIP_CAP))
}

/// Comparison oracle that places an unknown coin among references sorted by
/// increasing bias. Cell `j` means "the unknown ranks after exactly `j - 1`
/// references", so `n = references + 1`, and `f(i) = 1` means "reference
/// `i` is more heads-biased than the unknown".
#[derive(Debug, Clone)]
pub struct CoinListOracle {
    references: Vec<f64>,
    unknown_bias: f64,
    rng: ChaCha8Rng,
    queries: u64,
    flips: u64,
}

impl CoinListOracle {
    pub fn new(references: Vec<f64>, unknown_bias: f64, seed: u64) -> Result<Self> {
        if references.is_empty() {
            return invalid("need at least one reference coin");
        }
        if references.windows(2).any(|w| !(w[0] < w[1])) {
            return invalid("reference biases must be strictly increasing");
        }
        for &r in &references {
            coin_effective_p(r, unknown_bias)?;
        }
        Ok(CoinListOracle {
            references,
            unknown_bias,
            rng: ChaCha8Rng::seed_from_u64(seed),
            queries: 0,
            flips: 0,
        })
    }

    /// Smallest effective comparison accuracy over all references; a safe
    /// noise level for the search.
    pub fn conservative_p(&self) -> f64 {
        self.references
            .iter()
            .map(|&r| coin_effective_p(r, self.unknown_bias).unwrap())
            .fold(1.0, f64::min)
    }

    /// Number of references strictly below the unknown bias.
    pub fn true_rank(&self) -> usize {
        self.references.iter().filter(|&&r| r < self.unknown_bias).count()
    }

    pub fn flips_used(&self) -> u64 {
        self.flips
    }
}

impl ComparisonOracle for CoinListOracle {
    fn len(&self) -> usize {
        self.references.len() + 1
    }

    fn compare(&mut self, i: usize) -> Result<bool> {
        let n = self.len();
        if i == 0 || i > n {
            return invalid(format!("query position {i} outside 1..={n}"));
        }
        self.queries += 1;
        if i == n {
            // past the last reference: the unknown always ranks at or before it
            return Ok(true);
        }
        let verdict = flip_until_different(&mut self.rng, self.references[i - 1], self.unknown_bias)?;
        self.flips += verdict.flips;
        Ok(!verdict.unknown_more_heads)
    }

    fn queries_used(&self) -> u64 {
        self.queries
    }
}

/// Extends a comparison oracle on `1..=n` to the doubled circle: position
/// `y > n` is answered with the negation of `f(y - n)`.
#[derive(Debug, Clone)]
pub struct Mirrored<O> {
    inner: O,
}

impl<O: ComparisonOracle> Mirrored<O> {
    pub fn new(inner: O) -> Self {
        Mirrored { inner }
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: ComparisonOracle> CircularOracle for Mirrored<O> {
    fn half_len(&self) -> usize {
        self.inner.len()
    }

    fn evaluate(&mut self, x: usize) -> Result<bool> {
        let n = self.inner.len();
        if x == 0 || x > 2 * n {
            return invalid(format!("circle position {x} outside 1..={}", 2 * n));
        }
        if x <= n {
            self.inner.compare(x)
        } else {
            Ok(!self.inner.compare(x - n)?)
        }
    }

    fn queries_used(&self) -> u64 {
        self.inner.queries_used()
    }
}

/// Applies a uniformly random rotation `κ` of the doubled circle to every
/// query, which makes the hidden position uniformly distributed from the
/// searcher's point of view whatever the true index is.
#[derive(Debug, Clone)]
pub struct ShiftWrapped<C> {
    inner: C,
    shift: usize,
}

/// Wraps `inner` with a shift drawn uniformly from `0..2n` using `seed`.
pub fn shift_wrapped<C: CircularOracle>(inner: C, seed: u64) -> ShiftWrapped<C> {
    let span = 2 * inner.half_len();
    let shift = ChaCha8Rng::seed_from_u64(seed).gen_range(0..span);
    ShiftWrapped { inner, shift }
}

impl<C: CircularOracle> ShiftWrapped<C> {
    pub fn with_shift(inner: C, shift: usize) -> Result<Self> {
        if shift >= 2 * inner.half_len() {
            return invalid(format!("shift {shift} outside 0..{}", 2 * inner.half_len()));
        }
        Ok(ShiftWrapped { inner, shift })
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    /// Inner position that a searcher query at `x` is forwarded to.
    pub fn forward(&self, x: usize) -> usize {
        let span = 2 * self.inner.half_len();
        (x - 1 + span - self.shift) % span + 1
    }

    pub fn into_inner(self) -> C {
        self.inner
    }
}

impl<C: CircularOracle> CircularOracle for ShiftWrapped<C> {
    fn half_len(&self) -> usize {
        self.inner.half_len()
    }

    fn evaluate(&mut self, x: usize) -> Result<bool> {
        let span = 2 * self.inner.half_len();
        if x == 0 || x > span {
            return invalid(format!("circle position {x} outside 1..={span}"));
        }
        self.inner.evaluate(self.forward(x))
    }

    fn queries_used(&self) -> u64 {
        self.inner.queries_used()
    }

    fn resolve(&self, position: usize) -> usize {
        self.inner.resolve(self.forward(position))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_binary_answers() {
        let mut o = simulated_binary(10, 5, 1.0, 1).unwrap();
        assert!(o.compare(7).unwrap());
        assert!(!o.compare(3).unwrap());
        assert!(o.compare(5).unwrap());
        assert!(!o.compare(4).unwrap());
        assert_eq!(o.queries_used(), 4);
        assert!(o.compare(0).is_err());
        assert!(o.compare(11).is_err());
        assert_eq!(o.queries_used(), 4);
    }

    #[test]
    fn binary_construction_errors() {
        assert!(simulated_binary(10, 0, 0.8, 1).is_err());
        assert!(simulated_binary(10, 11, 0.8, 1).is_err());
        assert!(simulated_binary(10, 3, 0.5, 1).is_err());
    }

    #[test]
    fn binary_empirical_rate() {
        let mut o = simulated_binary(100, 40, 0.75, 99).unwrap();
        let trials = 100_000;
        let agree = (0..trials)
            .filter(|t| {
                let i = t % 100 + 1;
                o.compare(i).unwrap() == (i >= 40)
            })
            .count();
        let rate = agree as f64 / trials as f64;
        assert!((rate - 0.75).abs() < 0.01, "rate {rate}");
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = simulated_binary(50, 20, 0.7, 1234).unwrap();
        let mut b = simulated_binary(50, 20, 0.7, 1234).unwrap();
        for i in 1..=500 {
            let q = i % 50 + 1;
            assert_eq!(a.compare(q).unwrap(), b.compare(q).unwrap());
        }
    }

    #[test]
    fn kary_noiseless_and_errors() {
        let mut o = simulated_kary(20, 9, &[1.0, 0.0, 0.0], 3).unwrap();
        assert_eq!(o.k(), 2);
        assert_eq!(o.locate(&[4, 12]).unwrap(), 1);
        assert_eq!(o.locate(&[9, 12]).unwrap(), 0);
        assert_eq!(o.locate(&[2, 8]).unwrap(), 2);
        assert!(o.locate(&[4]).is_err());
        assert!(o.locate(&[4, 4]).is_err());
        assert!(o.locate(&[4, 20]).is_err());
        assert_eq!(o.queries_used(), 3);
    }

    #[test]
    fn kary_empirical_distribution() {
        let mut o = simulated_kary(30, 15, &[0.8, 0.1, 0.1], 5).unwrap();
        let mut counts = [0usize; 3];
        for _ in 0..100_000 {
            counts[o.locate(&[10, 20]).unwrap()] += 1;
        }
        let f: Vec<f64> = counts.iter().map(|c| *c as f64 / 1e5).collect();
        assert!((f[1] - 0.8).abs() < 0.01);
        assert!((f[2] - 0.1).abs() < 0.01);
        assert!((f[0] - 0.1).abs() < 0.01);
    }

    #[test]
    fn coin_effective_values() {
        assert!((coin_effective_p(0.5, 0.6).unwrap() - 0.6).abs() < 1e-12);
        assert_eq!(coin_effective_p(0.5, 1.0).unwrap(), 1.0);
        assert!((coin_effective_p(0.2, 0.8).unwrap() - 0.64 / 0.68).abs() < 1e-12);
        assert!(coin_effective_p(0.4, 0.4).is_err());
        assert!(coin_effective_p(1.2, 0.4).is_err());
    }

    #[test]
    fn coin_pair_empirical_accuracy() {
        let (mut o, p) = coin_pair_oracle(0.5, 0.6, 11).unwrap();
        let trials = 20_000;
        let right = (0..trials)
            .filter(|_| o.compare().unwrap().unknown_more_heads)
            .count();
        let rate = right as f64 / trials as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((rate - p).abs() < 4.0 * sigma, "rate {rate} vs {p}");
        assert!(o.flips_used() >= trials as u64);
        assert_eq!(o.queries_used(), trials as u64);
    }

    #[test]
    fn coin_list_orientation() {
        let mut o = CoinListOracle::new(vec![0.1, 0.3, 0.5, 0.7, 0.9], 0.6, 1).unwrap();
        assert_eq!(o.len(), 6);
        assert_eq!(o.true_rank(), 3);
        assert!((o.conservative_p() - 0.6).abs() < 1e-12);
        // reference 1 (0.1) is far below 0.6: answer is almost surely 0
        let ones = (0..200).filter(|_| o.compare(1).unwrap()).count();
        assert!(ones < 40);
        assert!(o.compare(6).unwrap());
        assert!(CoinListOracle::new(vec![0.3, 0.1], 0.6, 1).is_err());
        assert!(CoinListOracle::new(vec![0.3, 0.6], 0.6, 1).is_err());
    }

    #[test]
    fn mirrored_matches_circular_threshold() {
        let n = 7;
        for j in 1..=n {
            let mut m = Mirrored::new(simulated_binary(n, j, 1.0, 0).unwrap());
            for x in 1..=2 * n {
                let expected = (x + 2 * n - j) % (2 * n) < n;
                assert_eq!(m.evaluate(x).unwrap(), expected, "j={j} x={x}");
            }
            assert!(m.evaluate(0).is_err());
            assert!(m.evaluate(2 * n + 1).is_err());
        }
    }

    #[test]
    fn zero_shift_is_identity() {
        let n = 9;
        let mut plain = Mirrored::new(simulated_binary(n, 4, 0.8, 77).unwrap());
        let mut wrapped =
            ShiftWrapped::with_shift(Mirrored::new(simulated_binary(n, 4, 0.8, 77).unwrap()), 0)
                .unwrap();
        for x in 1..=2 * n {
            assert_eq!(plain.evaluate(x).unwrap(), wrapped.evaluate(x).unwrap());
            assert_eq!(plain.resolve(x), wrapped.resolve(x));
        }
    }

    #[test]
    fn shift_rotates_hidden_position() {
        let n = 6;
        let j = 2;
        for shift in 0..2 * n {
            let mut w =
                ShiftWrapped::with_shift(Mirrored::new(simulated_binary(n, j, 1.0, 0).unwrap()), shift)
                    .unwrap();
            let hidden = (j - 1 + shift) % (2 * n) + 1;
            for x in 1..=2 * n {
                let expected = (x + 2 * n - hidden) % (2 * n) < n;
                assert_eq!(w.evaluate(x).unwrap(), expected);
            }
            assert_eq!(w.resolve(hidden), j);
        }
        let inner = Mirrored::new(simulated_binary(n, j, 1.0, 0).unwrap());
        assert!(ShiftWrapped::with_shift(inner, 2 * n).is_err());
    }

    #[test]
    fn seeded_shift_is_in_range_and_deterministic() {
        let mk = || Mirrored::new(simulated_binary(5, 1, 1.0, 0).unwrap());
        let a = shift_wrapped(mk(), 42);
        let b = shift_wrapped(mk(), 42);
        assert_eq!(a.shift(), b.shift());
        assert!(a.shift() < 10);
    }
}
