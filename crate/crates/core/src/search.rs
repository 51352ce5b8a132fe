//! Bayesian noisy search.
//!
//! Every step picks the query that splits the current posterior as evenly
//! as possible, asks the oracle and applies Bayes's rule. Three regimes:
//!
//! * **main**: no cell weighs `eps_par` or more; split the whole posterior
//!   into `k + 1` parts of (almost) equal mass.
//! * **localize**: some cell `c` weighs at least `eps_par`; balance the
//!   posterior conditioned on the window `c - l_sur ..= c + l_sur`, while
//!   still updating every cell.
//! * **verify**: the heaviest cell holds at least `1 - gamma` of the mass;
//!   query its bounding positions repeatedly and accept it on a plurality
//!   vote. A rejected candidate is not discarded; the vote answers stay in
//!   the posterior and the loop carries on.
//!
//! [`search_binary`] and [`search_kary`] drive the same loop; with `k = 1`
//! and noise `(p, 1 - p)` they issue identical query sequences.
//! [`search_circular`] searches the doubled circle used by the random-shift
//! wrapper, where every query asks for a half-circle arc.

pub use crate::bounds::expected_gain;
use crate::error::{invalid, Result};
use crate::noise::NoiseModel;
use crate::oracles::{BatchOracle, CircularOracle, ComparisonOracle};
use crate::posterior::Posterior;

/// How to size the localization window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusMode {
    /// Radius guaranteeing the target is inside the window with probability
    /// `1 - delta`: `(p/(1-p))^r / eps_par`, `r = p(1-p) log2²(1/δ) / (2p-1)`.
    Confident,
    /// Constant radius `(1/γ²)^(1/(2p-1))`, paired with verify-and-retry.
    Variant,
}

/// Window radius around the heaviest cell, clipped to `n`.
pub fn localize_radius(
    n: usize,
    p: f64,
    delta: f64,
    eps_par: f64,
    gamma: f64,
    mode: RadiusMode,
) -> Result<usize> {
    if !(p > 0.5 && p <= 1.0) {
        return invalid(format!("radius needs 1/2 < p <= 1, got {p}"));
    }
    if p == 1.0 {
        return Ok(1);
    }
    let raw = match mode {
        RadiusMode::Confident => {
            if !(delta > 0.0 && delta < 1.0) || !(eps_par > 0.0 && eps_par < 1.0) {
                return invalid("confident radius needs delta and eps_par in (0, 1)");
            }
            let log_inv_delta = (1.0 / delta).log2();
            let r = p * (1.0 - p) * log_inv_delta * log_inv_delta / (2.0 * p - 1.0);
            (p / (1.0 - p)).powf(r) / eps_par
        }
        RadiusMode::Variant => {
            if !(gamma > 0.0 && gamma < 1.0) {
                return invalid(format!("gamma must lie in (0, 1), got {gamma}"));
            }
            (1.0 / (gamma * gamma)).powf(1.0 / (2.0 * p - 1.0))
        }
    };
    Ok(clip_radius(raw, n))
}

fn clip_radius(raw: f64, n: usize) -> usize {
    if !raw.is_finite() || raw >= n as f64 {
        n.max(1)
    } else {
        (raw.ceil() as usize).max(1)
    }
}

/// Default partition slack: `sqrt(1 / (24 log2 n)) / k`.
pub fn default_eps_par(n: usize, k: usize) -> f64 {
    let base = if n < 2 {
        0.5
    } else {
        (1.0 / (24.0 * (n as f64).log2())).sqrt().min(0.5)
    };
    base / k.max(1) as f64
}

/// Optional overrides of the derived search parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub eps_par: Option<f64>,
    pub l_sur: Option<usize>,
    pub gamma: Option<f64>,
    pub max_queries: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchParams {
    pub n: usize,
    /// Target failure probability.
    pub delta: f64,
    pub noise: NoiseModel,
    pub eps_par: f64,
    pub l_sur: usize,
    pub gamma: f64,
    pub max_queries: u64,
    /// Votes per bounding position during verification.
    pub verify_rounds: u64,
}

impl SearchParams {
    pub fn new(n: usize, delta: f64, noise: NoiseModel) -> Result<Self> {
        Self::with_overrides(n, delta, noise, Overrides::default())
    }

    pub fn with_overrides(n: usize, delta: f64, noise: NoiseModel, o: Overrides) -> Result<Self> {
        if n == 0 {
            return invalid("n must be positive");
        }
        if !(delta > 0.0 && delta < 1.0) {
            return invalid(format!("delta must lie in (0, 1), got {delta}"));
        }
        let k = noise.k();
        let info = noise.info_bits();
        if !(info > 0.0) {
            return invalid("noise model carries no information");
        }
        let gamma = o.gamma.unwrap_or(0.5);
        let eps_par = o.eps_par.unwrap_or_else(|| default_eps_par(n, k));
        let l_sur = match o.l_sur {
            Some(l) => l,
            None => default_l_sur(n, delta, &noise, eps_par, gamma)?,
        };
        let log_inv_delta = (1.0 / delta).log2();
        let log_n = (n as f64).log2();
        let max_queries = o
            .max_queries
            .unwrap_or_else(|| (10.0 * (log_n + log_inv_delta + 1.0) / info).ceil() as u64);
        let verify_rounds = ((log_inv_delta / info).ceil() as u64).max(1);
        let params = SearchParams {
            n,
            delta,
            noise,
            eps_par,
            l_sur,
            gamma,
            max_queries,
            verify_rounds,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return invalid("n must be positive");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return invalid(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(self.eps_par > 0.0 && self.eps_par < 1.0) {
            return invalid(format!("eps_par must lie in (0, 1), got {}", self.eps_par));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return invalid(format!("gamma must lie in (0, 1), got {}", self.gamma));
        }
        if self.l_sur == 0 {
            return invalid("l_sur must be at least 1");
        }
        if self.max_queries == 0 {
            return invalid("max_queries must be at least 1");
        }
        if self.verify_rounds == 0 {
            return invalid("verify_rounds must be at least 1");
        }
        Ok(())
    }

    /// Heaviest-cell mass at which verification starts.
    pub fn isolate_mass(&self) -> f64 {
        1.0 - self.gamma
    }

    /// Verification attempts allowed before giving up.
    pub fn max_verify_attempts(&self) -> u64 {
        (1.0 / self.delta).log2().ceil() as u64 + 3
    }
}

fn default_l_sur(n: usize, delta: f64, noise: &NoiseModel, eps_par: f64, gamma: f64) -> Result<usize> {
    let parts = noise.parts();
    let p = noise.correct_prob();
    // Noiseless: all remaining mass sits within 1/eps_par cells of the
    // heaviest one once it reaches eps_par.
    if noise.is_noiseless() || p <= 0.5 {
        return Ok(clip_radius(1.0 / eps_par, n).max(parts.min(n)));
    }
    let l = localize_radius(n, p, delta, eps_par, gamma, RadiusMode::Variant)?;
    Ok(l.max(parts).min(n.max(1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Main,
    Localize,
    Verify,
}

/// One oracle call.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryRecord {
    pub phase: Phase,
    /// Split indices (linear search) or the queried circle position.
    pub splits: Vec<usize>,
    /// Posterior mass left of each split before the answer (for a circle
    /// query: mass of the half-circle arc ending at the position).
    pub prefix: Vec<f64>,
    /// Reported part; 0 is the leftmost part (for a circle query: 0 means
    /// "inside the arc").
    pub outcome: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    Converged,
    QueryCap,
    VerifyExhausted,
}

impl HaltReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            HaltReason::Converged => "converged",
            HaltReason::QueryCap => "query_cap",
            HaltReason::VerifyExhausted => "verify_exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub estimated_index: usize,
    pub queries_used: u64,
    pub transcript: Vec<QueryRecord>,
    pub halt_reason: HaltReason,
    /// Verification attempts that rejected their candidate.
    pub rounds_of_retry: u64,
}

impl SearchOutcome {
    /// Queries spent outside verification.
    pub fn main_loop_queries(&self) -> u64 {
        self.transcript.iter().filter(|r| r.phase != Phase::Verify).count() as u64
    }
}

/// Binary noisy search for the cell `j*` with `f(i) = [i >= j*]`.
pub fn search_binary<O: ComparisonOracle>(params: &SearchParams, oracle: &mut O) -> Result<SearchOutcome> {
    params.validate()?;
    if !matches!(params.noise, NoiseModel::Binary { .. }) {
        return invalid("search_binary needs a binary noise model");
    }
    if oracle.len() != params.n {
        return invalid(format!("oracle covers {} cells, params say {}", oracle.len(), params.n));
    }
    let mut ask = |splits: &[usize]| -> Result<usize> {
        Ok(if oracle.compare(splits[0])? { 0 } else { 1 })
    };
    run_linear(params, &mut ask)
}

/// Generalized search with `k + 1`-way batch answers.
pub fn search_kary<O: BatchOracle>(params: &SearchParams, oracle: &mut O) -> Result<SearchOutcome> {
    params.validate()?;
    if oracle.len() != params.n {
        return invalid(format!("oracle covers {} cells, params say {}", oracle.len(), params.n));
    }
    if oracle.k() != params.noise.k() {
        return invalid(format!(
            "oracle answers {}-way, noise model is {}-way",
            oracle.k() + 1,
            params.noise.parts()
        ));
    }
    if params.noise.parts() > params.n {
        return invalid(format!("{} parts need at least {} cells", params.noise.parts(), params.noise.parts()));
    }
    let mut ask = |splits: &[usize]| oracle.locate(splits);
    run_linear(params, &mut ask)
}

enum Verdict {
    Accept,
    Reject,
    OutOfQueries,
}

struct Run<'p> {
    params: &'p SearchParams,
    probs: Vec<f64>,
    posterior: Posterior,
    transcript: Vec<QueryRecord>,
}

impl Run<'_> {
    fn out_of_queries(&self) -> bool {
        self.transcript.len() as u64 >= self.params.max_queries
    }

    fn finish(self, index: usize, halt_reason: HaltReason, retries: u64) -> SearchOutcome {
        SearchOutcome {
            estimated_index: index,
            queries_used: self.transcript.len() as u64,
            transcript: self.transcript,
            halt_reason,
            rounds_of_retry: retries,
        }
    }
}

fn run_linear(params: &SearchParams, ask: &mut dyn FnMut(&[usize]) -> Result<usize>) -> Result<SearchOutcome> {
    let k = params.noise.k();
    let mut run = Run {
        params,
        probs: params.noise.probs(),
        posterior: Posterior::new_uniform(params.n)?,
        transcript: Vec::new(),
    };
    let mut retries = 0;
    loop {
        let (cell, weight) = run.posterior.max_cell();
        if weight >= params.isolate_mass() {
            let sets = verification_sets(params.n, cell, k);
            let verdict = vote(&mut run, &sets, &mut |run: &mut Run, splits: &[usize]| {
                linear_query(run, Phase::Verify, splits.to_vec(), ask)
            })?;
            match verdict {
                Verdict::Accept => return Ok(run.finish(cell, HaltReason::Converged, retries)),
                Verdict::OutOfQueries => return Ok(run.finish(cell, HaltReason::QueryCap, retries)),
                Verdict::Reject => {
                    retries += 1;
                    if retries >= params.max_verify_attempts() {
                        let best = run.posterior.max_cell().0;
                        return Ok(run.finish(best, HaltReason::VerifyExhausted, retries));
                    }
                    continue;
                }
            }
        }
        if run.out_of_queries() {
            return Ok(run.finish(cell, HaltReason::QueryCap, retries));
        }
        let (phase, splits) = if weight >= params.eps_par {
            (Phase::Localize, window_splits(&run.posterior, cell, params.l_sur, k)?)
        } else {
            (Phase::Main, run.posterior.find_k_splits(k, params.eps_par)?)
        };
        linear_query(&mut run, phase, splits, ask)?;
    }
}

fn linear_query(
    run: &mut Run,
    phase: Phase,
    splits: Vec<usize>,
    ask: &mut dyn FnMut(&[usize]) -> Result<usize>,
) -> Result<usize> {
    let prefix = splits.iter().map(|&s| run.posterior.prefix_unchecked(s)).collect();
    let outcome = ask(&splits)?;
    let factors = crate::noise::likelihoods(&run.probs, outcome);
    run.posterior.scale_parts(&splits, &factors)?;
    run.transcript.push(QueryRecord {
        phase,
        splits,
        prefix,
        outcome,
    });
    Ok(outcome)
}

/// Splits balancing the posterior conditioned on the window around `center`.
fn window_splits(pos: &Posterior, center: usize, radius: usize, k: usize) -> Result<Vec<usize>> {
    let n = pos.len();
    let mut lo = center.saturating_sub(radius).max(1);
    let mut hi = (center + radius).min(n);
    let boundary_range = |lo: usize, hi: usize| ((lo - 1).max(1), hi.min(n - 1));
    loop {
        let (b_lo, b_hi) = boundary_range(lo, hi);
        if b_hi >= b_lo && b_hi - b_lo + 1 >= k {
            break;
        }
        if lo == 1 && hi == n {
            return invalid(format!("{} parts need at least {} cells", k + 1, k + 1));
        }
        lo = (lo - 1).max(1);
        hi = (hi + 1).min(n);
    }
    let window = pos.restrict(lo, hi)?;
    let (b_lo, b_hi) = boundary_range(lo, hi);
    let mut prefixes = Vec::with_capacity(b_hi - b_lo + 1);
    let mut acc = window.prefix_unchecked(b_lo);
    prefixes.push(acc);
    for b in b_lo + 1..=b_hi {
        acc += window.weight(b);
        prefixes.push(acc);
    }
    let parts = (k + 1) as f64;
    let mut splits = Vec::with_capacity(k);
    let mut next = 0;
    for j in 1..=k {
        let target = j as f64 / parts;
        let last = prefixes.len() - 1 - (k - j);
        let mut best = next;
        for idx in next..=last {
            if (prefixes[idx] - target).abs() < (prefixes[best] - target).abs() {
                best = idx;
            }
        }
        splits.push(b_lo + best);
        next = best + 1;
    }
    Ok(splits)
}

/// Query plans certifying `candidate`: each entry is a split set and the
/// part the candidate falls into.
fn verification_sets(n: usize, candidate: usize, k: usize) -> Vec<(Vec<usize>, usize)> {
    let mut sets = Vec::new();
    if k == 1 {
        if candidate < n {
            sets.push((vec![candidate], 0));
        }
        if candidate > 1 {
            sets.push((vec![candidate - 1], 1));
        }
        return sets;
    }
    let start = (candidate.saturating_sub(1))
        .saturating_sub((k - 2) / 2)
        .max(1)
        .min(n - k);
    let splits: Vec<usize> = (start..start + k).collect();
    let expected = splits.iter().filter(|&&s| s < candidate).count();
    sets.push((splits, expected));
    sets
}

/// Round-robin plurality vote over the split sets, `verify_rounds` answers
/// each, stopping as soon as every outcome is decided.
fn vote<'p>(
    run: &mut Run<'p>,
    sets: &[(Vec<usize>, usize)],
    query: &mut dyn FnMut(&mut Run<'p>, &[usize]) -> Result<usize>,
) -> Result<Verdict> {
    let parts = run.probs.len();
    let budget = run.params.verify_rounds;
    let mut counts = vec![vec![0u64; parts]; sets.len()];
    let mut asked = vec![0u64; sets.len()];
    let mut passed = vec![false; sets.len()];
    loop {
        if passed.iter().all(|&p| p) {
            return Ok(Verdict::Accept);
        }
        for (idx, (splits, expected)) in sets.iter().enumerate() {
            if passed[idx] {
                continue;
            }
            if run.out_of_queries() {
                return Ok(Verdict::OutOfQueries);
            }
            let outcome = query(run, splits)?;
            counts[idx][outcome] += 1;
            asked[idx] += 1;
            let remaining = budget - asked[idx];
            let hits = counts[idx][*expected];
            let rival = counts[idx]
                .iter()
                .enumerate()
                .filter(|(o, _)| o != expected)
                .map(|(_, c)| *c)
                .max()
                .unwrap_or(0);
            if hits > rival + remaining {
                passed[idx] = true;
            } else if rival >= hits + remaining {
                return Ok(Verdict::Reject);
            }
        }
    }
}

/// Search on the doubled circle `1..=2n` (see [`CircularOracle`]). The
/// hidden position is found by halving the posterior with half-circle arc
/// queries; the result is mapped back through [`CircularOracle::resolve`].
pub fn search_circular<C: CircularOracle>(params: &SearchParams, oracle: &mut C) -> Result<SearchOutcome> {
    params.validate()?;
    let p = match params.noise {
        NoiseModel::Binary { p } => p,
        _ => return invalid("circular search needs a binary noise model"),
    };
    let half = oracle.half_len();
    if half != params.n {
        return invalid(format!("oracle covers {half} cells, params say {}", params.n));
    }
    let span = 2 * half;
    let mut run = Run {
        params,
        probs: vec![p, 1.0 - p],
        posterior: Posterior::new_uniform(span)?,
        transcript: Vec::new(),
    };
    let (cell, halt, retries) = {
        let mut ask = |run: &mut Run, phase: Phase, x: usize| -> Result<usize> {
            let mass = arc_mass(&run.posterior, half, x);
            let inside = oracle.evaluate(x)?;
            update_arc(&mut run.posterior, half, x, inside, p)?;
            let outcome = if inside { 0 } else { 1 };
            run.transcript.push(QueryRecord {
                phase,
                splits: vec![x],
                prefix: vec![mass],
                outcome,
            });
            Ok(outcome)
        };
        circular_loop(&mut run, span, half, &mut ask)?
    };
    let index = oracle.resolve(cell);
    Ok(run.finish(index, halt, retries))
}

fn circular_loop<'p>(
    run: &mut Run<'p>,
    span: usize,
    half: usize,
    ask: &mut dyn FnMut(&mut Run<'p>, Phase, usize) -> Result<usize>,
) -> Result<(usize, HaltReason, u64)> {
    let params = run.params;
    let mut retries = 0;
    loop {
        let (cell, weight) = run.posterior.max_cell();
        if weight >= params.isolate_mass() {
            let before = if cell == 1 { span } else { cell - 1 };
            let sets = [(vec![cell], 0), (vec![before], 1)];
            let verdict = vote(run, &sets, &mut |run: &mut Run<'p>, splits: &[usize]| {
                ask(run, Phase::Verify, splits[0])
            })?;
            match verdict {
                Verdict::Accept => return Ok((cell, HaltReason::Converged, retries)),
                Verdict::OutOfQueries => return Ok((cell, HaltReason::QueryCap, retries)),
                Verdict::Reject => {
                    retries += 1;
                    if retries >= params.max_verify_attempts() {
                        let best = run.posterior.max_cell().0;
                        return Ok((best, HaltReason::VerifyExhausted, retries));
                    }
                    continue;
                }
            }
        }
        if run.out_of_queries() {
            return Ok((cell, HaltReason::QueryCap, retries));
        }
        let x = balanced_arc(&run.posterior, half);
        ask(run, Phase::Main, x)?;
    }
}

/// Mass of the half-circle arc `x-n+1 ..= x` (indices mod `2n`).
fn arc_mass(pos: &Posterior, half: usize, x: usize) -> f64 {
    if x >= half {
        pos.prefix_unchecked(x) - pos.prefix_unchecked(x - half)
    } else {
        1.0 - (pos.prefix_unchecked(x + half) - pos.prefix_unchecked(x))
    }
}

fn update_arc(pos: &mut Posterior, half: usize, x: usize, inside: bool, p: f64) -> Result<()> {
    let span = 2 * half;
    let (fin, fout) = if inside { (p, 1.0 - p) } else { (1.0 - p, p) };
    if x >= half {
        // arc lo..=x with lo = x - half + 1 >= 1
        let lo = x - half + 1;
        let mut bounds = Vec::with_capacity(2);
        let mut factors = Vec::with_capacity(3);
        if lo > 1 {
            bounds.push(lo - 1);
            factors.push(fout);
        }
        factors.push(fin);
        if x < span {
            bounds.push(x);
            factors.push(fout);
        }
        pos.scale_parts(&bounds, &factors)
    } else {
        // arc wraps: 1..=x and x+half+1..=span
        pos.scale_parts(&[x, x + half], &[fin, fout, fin])
    }
}

/// Circle position whose half-circle arc mass is closest to 1/2. Only
/// `x in n..=2n` need be considered, since the arc at `x - n` is the
/// complement of the arc at `x`.
fn balanced_arc(pos: &Posterior, half: usize) -> usize {
    let span = 2 * half;
    let mut marks = vec![half, span];
    for seg in pos.segments() {
        for change in [seg.start, seg.end + 1] {
            for x in [change - 1, change - 1 + half] {
                if (half..=span).contains(&x) {
                    marks.push(x);
                }
            }
        }
    }
    marks.sort_unstable();
    marks.dedup();
    let score = |x: usize| (arc_mass(pos, half, x) - 0.5).abs();
    let mut best = (half, score(half));
    let consider = |x: usize, best: &mut (usize, f64)| {
        let s = score(x);
        if s < best.1 || (s == best.1 && x < best.0) {
            *best = (x, s);
        }
    };
    for pair in marks.windows(2) {
        let (u, v) = (pair[0], pair[1]);
        consider(u, &mut best);
        consider(v, &mut best);
        let slope = pos.weight(u + 1) - pos.weight(u + 1 - half);
        if slope != 0.0 {
            let step = (0.5 - arc_mass(pos, half, u)) / slope;
            if step.is_finite() && step > 0.0 {
                let guess = u as f64 + step;
                for cand in [guess.floor(), guess.ceil()] {
                    if cand >= u as f64 && cand <= v as f64 {
                        consider(cand as usize, &mut best);
                    }
                }
            }
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{simulated_binary, simulated_kary, Mirrored, ShiftWrapped};

    #[test]
    fn radius_examples() {
        assert_eq!(localize_radius(1 << 20, 0.75, 0.05, 0.05, 0.5, RadiusMode::Variant).unwrap(), 16);
        let near_one = localize_radius(1 << 20, 0.999999, 0.05, 0.05, 0.5, RadiusMode::Variant).unwrap();
        assert_eq!(near_one, 5); // 4^(1/0.999998) is a hair above 4
        let l = localize_radius(1 << 20, 0.75, 0.1, 1.0 / 24.0, 0.5, RadiusMode::Confident).unwrap();
        assert_eq!(l, 2263);
        assert_eq!(localize_radius(100, 0.75, 0.1, 1.0 / 24.0, 0.5, RadiusMode::Confident).unwrap(), 100);
        assert_eq!(localize_radius(100, 1.0, 0.1, 0.1, 0.5, RadiusMode::Variant).unwrap(), 1);
        assert!(localize_radius(100, 0.5, 0.1, 0.1, 0.5, RadiusMode::Variant).is_err());
    }

    #[test]
    fn default_params() {
        let p = SearchParams::new(1 << 16, 0.05, NoiseModel::binary(0.75).unwrap()).unwrap();
        assert!((p.eps_par - (1.0f64 / 384.0).sqrt()).abs() < 1e-15);
        assert_eq!(p.l_sur, 16);
        assert_eq!(p.verify_rounds, 23);
        assert_eq!(p.max_verify_attempts(), 8);
        let kp = SearchParams::new(4096, 0.05, NoiseModel::kary(vec![0.85, 0.05, 0.05, 0.05]).unwrap()).unwrap();
        assert!((kp.eps_par - (1.0f64 / 288.0).sqrt() / 3.0).abs() < 1e-15);
        assert_eq!(kp.verify_rounds, 4);
        assert!(SearchParams::new(0, 0.05, NoiseModel::binary(0.75).unwrap()).is_err());
        assert!(SearchParams::new(10, 1.0, NoiseModel::binary(0.75).unwrap()).is_err());
        let bad = Overrides { gamma: Some(1.5), ..Default::default() };
        assert!(SearchParams::with_overrides(10, 0.1, NoiseModel::binary(0.75).unwrap(), bad).is_err());
    }

    #[test]
    fn single_cell_needs_no_queries() {
        let params = SearchParams::new(1, 0.01, NoiseModel::binary(0.8).unwrap()).unwrap();
        let mut o = simulated_binary(1, 1, 0.8, 0).unwrap();
        let out = search_binary(&params, &mut o).unwrap();
        assert_eq!(out.estimated_index, 1);
        assert_eq!(out.queries_used, 0);
        assert_eq!(out.halt_reason, HaltReason::Converged);
    }

    #[test]
    fn noiseless_binary_exhaustive() {
        let params = SearchParams::new(16, 0.01, NoiseModel::binary(1.0).unwrap()).unwrap();
        for j in 1..=16 {
            let mut o = simulated_binary(16, j, 1.0, 0).unwrap();
            let out = search_binary(&params, &mut o).unwrap();
            assert_eq!(out.estimated_index, j);
            assert_eq!(out.halt_reason, HaltReason::Converged);
            assert!(out.main_loop_queries() <= 5, "j={j}: {}", out.main_loop_queries());
            assert_eq!(out.queries_used, o.queries_used());
        }
    }

    #[test]
    fn noiseless_kary_takes_three_batches() {
        let params = SearchParams::new(64, 0.01, NoiseModel::kary(vec![1.0, 0.0, 0.0, 0.0]).unwrap()).unwrap();
        for j in 1..=64 {
            let mut o = simulated_kary(64, j, &[1.0, 0.0, 0.0, 0.0], 0).unwrap();
            let out = search_kary(&params, &mut o).unwrap();
            assert_eq!(out.estimated_index, j);
            assert_eq!(out.main_loop_queries(), 3, "j={j}");
        }
    }

    #[test]
    fn query_cap_halts() {
        let o = Overrides { max_queries: Some(5), ..Default::default() };
        let params = SearchParams::with_overrides(1 << 12, 0.05, NoiseModel::binary(0.7).unwrap(), o).unwrap();
        let mut oracle = simulated_binary(1 << 12, 100, 0.7, 3).unwrap();
        let out = search_binary(&params, &mut oracle).unwrap();
        assert_eq!(out.halt_reason, HaltReason::QueryCap);
        assert_eq!(out.queries_used, 5);
        assert!((1..=1 << 12).contains(&out.estimated_index));
    }

    #[test]
    fn mismatched_oracle_is_rejected() {
        let params = SearchParams::new(10, 0.05, NoiseModel::binary(0.8).unwrap()).unwrap();
        let mut o = simulated_binary(11, 3, 0.8, 0).unwrap();
        assert!(search_binary(&params, &mut o).is_err());
        let kparams = SearchParams::new(10, 0.05, NoiseModel::kary(vec![0.8, 0.1, 0.1]).unwrap()).unwrap();
        let mut ko = simulated_kary(10, 3, &[0.7, 0.1, 0.1, 0.1], 0).unwrap();
        assert!(search_kary(&kparams, &mut ko).is_err());
    }

    #[test]
    fn verification_plans() {
        assert_eq!(verification_sets(10, 4, 1), vec![(vec![4], 0), (vec![3], 1)]);
        assert_eq!(verification_sets(10, 1, 1), vec![(vec![1], 0)]);
        assert_eq!(verification_sets(10, 10, 1), vec![(vec![9], 1)]);
        assert!(verification_sets(1, 1, 1).is_empty());
        assert_eq!(verification_sets(20, 10, 3), vec![(vec![9, 10, 11], 1)]);
        assert_eq!(verification_sets(20, 1, 3), vec![(vec![1, 2, 3], 0)]);
        assert_eq!(verification_sets(20, 20, 3), vec![(vec![17, 18, 19], 3)]);
        assert_eq!(verification_sets(20, 5, 2), vec![(vec![4, 5], 1)]);
    }

    #[test]
    fn window_splits_balance_conditional_mass() {
        let pos = Posterior::from_weights(&[0.05, 0.05, 0.1, 0.4, 0.2, 0.1, 0.05, 0.05]).unwrap();
        let s = window_splits(&pos, 4, 2, 1).unwrap();
        // window 2..=6 mass 0.85; conditional prefix at 3 = 0.176, at 4 = 0.647
        assert_eq!(s, vec![4]);
        let s = window_splits(&pos, 4, 2, 3).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn arc_helpers() {
        let half = 4;
        let pos = Posterior::from_weights(&[0.1, 0.2, 0.3, 0.1, 0.05, 0.05, 0.1, 0.1]).unwrap();
        assert!((arc_mass(&pos, half, 4) - 0.7).abs() < 1e-12);
        assert!((arc_mass(&pos, half, 2) - 0.5).abs() < 1e-12);
        for x in 1..=8 {
            let brute: f64 = (0..half)
                .map(|d| pos.weight((x + 8 - d - 1) % 8 + 1))
                .sum();
            assert!((arc_mass(&pos, half, x) - brute).abs() < 1e-12, "x={x}");
        }
        let x = balanced_arc(&pos, half);
        let best = (half..=2 * half)
            .map(|x| (arc_mass(&pos, half, x) - 0.5).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(((arc_mass(&pos, half, x) - 0.5).abs() - best).abs() < 1e-12);

        let mut p2 = pos.clone();
        update_arc(&mut p2, half, 2, true, 0.8).unwrap();
        let brute: Vec<f64> = (1..=8)
            .map(|c| {
                let inside = (2 + 8 - c) % 8 < half;
                pos.weight(c) * if inside { 0.8 } else { 0.2 }
            })
            .collect();
        let total: f64 = brute.iter().sum();
        for (c, w) in brute.iter().enumerate() {
            assert!((p2.weight(c + 1) - w / total).abs() < 1e-12);
        }
    }

    #[test]
    fn circular_noiseless_small() {
        let n = 8;
        let params = SearchParams::new(n, 0.05, NoiseModel::binary(1.0).unwrap()).unwrap();
        for j in 1..=n {
            for shift in 0..2 * n {
                let inner = Mirrored::new(simulated_binary(n, j, 1.0, 0).unwrap());
                let mut w = ShiftWrapped::with_shift(inner, shift).unwrap();
                let out = search_circular(&params, &mut w).unwrap();
                assert_eq!(out.estimated_index, j, "j={j} shift={shift}");
            }
        }
    }
}
