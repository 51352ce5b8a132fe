//! Segmented Bayesian posterior over the `n` candidate cells.
//!
//! Cell `i` (1-based) holds the probability that the target sits between
//! `x_i` and `x_{i+1}`. Cells that no query has ever separated share a
//! weight, so the posterior is stored as an ordered list of constant-weight
//! segments. After `t` binary updates there are at most `t + 1` segments,
//! which keeps every operation linear in the number of queries asked rather
//! than in `n`.
//!
//! A split index `i` divides the cells into `1..=i` and `i+1..=n`. Answer
//! (or outcome) `0` means "the target is in the left part".

use crate::error::{invalid, Error, Result};
use crate::noise::{likelihoods, validate_distribution};

/// Normalization tolerance maintained after every public operation.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// A maximal run of cells `start..=end` sharing `weight` per cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub weight: f64,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mass(&self) -> f64 {
        self.len() as f64 * self.weight
    }
}

/// Posterior over `n` cells. Cells not covered by any segment have weight 0
/// (this only happens with noiseless answers or after [`Posterior::restrict`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    n: usize,
    segments: Vec<Segment>,
    total_weight: f64,
}

impl Posterior {
    pub fn new_uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("posterior needs at least one cell");
        }
        Ok(Posterior {
            n,
            segments: vec![Segment {
                start: 1,
                end: n,
                weight: 1.0 / n as f64,
            }],
            total_weight: 1.0,
        })
    }

    /// Builds a posterior from explicit cell weights (normalized here).
    /// Consecutive equal weights are merged into one segment.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return invalid("posterior needs at least one cell");
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return invalid("cell weights must be finite and non-negative");
        }
        let mut segments: Vec<Segment> = Vec::new();
        for (idx, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let cell = idx + 1;
            match segments.last_mut() {
                Some(last) if last.end + 1 == cell && last.weight == w => last.end = cell,
                _ => segments.push(Segment {
                    start: cell,
                    end: cell,
                    weight: w,
                }),
            }
        }
        let mut pos = Posterior {
            n: weights.len(),
            segments,
            total_weight: 0.0,
        };
        pos.normalize()?;
        Ok(pos)
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Weight of a single cell.
    pub fn weight(&self, cell: usize) -> f64 {
        let idx = self.segments.partition_point(|s| s.end < cell);
        match self.segments.get(idx) {
            Some(seg) if seg.start <= cell => seg.weight,
            _ => 0.0,
        }
    }

    /// All cell weights, densely. Intended for tests and small `n`.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for seg in &self.segments {
            out[seg.start - 1..seg.end].fill(seg.weight);
        }
        out
    }

    /// `a_1 + ... + a_i`; `i = 0` gives 0.
    pub fn prefix_sum(&self, i: usize) -> Result<f64> {
        if i > self.n {
            return invalid(format!("prefix index {i} exceeds n = {}", self.n));
        }
        Ok(self.prefix_unchecked(i))
    }

    // Accumulation order here must match `max_index_below`.
    pub(crate) fn prefix_unchecked(&self, i: usize) -> f64 {
        let mut cum = 0.0;
        for seg in &self.segments {
            if i < seg.start {
                return cum;
            }
            if i <= seg.end {
                return cum + (i - seg.start + 1) as f64 * seg.weight;
            }
            cum += seg.mass();
        }
        cum
    }

    /// Largest `i` in `0..=n` with `prefix_sum(i) < target`.
    pub(crate) fn max_index_below(&self, target: f64) -> usize {
        let mut cum = 0.0;
        let mut best = 0;
        for seg in &self.segments {
            if cum < target {
                best = seg.start - 1;
            } else {
                return best;
            }
            let len = seg.len() as i64;
            let w = seg.weight;
            let mut m = (((target - cum) / w).ceil() as i64 - 1).clamp(0, len);
            while m < len && cum + (m + 1) as f64 * w < target {
                m += 1;
            }
            while m > 0 && cum + m as f64 * w >= target {
                m -= 1;
            }
            if m > 0 {
                best = seg.start + m as usize - 1;
            }
            cum += seg.mass();
        }
        if cum < target {
            best = self.n;
        }
        best
    }

    /// Largest `i` with `prefix_sum(i) < 1/2`. Provided no cell weighs
    /// `eps_par` or more, that prefix is at least `1/2 - eps_par`; a result
    /// outside that band (or outside `1..n`) is reported as a contract
    /// violation.
    pub fn find_split(&self, eps_par: f64) -> Result<usize> {
        let i = self.max_index_below(0.5);
        if i == 0 || i >= self.n {
            return Err(Error::ContractViolation(format!(
                "no interior split with prefix below 1/2 (got index {i} of {})",
                self.n
            )));
        }
        let q = self.prefix_unchecked(i);
        if q < 0.5 - eps_par {
            return Err(Error::ContractViolation(format!(
                "split {i} has prefix {q} < 1/2 - eps_par; a cell of weight >= {eps_par} exists"
            )));
        }
        Ok(i)
    }

    /// `k` strictly increasing split indices dividing the cells into `k + 1`
    /// parts of mass `1/(k+1) ± eps_par` each.
    ///
    /// For `k = 1` this is exactly [`Posterior::find_split`]. For `k >= 2`
    /// every split is placed at the boundary whose prefix is nearest to
    /// `j/(k+1)` (ties to the smaller index).
    pub fn find_k_splits(&self, k: usize, eps_par: f64) -> Result<Vec<usize>> {
        if k == 0 {
            return invalid("k must be at least 1");
        }
        if k + 1 > self.n {
            return invalid(format!("{} parts need at least {} cells", k + 1, k + 1));
        }
        if k == 1 {
            return Ok(vec![self.find_split(eps_par)?]);
        }
        let parts = (k + 1) as f64;
        let mut splits = Vec::with_capacity(k);
        let mut prev = 0;
        for j in 1..=k {
            let target = j as f64 / parts;
            let lo = prev + 1;
            let hi = self.n - 1 - (k - j);
            let below = self.max_index_below(target);
            let a = below.clamp(lo, hi);
            let b = (below + 1).clamp(lo, hi);
            let da = (self.prefix_unchecked(a) - target).abs();
            let db = (self.prefix_unchecked(b) - target).abs();
            let pick = if db < da { b } else { a };
            splits.push(pick);
            prev = pick;
        }
        let ideal = 1.0 / parts;
        let mut last = 0.0;
        for (j, &s) in splits.iter().chain(std::iter::once(&self.n)).enumerate() {
            let pre = self.prefix_unchecked(s);
            let mass = pre - last;
            if (mass - ideal).abs() > eps_par + 1e-12 {
                return Err(Error::ContractViolation(format!(
                    "part {j} has mass {mass}, more than eps_par = {eps_par} away from {ideal}"
                )));
            }
            last = pre;
        }
        Ok(splits)
    }

    /// Bayes update after comparing at split `i`: answer 0 scales cells
    /// `1..=i` by `p` and the rest by `1 - p`; answer 1 the other way round.
    pub fn update_binary(&mut self, i: usize, answer: u8, p: f64) -> Result<()> {
        if i == 0 || i >= self.n {
            return invalid(format!("split {i} outside 1..{}", self.n));
        }
        if !(0.5..=1.0).contains(&p) {
            return invalid(format!("p must lie in [1/2, 1], got {p}"));
        }
        let factors = match answer {
            0 => [p, 1.0 - p],
            1 => [1.0 - p, p],
            _ => return invalid(format!("binary answer must be 0 or 1, got {answer}")),
        };
        self.scale_parts(&[i], &factors)
    }

    /// Bayes update after a batch query: cells of part `j` are scaled by
    /// `probs[(answer - j) mod (k+1)]`.
    pub fn update_kary(&mut self, splits: &[usize], answer: usize, probs: &[f64]) -> Result<()> {
        validate_distribution(probs)?;
        if splits.len() + 1 != probs.len() {
            return invalid(format!(
                "{} splits do not match {} outcome probabilities",
                splits.len(),
                probs.len()
            ));
        }
        if answer >= probs.len() {
            return invalid(format!("answer {answer} outside 0..{}", probs.len()));
        }
        self.validate_splits(splits)?;
        self.scale_parts(splits, &likelihoods(probs, answer))
    }

    pub(crate) fn validate_splits(&self, splits: &[usize]) -> Result<()> {
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
        Ok(())
    }

    /// Multiplies part `j` (cells between `boundaries[j-1]` and
    /// `boundaries[j]`) by `factors[j]`, drops zeroed segments and
    /// renormalizes. Boundaries must be strictly increasing in `1..n`.
    pub(crate) fn scale_parts(&mut self, boundaries: &[usize], factors: &[f64]) -> Result<()> {
        debug_assert_eq!(boundaries.len() + 1, factors.len());
        let mut out = Vec::with_capacity(self.segments.len() + boundaries.len());
        let mut part = 0;
        for seg in &self.segments {
            let mut start = seg.start;
            while start <= seg.end {
                while part < boundaries.len() && boundaries[part] < start {
                    part += 1;
                }
                let end = match boundaries.get(part) {
                    Some(&b) if b < seg.end => b,
                    _ => seg.end,
                };
                let weight = seg.weight * factors[part];
                if weight > 0.0 {
                    out.push(Segment { start, end, weight });
                }
                start = end + 1;
            }
        }
        let total: f64 = out.iter().map(Segment::mass).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::ContractViolation(
                "update removed all posterior mass (answers inconsistent with a noiseless model)"
                    .into(),
            ));
        }
        self.segments = out;
        self.normalize()
    }

    fn normalize(&mut self) -> Result<()> {
        let total: f64 = self.segments.iter().map(Segment::mass).sum();
        if !(total > 0.0) || !total.is_finite() {
            return invalid("posterior has no mass");
        }
        for seg in &mut self.segments {
            seg.weight /= total;
        }
        self.segments.retain(|s| s.weight > 0.0);
        self.total_weight = self.segments.iter().map(Segment::mass).sum();
        Ok(())
    }

    /// Heaviest cell and its weight; ties go to the smallest index.
    pub fn max_cell(&self) -> (usize, f64) {
        let mut best = (self.segments[0].start, self.segments[0].weight);
        for seg in &self.segments[1..] {
            if seg.weight > best.1 {
                best = (seg.start, seg.weight);
            }
        }
        best
    }

    /// Shannon entropy in bits, with `0 log 0 = 0`.
    pub fn entropy(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| -(s.len() as f64) * s.weight * s.weight.log2())
            .sum()
    }

    /// `log2(n) - entropy`.
    pub fn information(&self) -> f64 {
        (self.n as f64).log2() - self.entropy()
    }

    /// Posterior conditioned on the target lying in `lo..=hi`.
    pub fn restrict(&self, lo: usize, hi: usize) -> Result<Posterior> {
        if lo == 0 || lo > hi || hi > self.n {
            return invalid(format!("range {lo}..={hi} is not within 1..={}", self.n));
        }
        let segments: Vec<Segment> = self
            .segments
            .iter()
            .filter(|s| s.end >= lo && s.start <= hi)
            .map(|s| Segment {
                start: s.start.max(lo),
                end: s.end.min(hi),
                weight: s.weight,
            })
            .collect();
        let mut pos = Posterior {
            n: self.n,
            segments,
            total_weight: 0.0,
        };
        pos.normalize()?;
        Ok(pos)
    }
}
