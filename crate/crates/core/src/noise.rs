//! Noise models for comparison and batch oracles.

use crate::bounds::{info_binary, info_kary};
use crate::error::{invalid, Result};

const SUM_TOLERANCE: f64 = 1e-12;

/// How an oracle corrupts its answers.
///
/// `Binary { p }` answers a single comparison correctly with probability `p`.
/// `Kary { probs }` reports part `(j + h) mod (k + 1)` with probability
/// `probs[h]` when the target sits in part `j`; `probs.len() == k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseModel {
    Binary { p: f64 },
    Kary { probs: Vec<f64> },
}

impl NoiseModel {
    pub fn binary(p: f64) -> Result<Self> {
        if !(p > 0.5 && p <= 1.0) {
            return invalid(format!("binary noise needs 1/2 < p <= 1, got {p}"));
        }
        Ok(NoiseModel::Binary { p })
    }

    pub fn kary(probs: Vec<f64>) -> Result<Self> {
        validate_distribution(&probs)?;
        let parts = probs.len() as f64;
        if probs[0] <= 1.0 / parts {
            return invalid(format!(
                "k-ary noise needs p_0 > 1/(k+1) = {:.6}, got {}",
                1.0 / parts,
                probs[0]
            ));
        }
        Ok(NoiseModel::Kary { probs })
    }

    /// Number of splits per query (1 for a plain comparison).
    pub fn k(&self) -> usize {
        self.parts() - 1
    }

    /// Number of answer outcomes, `k + 1`.
    pub fn parts(&self) -> usize {
        match self {
            NoiseModel::Binary { .. } => 2,
            NoiseModel::Kary { probs } => probs.len(),
        }
    }

    /// Outcome shift distribution `p_0..p_k`.
    pub fn probs(&self) -> Vec<f64> {
        match self {
            NoiseModel::Binary { p } => vec![*p, 1.0 - *p],
            NoiseModel::Kary { probs } => probs.clone(),
        }
    }

    /// Probability of reporting the correct part.
    pub fn correct_prob(&self) -> f64 {
        match self {
            NoiseModel::Binary { p } => *p,
            NoiseModel::Kary { probs } => probs[0],
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.correct_prob() >= 1.0
    }

    /// Bits of information carried by one answer at a perfectly balanced split.
    pub fn info_bits(&self) -> f64 {
        match self {
            NoiseModel::Binary { p } => info_binary(*p),
            NoiseModel::Kary { probs } => info_kary(probs),
        }
    }

    /// Likelihood of `outcome` for a target in each part `j = 0..=k`.
    pub fn likelihoods(&self, outcome: usize) -> Vec<f64> {
        likelihoods(&self.probs(), outcome)
    }

    /// Compact form used in CSV output: `p=0.75` or `probs=0.85;0.05;0.05;0.05`.
    pub fn describe(&self) -> String {
        match self {
            NoiseModel::Binary { p } => format!("p={}", format_sig6(*p)),
            NoiseModel::Kary { probs } => {
                let parts: Vec<String> = probs.iter().map(|x| format_sig6(*x)).collect();
                format!("probs={}", parts.join(";"))
            }
        }
    }
}

pub(crate) fn validate_distribution(probs: &[f64]) -> Result<()> {
    if probs.len() < 2 {
        return invalid("a noise distribution needs at least two outcomes");
    }
    if probs.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return invalid("noise probabilities must be finite and non-negative");
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return invalid(format!("noise probabilities sum to {sum}, expected 1"));
    }
    Ok(())
}

pub(crate) fn likelihoods(probs: &[f64], outcome: usize) -> Vec<f64> {
    let parts = probs.len();
    (0..parts)
        .map(|j| probs[(outcome + parts - j) % parts])
        .collect()
}

/// Formats a float with six significant digits and no trailing zeros,
/// like C's `%.6g` for the magnitudes used here.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..6).contains(&exp) {
        let s = format!("{:.5e}", x);
        let (mantissa, e) = s.split_once('e').unwrap();
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
