//! Noisy binary search with a Bayesian learner.
//!
//! The searcher keeps a posterior over the `n` possible positions of a
//! hidden index, always asks the comparison that splits the posterior most
//! evenly, and updates by Bayes's rule. Queries needed are close to
//! `log2(n) / I(p)`, where `I(p) = 1 - H(p)` is the information in one
//! answer that is correct with probability `p`.
//!
//! ```
//! use noisy_bisect::{search_binary, simulated_binary, NoiseModel, SearchParams};
//!
//! let params = SearchParams::new(1024, 0.05, NoiseModel::binary(0.8)?)?;
//! let mut oracle = simulated_binary(1024, 700, 0.8, 1)?;
//! let outcome = search_binary(&params, &mut oracle)?;
//! println!("found {} after {} queries", outcome.estimated_index, outcome.queries_used);
//! # Ok::<(), noisy_bisect::Error>(())
//! ```

pub mod bounds;
pub mod error;
pub mod harness;
pub mod noise;
pub mod oracles;
pub mod posterior;
pub mod search;

pub use error::{Error, Result};
pub use noise::NoiseModel;
pub use oracles::{
    coin_effective_p, coin_pair_oracle, shift_wrapped, simulated_binary, simulated_kary, BatchOracle,
    CircularOracle, CoinListOracle, ComparisonOracle, Mirrored, ShiftWrapped,
};
pub use posterior::{Posterior, Segment};
pub use search::{
    localize_radius, search_binary, search_circular, search_kary, HaltReason, Overrides, Phase, QueryRecord,
    RadiusMode, SearchOutcome, SearchParams,
};
