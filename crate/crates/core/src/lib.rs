//! Proper local scoring rules from convex generators, the heavy-tailed prior
//! `a/(a + x)²` that solves the `α(u) = u⁻²` score equation, and the
//! samplers and evaluation tools used to study it.
//!
//! ```
//! use scoreprior::priors::ScorePriorPositive;
//! use scoreprior::scorerule::new_prior_score;
//!
//! let prior = ScorePriorPositive::default();
//! let (q, q1, q2) = prior.derivatives(2.0);
//! assert!(new_prior_score(q, q1, q2).unwrap().abs() < 1e-12);
//! assert!((prior.quantile(0.9).unwrap() - 9.0).abs() < 1e-12);
//! ```

pub mod densities;
pub mod error;
pub mod eval;
pub mod mcmc;
pub mod models;
pub mod priors;
pub mod rng;
pub mod scorerule;
pub mod stats;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/scoring-rules.md")]
    mod scoring_rules {}
    #[doc = include_str!("../../../book/src/score-prior.md")]
    mod score_prior {}
    #[doc = include_str!("../../../book/src/samplers.md")]
    mod samplers {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
}
