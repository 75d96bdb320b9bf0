//! Seeded posterior samplers.
//!
//! Every sampler is a pure function of its inputs and [`McmcConfig`]: the
//! random stream is `rng::stream(cfg.seed, rng::MCMC_STREAM)`. Proposal scales
//! may adapt during burn-in and are frozen afterwards, so retained draws come
//! from a fixed Metropolis kernel. Positive parameters move on the log scale.

mod chain;
mod hierarchical;
mod metropolis;
mod mixture;

pub use chain::{Chain, McmcConfig, ACCEPTANCE_BAND, DEFAULT_PROPOSAL_SD, TARGET_ACCEPTANCE};
pub use hierarchical::{
    alpha_conditional, hierarchical_sampler, hierarchical_sampler_with, log_marginal_likelihood, mu_conditional,
    mu_marginal, Sweep, VariancePrior,
};
pub use metropolis::rw_metropolis;
pub use mixture::{
    mixture_k, mixture_names, mixture_row_loglik, mwg_mixture, relabel_by_mean, relabel_by_weight,
    MixturePosteriorState, MixturePriors,
};
