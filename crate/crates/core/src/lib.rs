//! Bayes factors and (luckiness) normalized maximum likelihood for testing
//! the order constraint `θ ≤ z` on a binomial rate against the
//! unconstrained model.
//!
//! Everything is computed exactly over the `N + 1` possible data sets, in
//! log scale. The modules build on each other bottom-up:
//!
//! - [`special`]: log-gamma, log-beta, binomial coefficients, the
//!   regularized incomplete beta function and log-sum-exp.
//! - [`bayes`]: encompassing-prior Bayes factors under uniform and Jeffreys
//!   priors, and posterior model weights.
//! - [`lnml`]: LNML with the luckiness function matched to the uniform
//!   prior, standard NML, and model weights.
//! - [`analysis`]: sweeps over `y`, convergence over `N`, and scans for
//!   data sets on which the two methods disagree.
//! - [`cli`]: the `order-evidence` command-line tool.

pub mod analysis;
pub mod bayes;
pub mod cli;
pub mod data;
pub mod error;
pub mod lnml;
pub mod special;

pub use bayes::{
    bayes_factor, bayes_factor_jeffreys, bayes_factor_uniform, max_constrained_weight,
    posterior_weight, BayesResult,
};
pub use data::{BinomialData, Boundary, PriorFamily};
pub use error::{Error, Result};
pub use lnml::{
    lnml_evidence, lnml_normalizer, lnml_weights, nml_evidence, nml_weights, LnmlResult,
    LnmlWeights, LuckinessSpec, NormalizerCache,
};
pub use special::{BetaParams, LogValue};
