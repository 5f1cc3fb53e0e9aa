//! Estimation of covariate-driven reciprocity in sparse directed networks.
//!
//! The model treats each unordered node pair as an independent four-outcome
//! dyad whose mutual-link log-odds are `rho + V' gamma`, on top of a global
//! density level and free per-node sender/receiver effects. Those nuisance
//! effects are eliminated by conditioning on the bi-degree sequence, which
//! reduces inference for `(rho, gamma)` to a likelihood over informative
//! four-node configurations. The crate provides:
//!
//! * the dyad model, a seeded sampler, and degree summaries ([`graph`]);
//! * classification and fast enumeration of informative tetrads ([`tetrad`]);
//! * the conditional negative log-likelihood with analytic gradient and
//!   Hessian ([`likelihood`]);
//! * Newton fitting, a closed-form no-covariate estimate, an alternative
//!   check-statistic estimator, and a full-model MLE baseline ([`estimate`]);
//! * projected-score sandwich covariance and confidence intervals
//!   ([`inference`]);
//! * a replication harness with coverage / error / QQ metrics ([`sim`]);
//! * text file formats and report round-tripping ([`fileio`]).
//!
//! Heavy loops run data-parallel under the default `parallel` feature and
//! fall back to sequential execution without it; outputs are bitwise
//! identical either way.

pub mod error;
mod exec;
pub mod fileio;
pub mod graph;
pub mod inference;
pub mod likelihood;
pub mod sim;
pub mod tetrad;

pub mod estimate;

pub use error::{Error, Result};
pub use graph::{
    degree_sequences, dyad_probabilities, sample_network, DegreeSummary, DirectedGraph, DyadState,
    EdgeCovariates, FullParams, GlobalParams,
};
pub use tetrad::{
    census, check_census, classify, classify_check, enumerate_contributing, enumerate_naive,
    CheckCensus, CheckTetradClass, ContributingTetrad, TetradCensus, TetradClass,
};
