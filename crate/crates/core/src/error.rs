//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An exponent left the safe range for `exp` on the natural-log scale.
    #[error("parameter out of range: exponent for {context} is {value}, magnitude exceeds {limit}")]
    ParameterRange {
        context: String,
        value: f64,
        limit: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {actual} for {context}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        actual: usize,
    },

    /// A tetrad operation received an invalid node tuple.
    #[error("invalid tetrad ({i}, {j}, {k}, {l}) for graph with {n} nodes: {reason}")]
    InvalidTetrad {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        n: usize,
        reason: &'static str,
    },

    /// Exhaustive enumeration refused because the graph is too large.
    #[error("naive enumeration refused: n = {n} exceeds the cap of {cap} nodes")]
    NaiveCapExceeded { n: usize, cap: usize },

    /// The contributing-tuple census cannot identify the reciprocity parameter.
    #[error(
        "reciprocity not identified: contributing tuple counts are zero = {n_zero}, \
         plus = {n_plus}, minus = {n_minus}; both an asymmetric-cycle class and a \
         mutual-pair class are required"
    )]
    NotIdentified {
        n_zero: u64,
        n_plus: u64,
        n_minus: u64,
    },

    /// The check-statistic census cannot identify the reciprocity parameter.
    #[error(
        "reciprocity not identified for the check statistic: counts are \
         zero = {n_zero}, one = {n_one}"
    )]
    CheckNotIdentified { n_zero: u64, n_one: u64 },

    #[error("Hessian is rank deficient (condition estimate {condition:.3e} exceeds {limit:.1e})")]
    RankDeficient { condition: f64, limit: f64 },

    /// Full-model likelihood has no finite maximizer.
    #[error(
        "full-model MLE does not exist: parameter {parameter} for node {node} diverged past \
         magnitude {limit}"
    )]
    MleNonExistence {
        node: usize,
        parameter: &'static str,
        limit: f64,
    },

    #[error("fit did not converge after {iterations} iterations (gradient max-norm {gradient_norm:.3e})")]
    NonConvergence {
        iterations: usize,
        gradient_norm: f64,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("not enough successful replicates: have {actual}, need at least {required}")]
    InsufficientReplicates { actual: usize, required: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
