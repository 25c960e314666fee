use thiserror::Error;

use crate::problem::ProblemKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A division by t² met a term of exponent below 2; the series does not
    /// behave like `c·t` at the origin.
    #[error("term t^({half_exponent}/2) cannot be divided by t^2")]
    NegativeExponent { half_exponent: u32 },

    #[error("evaluation point t = {t} outside the domain t >= 0")]
    Domain { t: f64 },

    #[error("no real c for {problem} at lambda = {lambda}")]
    NoRealRoot { problem: ProblemKind, lambda: f64 },

    #[error("k = {k} outside the validity range of the {problem} kernel: {reason}")]
    OutOfValidity {
        problem: ProblemKind,
        k: f64,
        reason: &'static str,
    },

    #[error("no admissible upper seed for {problem} at lambda = {lambda} (max {max_lambda})")]
    NoAdmissibleSeed {
        problem: ProblemKind,
        lambda: f64,
        max_lambda: f64,
    },

    #[error("monotone ordering violated at iteration {iteration} by {margin:e} ({which})")]
    OrderingViolation {
        iteration: usize,
        which: &'static str,
        margin: f64,
    },

    #[error("solutions still exist for {problem} at the bracket end lambda = {lambda}")]
    BracketFailure { problem: ProblemKind, lambda: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
