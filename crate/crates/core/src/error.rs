use thiserror::Error;

use crate::profile::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid profile: {}", join_violations(.0))]
    InvalidProfile(Vec<Violation>),
    #[error("invalid cardinal instance: {0}")]
    InvalidCardinal(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty restriction")]
    EmptyRestriction,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("rule `{0}` requires full rankings")]
    RequiresFullRankings(&'static str),
    #[error("instance too large for brute force: {needed} work items exceed budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("divisibility violated: {0}")]
    Divisibility(String),
    #[error("malformed linear program: {0}")]
    MalformedLp(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
