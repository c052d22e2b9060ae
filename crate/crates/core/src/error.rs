use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("enumeration budget exceeded: {needed} steps requested, budget is {budget}")]
    BudgetExceeded { needed: usize, budget: usize },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("disorder word too short: need {needed} letters, have {have}")]
    DisorderTooShort { needed: usize, have: usize },

    #[error("no lattice path realises the requested column crossing")]
    EmptyPathSet,

    #[error("interface table has not been built")]
    TableMissing,

    #[error("malformed column window: {0}")]
    MalformedWindow(String),

    #[error("no feasible speed profile gives a positive ratio")]
    NonPositive,

    #[error("fixed-point iteration did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    #[error("no menu atom realises {0}")]
    MenuMismatch(String),

    #[error("family has no member with zero B-mass")]
    EmptySaturatedFamily,

    #[error("no sign change between {lo} and {hi}")]
    NoCrossing { lo: f64, hi: f64 },

    #[error("interface table saturated at mu = {0}")]
    TableSaturation(f64),

    #[error("crossing not resolved at this sample budget, bracket [{lo}, {hi}]")]
    StatisticallyUndecided { lo: f64, hi: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
