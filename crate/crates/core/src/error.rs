use thiserror::Error;

use crate::space::Setting;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("conditioning on a null event (probability {probability:e})")]
    ConditioningOnNull { probability: f64 },

    #[error("setting pair ({a}, {b}) has zero weight")]
    NullSetting { a: Setting, b: Setting },

    #[error("one-side marginals differ between blocks by {deviation:e} (tolerance {tolerance:e})")]
    MarginalInconsistency { deviation: f64, tolerance: f64 },

    #[error("empty event stream")]
    EmptyStream,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
