use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be at least 1")]
    ZeroCycles { name: &'static str },

    #[error("invalid bit value {0}, expected 0 or 1")]
    InvalidBit(u8),

    #[error("{name} = {value} lies outside [0, 1]")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },

    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("blocking schedule is {got_outer}x{got_inner}, expected {outer}x{inner}")]
    ScheduleShape {
        outer: usize,
        inner: usize,
        got_outer: usize,
        got_inner: usize,
    },

    #[error("inner chain needs {expected} channel passes, got {got}")]
    PassCount { expected: usize, got: usize },

    #[error("trial count must be at least 1")]
    ZeroTrials,

    #[error("message has no bits")]
    EmptyMessage,

    #[error("joint click table is invalid: {0}")]
    InvalidStatistics(String),

    #[error("mutual information undefined: wrong-click mass {wrong} at {detector} but its click marginal is zero")]
    MutualInformationDomain { detector: &'static str, wrong: f64 },

    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
}
