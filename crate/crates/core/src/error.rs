use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("metric function is not positive at node {node} (f = {value})")]
    NonPositiveMetric { node: usize, value: f64 },

    #[error("metric is not positive definite at node {node}")]
    NotPositiveDefinite { node: usize },

    #[error("need at least {needed} snapshots, trajectory has {found}")]
    TooFewSnapshots { needed: usize, found: usize },

    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("target {target} exceeds the integral over the whole grid ({available})")]
    TargetNotBracketed { target: f64, available: f64 },

    #[error("grid spans only {found} dyadic annuli, need at least {needed}")]
    InsufficientSpan { needed: usize, found: usize },

    #[error("norm order k = {0} is not supported (k <= 2)")]
    UnsupportedOrder(u8),

    #[error("profile radius {available} does not cover the required radius {required}")]
    Coverage { required: f64, available: f64 },

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
}
