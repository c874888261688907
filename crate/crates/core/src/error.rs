use thiserror::Error;

/// Errors raised by the simulators and the analytic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("state is not normalized (|norm - 1| = {deviation:e})")]
    InvalidState { deviation: f64 },

    #[error("full-vector simulation of {n_items} items exceeds the cap of {cap}")]
    Capacity { n_items: u64, cap: u64 },

    #[error("state leaves the symmetric subspace (max deviation {max_deviation:e})")]
    SubspaceViolation { max_deviation: f64 },

    #[error("operator-power evolution needs integer iteration counts, got j1 = {j1}, j2 = {j2}")]
    NonIntegerSchedule { j1: f64, j2: f64 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("no sign change of the {what} found in [{lo}, {hi}]")]
    NoRoot { what: &'static str, lo: f64, hi: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{name} = {value} outside [{lo}, {hi}]")]
    Range {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
