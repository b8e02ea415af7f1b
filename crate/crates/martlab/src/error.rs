use thiserror::Error;

/// Errors raised by evaluators, root finders and simulators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: argument {value} outside {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("series truncated after {terms} terms (achieved tolerance {achieved:e})")]
    Truncation { terms: usize, achieved: f64 },
    #[error("{what}: no sign change found on [{lo}, {hi}]")]
    Bracket { what: &'static str, lo: f64, hi: f64 },
    #[error("quadrature did not converge (estimated error {estimate:e})")]
    Quadrature { estimate: f64 },
    #[error("{unstopped} of {n_paths} paths not stopped within {horizon} steps")]
    Unstopped {
        unstopped: usize,
        n_paths: usize,
        horizon: usize,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Error {
    Error::Domain { what, value, domain }
}
