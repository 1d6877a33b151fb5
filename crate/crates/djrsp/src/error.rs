//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{context}: expected dimension {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("parameter {name} = {value} outside its domain {domain}")]
    ParameterOutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("post-selection probability below cutoff: the branch is impossible")]
    ZeroProbability,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain<S: crate::scalar::Scalar>(
        name: &'static str,
        value: S,
        domain: &'static str,
    ) -> Self {
        Error::ParameterOutOfDomain {
            name,
            value: value.to_f64().unwrap_or(f64::NAN),
            domain,
        }
    }
}
