use thiserror::Error;

use crate::experiments::fit::FitResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("ambiguous oracle: context (mu={mu}, nu={nu}) on ancilla {qubit} is shared by several data patterns")]
    AmbiguousOracle { qubit: usize, mu: i32, nu: i32 },

    #[error("carrier {carrier} lies within cutoff {cutoff} of both qubit {first} and qubit {second}")]
    AmbiguousCarrier { carrier: f64, cutoff: f64, first: usize, second: usize },

    #[error("integration failure: norm drifted by {drift:e} during a pulse")]
    Integration { drift: f64 },

    #[error("rejected noise sample: perturbed Rabi frequency {rabi} is not positive")]
    RejectedSample { rabi: f64 },

    #[error("fit did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize, best: Box<FitResult> },

    #[error("degenerate fit data: {0}")]
    DegenerateData(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
