use thiserror::Error;

use crate::codes::CodeFamily;

/// Crate-wide error type. Every fallible operation returns one of these
/// variants; the CLI maps them to exit code 3 (module errors) while input
/// parsing failures map to exit code 2 before any of this is reached.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid of {got} points aliases frequencies up to {needed}; need M >= 2*max|freq|+1 (or a multiple of the cyclic modulus)")]
    Alias { needed: i64, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("enumeration cap exceeded: {context}")]
    CapExceeded {
        context: String,
        /// Relations found before the budget ran out; a valid lower bound.
        partial_count: Option<u128>,
        /// For greedy code search: the family built so far (valid, not maximal).
        partial_family: Option<CodeFamily>,
    },

    #[error("input must have mean zero; got mean {mean:.3e}")]
    MeanNotZero { mean: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("tolerance not met: primal {primal}, dual {dual}, required relative gap {tol}")]
    ToleranceNotMet { primal: f64, dual: f64, tol: f64 },

    #[error("certificate failure: {0}")]
    CertificateFailure(String),
}

impl Error {
    pub fn cap(context: impl Into<String>, partial_count: Option<u128>) -> Self {
        Error::CapExceeded {
            context: context.into(),
            partial_count,
            partial_family: None,
        }
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Stable machine-readable name used in CLI error reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Alias { .. } => "AliasError",
            Error::Domain(_) => "DomainError",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::MeanNotZero { .. } => "MeanNotZero",
            Error::Precondition(_) => "PreconditionError",
            Error::Infeasible(_) => "Infeasible",
            Error::ToleranceNotMet { .. } => "ToleranceNotMet",
            Error::CertificateFailure(_) => "CertificateFailure",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
