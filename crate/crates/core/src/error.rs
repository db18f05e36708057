use thiserror::Error;

use crate::slh::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid dimension in {op}: {detail}")]
    InvalidDimension { op: &'static str, detail: String },

    #[error("matrix is not doubled-up: max deviation {max_deviation:e} exceeds {tol:e}")]
    NotDoubledUp { max_deviation: f64, tol: f64 },

    #[error("model failed validation: {}", summarize(.0))]
    Validation(Vec<Diagnostic>),

    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("internal consistency check failed in {what}: deviation {deviation:e}")]
    InternalConsistency { what: &'static str, deviation: f64 },

    #[error("evaluation point {re}{im:+}i is too close to a pole (pivot ratio {pivot_ratio:e})")]
    PoleProximity { re: f64, im: f64, pivot_ratio: f64 },

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

fn summarize(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

pub(crate) fn dim_err(op: &'static str, detail: impl Into<String>) -> Error {
    Error::InvalidDimension {
        op,
        detail: detail.into(),
    }
}
