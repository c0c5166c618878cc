use thiserror::Error;

use crate::model::Violation;

/// Errors raised by the model, the numeric kernels and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("allocation violates {} constraint(s): {}", .0.len(), summarize(.0))]
    Validation(Vec<Violation>),

    #[error("bracket [{lo}, {hi}] does not enclose a sign change (f(lo)={f_lo}, f(hi)={f_hi})")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("ellipsoid lost positive definiteness after {iterations} iterations (best value {best_value})")]
    Degenerate { iterations: usize, best_value: f64 },

    #[error("infeasible: {reason} (diagnostic value {diagnostic})")]
    Infeasible { reason: String, diagnostic: f64 },

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("scenario file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Infeasible { .. })
    }
}

fn summarize(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
