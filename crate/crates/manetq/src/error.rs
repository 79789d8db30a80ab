//! Error types shared across the crate.

/// Errors produced by the library and surfaced through the CLI.
///
/// The CLI maps variants to exit codes: [`Error::Parse`] exits 1,
/// [`Error::InvalidParameter`], [`Error::Domain`] and [`Error::Regime`]
/// exit 2, [`Error::Infeasible`] exits 3.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Input text does not match the expected grammar.
    #[error("parse error: {0}")]
    Parse(String),

    /// A value is outside its type's invariants (non-positive range, zero
    /// denominator, trial count of zero, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The operation is not defined for these inputs (e.g. vulnerability
    /// needs n >= 2 and rho < 1/2).
    #[error("domain error: {0}")]
    Domain(String),

    /// A metric was paired with the wrong asymptotic regime.
    #[error("regime mismatch: {0}")]
    Regime(String),

    /// An inversion target cannot be met; `limit` is the attainable extreme.
    #[error("infeasible target: {reason} (attainable limit {limit})")]
    Infeasible { limit: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
