//! Error type shared by every module of the crate.
//!
//! Divergent integrals and infinite norms are not errors; they are carried as
//! values by [`crate::quad::IntegralValue`] and [`crate::spaces::NormValue`].
//! The variants here cover genuine misuse (bad arguments, unsupported
//! dimensions) and numerical failure (quadrature budget exhausted, fits that
//! cannot be performed).

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scale function was evaluated at `t <= 0`.
    #[error("scale functions are defined on t > 0, got t = {0}")]
    NonPositiveArgument(f64),

    /// A tabulated scale was evaluated outside its table range.
    #[error("argument {t} outside tabulated range [{lo}, {hi}]")]
    OutOfTableRange { t: f64, lo: f64, hi: f64 },

    /// A function was evaluated exactly at a point where it is unbounded.
    #[error("evaluation at a singular point of the function")]
    SingularPoint,

    /// Monte-Carlo sampling and non-radial center searches support n <= 3.
    #[error("dimension n = {0} not supported by this operation (max 3)")]
    DimensionTooLarge(u32),

    /// Adaptive quadrature did not reach the requested tolerance within its
    /// panel budget.
    #[error("adaptive quadrature failed to converge (estimate {estimate}, error {error})")]
    NonconvergentQuadrature { estimate: f64, error: f64 },

    /// An operation that needs finite curve values was handed a curve with
    /// divergent entries.
    #[error("operation undefined on a curve with divergent entries")]
    UndefinedOnDivergent,

    /// A run configuration misses a parameter required by the command.
    #[error("missing parameter: {0}")]
    MissingParameter(String),

    /// A descriptor violates a structural invariant (e.g. log factors with
    /// unbounded support).
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),

    /// A quantitative verification was requested for parameters that fail
    /// the hypothesis checklist of the statement being verified.
    #[error("hypotheses not satisfied: {0}")]
    InapplicableHypotheses(String),

    /// Envelope fitting needs at least four finite positive curve values.
    #[error("modulus curve has too few finite positive values to fit")]
    UnfittableCurve,

    /// An envelope fit was too poor to justify a prediction.
    #[error("envelope fit residual {residual} exceeds the acceptance threshold {threshold}")]
    ResidualTooLarge { residual: f64, threshold: f64 },
}
