//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tabulated correlation has {got} entries, need {need} for side length {side}")]
    TableLength {
        got: usize,
        need: usize,
        side: usize,
    },

    #[error(
        "target autocorrelation is indefinite: spectrum value {value:.3e} at bin {bin} \
         is below the clip tolerance {tolerance:.3e}"
    )]
    IndefiniteCorrelation {
        value: f64,
        bin: usize,
        tolerance: f64,
    },

    #[error(
        "spectrum of a declared-even correlation has imaginary residue {residual:.3e} \
         (tolerance {tolerance:.3e})"
    )]
    ImaginaryResidue { residual: f64, tolerance: f64 },

    #[error(
        "target is infeasible: coherence exceeds 1 at {violations} bin(s), \
         max coherence {max_coherence:.6}"
    )]
    InfeasibleTarget {
        max_coherence: f64,
        violations: usize,
    },

    #[error("autospectrum is zero at bin {bin} but the cross-spectrum is {cross:.3e} there")]
    ZeroAutoNonzeroCross { bin: usize, cross: f64 },

    #[error("grid mismatch: expected {expected} points, got {got}")]
    GridMismatch { expected: usize, got: usize },

    #[error("array length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error(
        "synthesized output has imaginary residue {residual:.3e} above tolerance {tolerance:.3e}; \
         conjugate symmetry was broken upstream"
    )]
    RealnessResidue { residual: f64, tolerance: f64 },

    #[error(
        "correlation estimate is {value:.3e} at lag {lag} ({which}); \
            log-log fit needs strictly positive values — enlarge the ensemble or shorten the range"
    )]
    NonPositiveCorrelation { which: String, lag: f64, value: f64 },

    #[error("fit range [{lo}, {hi}] is invalid for length {len}: {reason}")]
    FitRange {
        lo: usize,
        hi: usize,
        len: usize,
        reason: String,
    },

    #[error("ensemble is empty")]
    EmptyEnsemble,

    #[error("gamma function pole at argument {argument}; use the fft spectral path instead")]
    GammaPole { argument: f64 },

    #[error("the analytic spectral path only supports power-law targets")]
    AnalyticPathUnsupported,

    #[error("quadrature did not converge for K_{nu}({x})")]
    QuadratureFailed { nu: f64, x: f64 },

    #[error(
        "covariance factorization failed at pivot {pivot} (value {value:.3e}); \
            the target triple is infeasible"
    )]
    FactorizationFailed { pivot: usize, value: f64 },

    #[error("operation requires dimension {need}, grid has dimension {got}")]
    DimensionMismatch { need: usize, got: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed {what}: {detail}")]
    Format { what: String, detail: String },
}

impl Error {
    /// True for errors that mean the requested target cannot be synthesized,
    /// as opposed to i/o or usage problems.
    pub fn is_infeasible_target(&self) -> bool {
        matches!(
            self,
            Error::InfeasibleTarget { .. }
                | Error::IndefiniteCorrelation { .. }
                | Error::ZeroAutoNonzeroCross { .. }
                | Error::FactorizationFailed { .. }
        )
    }
}
