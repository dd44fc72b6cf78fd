//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("geometry mismatch between operands")]
    GeometryMismatch,

    #[error("operation requires a {expected:?}-domain field, got {found:?}")]
    DomainTag {
        expected: crate::field::Domain,
        found: crate::field::Domain,
    },

    #[error("value array has {found} entries, geometry has {expected} lattice sites")]
    Dimension { expected: usize, found: usize },

    #[error(
        "aliasing margin violated in direction {axis}: grid Nyquist {nyquist} < required {required}"
    )]
    AliasingMargin {
        axis: usize,
        nyquist: f64,
        required: f64,
    },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("resource ceiling exceeded: {0}")]
    ResourceCeiling(String),

    #[error("numerical abort: {0}")]
    NumericalAbort(String),

    #[error("fit error: {0}")]
    Fit(String),
}
