use crate::kinetics::Evolution;
use crate::units::{Dimension, Unit};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unit {unit:?} measures {expected:?}, but the quantity is a {found:?}")]
    DimensionMismatch {
        unit: Unit,
        expected: Dimension,
        found: Dimension,
    },

    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("unknown builtin species '{0}' (only Na ships built in)")]
    UnknownSpecies(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    /// The short-time stimulated transfer would move more than a tenth of the
    /// condensate.
    #[error("condensate depleted: N_v/N = {ratio:.3e} exceeds 0.1")]
    Depletion { ratio: f64 },

    /// The integrator ran out of steps. The states accepted so far are kept.
    #[error("step limit of {max_steps} reached at t = {t:.6e} (atomic units)")]
    MaxSteps {
        max_steps: usize,
        t: f64,
        partial: Box<Evolution>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed species file: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
