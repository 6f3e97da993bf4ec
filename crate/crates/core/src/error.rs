use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// A configuration value violates an invariant of its type.
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },

    /// Light inside the cell hits the exit face beyond the critical angle.
    #[error("total internal reflection: sin(theta) = {sin_theta} exceeds relative index {relative_index}")]
    TotalInternalReflection { sin_theta: f64, relative_index: f64 },

    /// Incidence at exactly pi/2 makes the gain coefficient unbounded.
    #[error("singular incidence angle {0} rad in amplification gain")]
    SingularIncidence(f64),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("refusing to run: {0}")]
    Refused(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors that come from a bad configuration rather than a runtime failure.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation { .. } | Error::Parse { .. })
    }
}
