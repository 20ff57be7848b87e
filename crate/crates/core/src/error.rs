use std::path::PathBuf;
use std::sync::Arc;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("wavelength {wavelength_um} um is outside the transparency window of {material} ({min_um}..{max_um} um)")]
    OutOfWindow {
        material: String,
        wavelength_um: f64,
        min_um: f64,
        max_um: f64,
    },
    #[error("frequency must be positive, got {0} rad/s")]
    NonPositiveFrequency(f64),
    #[error("matrix is not symmetric (max |F - F^T| = {defect:e})")]
    NotSymmetric { defect: f64 },
    #[error("factorization did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("quadrature did not reach tolerance (estimated error {estimate:e}, requested {requested:e})")]
    QuadratureNotConverged { estimate: f64, requested: f64 },
    #[error("every retained mode has zero gain")]
    AllModesVacuum,
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("spectrum already carries the detection correction")]
    AlreadyCorrected,
    #[error("signal never falls below half maximum inside the window")]
    NoCrossing,
    #[error("spectral component `{0}` is identically zero")]
    ComponentEmpty(&'static str),
    #[error("found {found} fringe maxima in band, need at least 3")]
    TooFewFringes { found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse {
        line: Option<usize>,
        message: String,
    },
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },
    // the cause is part of the message, so it is not chained as a source
    #[error("{path}: {cause}")]
    Io {
        path: PathBuf,
        cause: Arc<std::io::Error>,
    },
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            cause: Arc::new(source),
        }
    }

    /// Configuration problems (bad files, bad values) as opposed to numerical failures.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Validation { .. } | Error::Io { .. }
        )
    }

    /// Short stable identifier used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OutOfWindow { .. } => "OutOfWindow",
            Error::NonPositiveFrequency(_) => "NonPositiveFrequency",
            Error::NotSymmetric { .. } => "NotSymmetric",
            Error::ConvergenceFailure(_) => "ConvergenceFailure",
            Error::QuadratureNotConverged { .. } => "QuadratureNotConverged",
            Error::AllModesVacuum => "AllModesVacuum",
            Error::GridMismatch(_) => "GridMismatch",
            Error::AlreadyCorrected => "AlreadyCorrected",
            Error::NoCrossing => "NoCrossing",
            Error::ComponentEmpty(_) => "ComponentEmpty",
            Error::TooFewFringes { .. } => "TooFewFringes",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Parse { .. } => "ParseError",
            Error::Validation { .. } => "ValidationError",
            Error::Io { .. } => "IoError",
        }
    }
}
