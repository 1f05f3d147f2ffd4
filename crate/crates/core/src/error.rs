use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("chart degeneracy: {0}")]
    ChartDegeneracy(String),

    #[error("grid too coarse: {0}")]
    Refinement(String),

    #[error("radiation-field extrapolation did not converge: spread {spread:.3e} exceeds {tolerance:.3e}")]
    Extrapolation { spread: f64, tolerance: f64 },

    #[error("boundary data outside S(scri): {0}")]
    Membership(String),

    #[error("kernel routes disagree: regularized {regularized} vs frequency {frequency}")]
    RouteDisagreement {
        regularized: num_complex::Complex64,
        frequency: num_complex::Complex64,
    },

    #[error("pole of the Mobius map at z = {0}")]
    MobiusPole(num_complex::Complex64),

    #[error("generator kinds do not match: {0} vs {1}")]
    KindMismatch(String, String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("unsupported configuration: {0}")]
    Config(String),

    #[error("unknown suite `{name}`; available: {available}")]
    UnknownSuite { name: String, available: String },

    #[error("io: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
