use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input `{key}`: {reason}")]
    InvalidInput { key: String, reason: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("linear system is numerically singular ({0})")]
    SingularSystem(String),

    #[error("system is not asymptotically stable")]
    Unstable,

    #[error("system is not minimal (Gramian eigenvalue ratio {ratio:.3e})")]
    NotMinimal { ratio: f64 },

    #[error("s = {re} + {im}i is a pole of the system")]
    PoleHit { re: f64, im: f64 },

    #[error("Hankel singular values {i} and {j} are not distinct")]
    DegenerateHsv { i: usize, j: usize },

    #[error("realization is not balanced: Lemma-1 deviation {deviation:.3e}")]
    NotBalanced { deviation: f64 },

    #[error("row {0} of B has (near) zero norm")]
    ZeroRow(usize),

    #[error("cannot remove {k} states from an order-{n} system")]
    BadOrder { k: usize, n: usize },

    #[error("the trailing A22 block is singular")]
    SingularA22,

    #[error("eta[{index}] = {eta} outside [0, {theta}]")]
    EtaOutOfRange { index: usize, eta: f64, theta: f64 },

    #[error("parameter {index} = {value} leaves the model domain")]
    DomainViolation { index: usize, value: f64 },

    #[error("Fisher information is singular (condition {condition:.3e})")]
    SingularFim { condition: f64 },

    #[error("integration step size underflow at t = {t}")]
    StepFailure { t: f64 },

    #[error("ODE integration failed: {0}")]
    IntegrationFailure(String),

    #[error("geodesic trace is inconclusive: {0}")]
    Inconclusive(String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// `true` for errors caused by bad user input rather than numerical trouble.
    pub fn is_user_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput { .. }
                | Error::Dimension(_)
                | Error::Unstable
                | Error::NotMinimal { .. }
                | Error::DegenerateHsv { .. }
                | Error::NotBalanced { .. }
                | Error::BadOrder { .. }
                | Error::EtaOutOfRange { .. }
                | Error::DomainViolation { .. }
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::invalid("json", e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
