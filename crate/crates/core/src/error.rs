use thiserror::Error;

use crate::lp::LpStatus;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario scales: {0}")]
    InvalidScales(String),

    #[error("docking point initial position must be nonzero")]
    ZeroDockingPoint,

    #[error("horizon {horizon} outside the supported range 1..={max}")]
    HorizonOutOfRange { horizon: usize, max: usize },

    #[error("reference trajectory covers {available} samples past k0, {needed} required")]
    ReferenceTooShort { needed: usize, available: usize },

    /// The LP solver returned something other than Optimal/Infeasible on a
    /// problem whose cost is bounded below by zero.
    #[error("linear program fault at N = {horizon}: solver status {status:?}")]
    LpFault { horizon: usize, status: LpStatus },

    /// A solution accepted by the LP solver failed the forward-propagation
    /// re-check.
    #[error("solution at N = {horizon} failed replay verification: {report}")]
    VerificationFailed { horizon: usize, report: String },

    #[error("scenario field `{field}`: {message}")]
    Scenario { field: String, message: String },

    #[error("malformed scenario document: {0}")]
    ScenarioFormat(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn scenario(field: &str, message: impl Into<String>) -> Self {
        Error::Scenario {
            field: field.to_string(),
            message: message.into(),
        }
    }
}
