use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empirical distribution of an empty history is undefined")]
    EmptyHistory,

    #[error("conditioning set has zero probability")]
    NullConditioning,

    #[error("measures are defined relative to different base measures")]
    MismatchedBase,

    /// A theorem-level hypothesis does not hold for the given model, so the
    /// requested experiment would test nothing.
    #[error("hypothesis not met: {0}")]
    HypothesisUnmet(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot parse set expression {input:?}: {reason}")]
    SetSyntax { input: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
