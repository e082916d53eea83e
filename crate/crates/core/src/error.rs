use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A denominator factor vanished (or came within the pole margin).
    #[error("pole: {0}")]
    Pole(String),

    /// Operation not available in the requested arithmetic mode.
    #[error("mode: {0}")]
    Mode(String),

    #[error("series did not converge: {0}")]
    Nonconvergence(String),

    /// Input outside the set where the formula is defined at all.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("sampling exhausted after {attempts} attempts for {id}: {last}")]
    SamplingExhausted {
        id: String,
        attempts: usize,
        last: String,
    },

    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A report could not be serialised or parsed.
    #[error("report: {0}")]
    Report(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
