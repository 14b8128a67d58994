use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// One or more parameter invariants are violated.
    #[error("invalid parameters: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("unyielded channel: wall stress {tau_w} Pa does not exceed yield stress {tau_y} Pa")]
    Unyielded { tau_y: f64, tau_w: f64 },

    #[error("waveform: {0}")]
    Waveform(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
