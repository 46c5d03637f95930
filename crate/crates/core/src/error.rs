use thiserror::Error;

/// Errors produced by the numeric, graph and coloring layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument was outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A bracketing root search was given endpoints with the same sign.
    #[error("no sign change on [{lo}, {hi}] (values {f_lo}, {f_hi})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// The stationary-point quadratic has no real root.
    #[error("no interior stationary point (discriminant {discriminant})")]
    NoStationaryPoint { discriminant: f64 },

    /// Exact independent-set enumeration was requested above the vertex cap.
    #[error("exact enumeration supports at most {cap} vertices, graph has {n}; use Monte Carlo mode")]
    ExactCapExceeded { n: usize, cap: usize },

    /// The base graph of a coloring contains the clique it must avoid.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A graph, point-cloud or certificate file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
