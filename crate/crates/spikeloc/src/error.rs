//! Crate-wide error type.

use std::fmt;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid configuration or parameter value.
    Config(String),
    /// Malformed, missing, or inconsistent data (files, headers, payloads).
    Data(String),
    /// Tensor/layer shape mismatch.
    Shape(String),
    /// Numeric failure (non-finite loss, degenerate geometry).
    Numeric(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Data(msg) => write!(f, "data error: {msg}"),
            Error::Shape(msg) => write!(f, "shape error: {msg}"),
            Error::Numeric(msg) => write!(f, "numeric error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Data(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
