use thiserror::Error;

/// Errors raised by the samplers, simulators and learners.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A dense table or enumeration would exceed the supported size.
    #[error("capacity exceeded: {what} supports n <= {max}, got n = {n}")]
    Capacity {
        what: &'static str,
        n: usize,
        max: usize,
    },

    /// Labels flipped with probability exactly 1/2 are independent of the concept.
    #[error("noise rate 1/2 carries no information about the concept")]
    NoInformation,

    /// An experiment configuration that cannot be run (bad learner/noise pairing, ranges).
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn check_capacity(what: &'static str, n: usize, max: usize) -> Result<()> {
    if n > max {
        Err(Error::Capacity { what, n, max })
    } else {
        Ok(())
    }
}
