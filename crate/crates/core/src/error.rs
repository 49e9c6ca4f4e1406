use thiserror::Error;

/// Errors raised by the transforms, the verification harness and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid grid size: {0}")]
    Size(String),

    #[error("function is not radial: {0}")]
    NotRadial(String),

    #[error("stencil leaves the unit ball at |x| = {norm} with step {step}")]
    StencilOutOfDomain { norm: f64, step: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! domain_err {
    ($($arg:tt)*) => {
        $crate::error::Error::Domain(format!($($arg)*))
    };
}
pub(crate) use domain_err;
