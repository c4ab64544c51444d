use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The analytic overlap path cannot represent this input; the quadrature
    /// backend must be used instead.
    #[error(
        "not representable analytically: (beta + gamma)/2 = {value:e} is below the threshold {threshold:e}; \
         use the quadrature backend"
    )]
    NotRepresentable { value: f64, threshold: f64 },

    #[error("invalid precision: {0}")]
    Precision(String),

    #[error("assembly disagrees with the quadrature oracle: relative deviation {deviation:e} > {tolerance:e}")]
    FormulaFault { deviation: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
