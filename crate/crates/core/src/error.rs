use thiserror::Error;

pub type Result<T, E = LabError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LabError {
    /// A computation would exceed a configured budget (memory cells,
    /// quadrature panels, enumeration size).
    #[error("{what}: needs {needed}, budget allows {cap}")]
    Resource {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// The inputs are well-formed but the requested quantity does not exist
    /// (e.g. a Hölder weight `omega >= 1`, or a non-negative margin).
    #[error("ill-posed: {0}")]
    IllPosed(String),

    /// A numerical self-check failed, e.g. a residual imaginary part that
    /// should have collapsed.
    #[error("{what}: residual {value:e} exceeds tolerance {tol:e}")]
    Tolerance { what: &'static str, value: f64, tol: f64 },

    #[error("x^k overflowed 128 bits and big-integer fallback is disabled (x = {base}, k = {k})")]
    Overflow { base: u64, k: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LabError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LabError::InvalidParam(msg.into())
    }
}
