use thiserror::Error;

/// Errors raised by estimators, simulators and the I/O layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series is empty")]
    EmptySeries,

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("lag {lag} requires more than {lag} observations, got {len}")]
    LagTooLarge { lag: usize, len: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("group {group} is degenerate: {reason}")]
    DegenerateGroup { group: usize, reason: String },

    #[error("groups too small: {len} observations in {q} groups give {group_size} per group, need at least {required}")]
    GroupsTooSmall {
        len: usize,
        q: usize,
        group_size: usize,
        required: usize,
    },

    #[error("volatility recursion is not stationary: E[log(alpha Z^2 + beta)] = {log_moment}")]
    NotStationary { log_moment: f64 },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoRoot {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("moment of order {order} does not exist for a t distribution with {dof} degrees of freedom")]
    MomentDiverges { order: f64, dof: f64 },

    #[error("quadrature failed to converge: estimate {estimate}, error {error}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("AR(1) plug-in coefficient {rho} is too close to a unit root")]
    NearUnitRoot { rho: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error("data error at row {row}, column `{column}`: {reason}")]
    Data {
        row: usize,
        column: String,
        reason: String,
    },

    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Process exit code used by the CLI: 1 usage/config, 2 data, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. } | Error::Config { .. } => 1,
            Error::EmptySeries
            | Error::NonFinite { .. }
            | Error::LagTooLarge { .. }
            | Error::GroupsTooSmall { .. }
            | Error::Data { .. }
            | Error::Io(_) => 2,
            Error::Degenerate(_)
            | Error::DegenerateGroup { .. }
            | Error::NotStationary { .. }
            | Error::NoRoot { .. }
            | Error::MomentDiverges { .. }
            | Error::Quadrature { .. }
            | Error::NearUnitRoot { .. }
            | Error::Numerical(_) => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
