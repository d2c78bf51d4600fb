use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension {dim} is too small, at least {required} is needed")]
    DimensionTooSmall { dim: usize, required: usize },

    #[error("unknown state family `{0}`")]
    UnknownFamily(String),

    #[error("unphysical covariance matrix (det = {det})")]
    UnphysicalCovariance { det: f64 },

    #[error("{what} does not change sign on [{lo}, {hi}]")]
    NoSignChange { what: String, lo: f64, hi: f64 },

    #[error("state has no Wigner negativity without loss")]
    NoInitialNegativity,

    #[error("Wigner negativity persists up to kappa_t = {kappa_t}")]
    ThresholdNotBracketed { kappa_t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
