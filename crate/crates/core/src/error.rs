use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("incompatible grids")]
    IncompatibleGrids,

    #[error("closed form unavailable for the {0} model")]
    ClosedFormUnavailable(&'static str),

    #[error("non-Hermitian kernel: imaginary residue {imag:e} against real part {real:e}")]
    NonHermitianKernel { real: f64, imag: f64 },

    #[error("enumeration refused: {steps} steps exceeds the limit of {limit}")]
    EnumerationRefused { steps: usize, limit: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("point ({x}, {p}) lies outside the grid window")]
    OutsideWindow { x: f64, p: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("target support exceeds the grid window")]
    SupportExceedsWindow,

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("resource guard exceeded: {0}")]
    ResourceGuard(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
