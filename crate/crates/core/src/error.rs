use std::io;

use crate::spectrum::ModelKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("mode index must be >= 1 (got {0})")]
    InvalidModeIndex(u32),

    #[error("invalid physical parameters: {0}")]
    InvalidParams(String),

    #[error("invalid packet specification: {0}")]
    InvalidPacket(String),

    #[error("invalid grid specification: {0}")]
    InvalidGrid(String),

    #[error("all mode weights vanish; the packet has no support on the mode window")]
    DegeneratePacket,

    #[error("dimensionless momentum {0} outside [0, 1)")]
    MomentumOutOfRange(f64),

    #[error("{op} does not support model {kind}")]
    UnsupportedModel { op: &'static str, kind: ModelKind },

    #[error("grid of {nz}x{nt} cells exceeds the sizing limit of {limit} cells")]
    GridTooLarge { nz: usize, nt: usize, limit: usize },

    #[error("double-sum oracle limited to {limit} modes (got {modes})")]
    OracleTooLarge { modes: usize, limit: usize },

    #[error("double-sum oracle imaginary residual {residual:e} exceeds 1e-10 of peak {peak:e}")]
    OracleResidual { residual: f64, peak: f64 },

    #[error("empty autocorrelation trace")]
    EmptyTrace,

    #[error("grid specifications differ: {0}")]
    GridMismatch(String),

    #[error("density grid has zero peak")]
    ZeroPeak,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}
