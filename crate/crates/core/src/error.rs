use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid mode index {0}; modes are numbered 1, 2 and 3")]
    InvalidMode(usize),
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("invalid projector: {0}")]
    InvalidProjector(String),
    #[error("zero tensor")]
    ZeroTensor,
    #[error("degenerate projected matrix")]
    DegenerateProjection,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid availability mask: {0}")]
    InvalidMask(String),
    #[error("unknown scale `{0}`")]
    UnknownScale(String),
    #[error("no linear association between factors and trait")]
    NoAssociation,
    #[error("singular system: {0}")]
    Singular(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("eigenvalue iteration failed to converge")]
    NoConvergence,
}

pub type Result<T> = core::result::Result<T, Error>;
