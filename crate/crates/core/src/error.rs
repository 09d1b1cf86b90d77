use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distribution has zero total mass")]
    ZeroMass,

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A symbol did not fit the expected index pattern. Seeing this means a
    /// constructor produced something it should not have.
    #[error("unexpected distribution structure: {0}")]
    Structure(String),

    #[error("condition ratio does not bracket 1 on [{lo}, {hi}] (ratios {ratio_lo}, {ratio_hi})")]
    Bracket {
        lo: f64,
        hi: f64,
        ratio_lo: f64,
        ratio_hi: f64,
    },

    #[error("projection has zero mass")]
    DegenerateProjection,

    #[error("simulation needed more than {cap} raw blocks to collect {wanted} accepted blocks")]
    SimulationCap { cap: u64, wanted: u64 },

    #[error("parse error: {0}")]
    Parse(String),
}
