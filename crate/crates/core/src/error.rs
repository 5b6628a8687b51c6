use alloc::string::String;

/// Errors raised by the geometry kernel, the relation computations and the planner.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate mesh: {0}")]
    DegenerateMesh(String),

    #[error("non-finite coordinate in mesh")]
    NonFinite,

    #[error("triangle index {index} out of range for {vertex_count} vertices")]
    IndexOutOfRange { index: u32, vertex_count: usize },

    #[error("enclosed volume is not positive ({0}); mesh is not watertight")]
    NonPositiveVolume(f64),

    #[error("invalid part '{id}': {reason}")]
    InvalidPart { id: String, reason: String },

    #[error("invalid assembly: {0}")]
    InvalidAssembly(String),

    #[error("invalid orientation: {0}")]
    InvalidOrientation(String),

    #[error("invalid sweep parameters: {0}")]
    InvalidSweep(String),

    #[error("matrix dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("unknown entity '{0}'")]
    UnknownEntity(String),

    #[error("invalid assembly sequence: {0}")]
    InvalidSequence(String),

    #[error("no reachable direction is set")]
    NoReachableDirection,

    #[error("unsupported direction: {0}")]
    UnsupportedDirection(String),

    #[error("non-finite force sample")]
    NonFiniteForce,

    #[error("empty force series")]
    EmptySeries,

    #[error("invalid jig observation: {0}")]
    InvalidObservation(String),

    #[error("jig width must be positive, got {0}")]
    NonPositiveWidth(f64),
}

pub type Result<T> = core::result::Result<T, Error>;
