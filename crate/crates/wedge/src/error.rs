use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WedgeError {
    #[error("f is only defined on [0, inf), got u = {0}")]
    Domain(f64),
    #[error("invalid wedge parameter: {0}")]
    InvalidParameter(String),
    #[error("level {j} is never reached by the bounded tabulated function")]
    LevelUnreachable { j: u64 },
    #[error("level {j} lies beyond the exactly representable integer range")]
    LevelOverflow { j: u64 },
    #[error("level asymptotics are only defined for the log-log-log family")]
    NotLogLogLog,
    #[error("wedge would need {vertices} vertices, above the cap of {cap}")]
    Resource { vertices: u64, cap: u64 },
}
