use thiserror::Error;

/// Failure of a run, classified by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or parameters: exit 1.
    #[error("{0}")]
    Validation(String),
    /// Memory cap, infeasible sizes, I/O: exit 2.
    #[error("{0}")]
    Resource(String),
    /// A statistical acceptance check failed under `--strict`: exit 3.
    #[error("{0}")]
    Statistical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Resource(_) => 2,
            CliError::Statistical(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Resource(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Validation(format!("bad JSON: {e}"))
    }
}

impl From<wedge::WedgeError> for CliError {
    fn from(e: wedge::WedgeError) -> Self {
        match e {
            wedge::WedgeError::Resource { .. } | wedge::WedgeError::LevelOverflow { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<randomness::ModelError> for CliError {
    fn from(e: randomness::ModelError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<fpp_core::FppError> for CliError {
    fn from(e: fpp_core::FppError) -> Self {
        match e {
            fpp_core::FppError::Wedge(w) => w.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<perc_stats::PercError> for CliError {
    fn from(e: perc_stats::PercError) -> Self {
        match e {
            perc_stats::PercError::InvalidParameter(m) => CliError::Validation(m),
            other => CliError::Statistical(other.to_string()),
        }
    }
}

impl From<sequences::SeqError> for CliError {
    fn from(e: sequences::SeqError) -> Self {
        match e {
            sequences::SeqError::Wedge(w) => w.into(),
            sequences::SeqError::Exhausted { .. } => CliError::Resource(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<regimes::RegimeError> for CliError {
    fn from(e: regimes::RegimeError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<martingale::MartError> for CliError {
    fn from(e: martingale::MartError) -> Self {
        use martingale::MartError as M;
        match e {
            M::Wedge(w) => w.into(),
            M::Sequence(s) => s.into(),
            M::InvalidParameter(m) => CliError::Validation(m),
            M::CapExceeded { .. } | M::SequenceTooShort { .. } => CliError::Resource(e.to_string()),
            other => CliError::Statistical(other.to_string()),
        }
    }
}

impl From<harness::HarnessError> for CliError {
    fn from(e: harness::HarnessError) -> Self {
        use harness::HarnessError as H;
        match e {
            H::InvalidPlan(m) => CliError::Validation(m),
            H::Resource(m) => CliError::Resource(m),
            H::Io(io) => io.into(),
            H::Wedge(w) => w.into(),
            H::Model(m) => m.into(),
            H::Fpp(f) => f.into(),
            H::Sequence(s) => s.into(),
            H::Duality { .. } => CliError::Statistical(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}
