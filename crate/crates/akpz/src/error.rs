use std::path::PathBuf;

use akpz_core::gibbs::GibbsError;
use akpz_core::harness::HarnessError;
use akpz_core::height::HeightError;
use akpz_core::lattice::LatticeError;
use akpz_core::pde::PdeError;
use akpz_core::profile::ProfileError;
use akpz_core::sim::{CouplingError, SimError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: missing required key `{key}`")]
    MissingKey { path: String, key: String },
    #[error("{path}: key `{key}`: {message}")]
    BadValue { path: String, key: String, message: String },
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for configuration problems, 3 for numerical failures, 4 for
    /// resource guards and I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::MissingKey { .. } | CliError::BadValue { .. } | CliError::Invalid(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Resource(_) | CliError::Io { .. } => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<ProfileError> for CliError {
    fn from(e: ProfileError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<HeightError> for CliError {
    fn from(e: HeightError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::WindowExhausted { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<CouplingError> for CliError {
    fn from(e: CouplingError) -> Self {
        match e {
            CouplingError::Sim(s) => s.into(),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<PdeError> for CliError {
    fn from(e: PdeError) -> Self {
        match e {
            PdeError::Domain { .. } | PdeError::Grid(_) | PdeError::RiemannDomain(_) | PdeError::EmptySlopeGrid => {
                CliError::Invalid(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<GibbsError> for CliError {
    fn from(e: GibbsError) -> Self {
        match e {
            GibbsError::Height(h) => h.into(),
            GibbsError::Sim(s) => s.into(),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Budget { .. } => CliError::Resource(e.to_string()),
            HarnessError::Pde(p) => p.into(),
            HarnessError::Sim(s) => s.into(),
            HarnessError::Height(h) => h.into(),
            other => CliError::Invalid(other.to_string()),
        }
    }
}
