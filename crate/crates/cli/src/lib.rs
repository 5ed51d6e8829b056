//! Command-line driver: configuration files, single solves, convergence
//! studies and flux tables.

pub mod config;
pub mod output;
pub mod run;
pub mod study;

use std::path::PathBuf;

use hdg_core::mesh::MeshError;
use hdg_core::solver::SolverError;
use hdg_core::verification::VerificationError;
use thiserror::Error;

pub use config::RunConfig;
pub use run::{run_case, ExitStatus, RunReport};
pub use study::{run_study, StudyReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("mesh error: {0}")]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Verification(#[from] VerificationError),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Process exit code for errors raised before or outside the march.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Solver(SolverError::NonPhysicalState { .. }) => ExitStatus::NonPhysical.code(),
            Self::Solver(SolverError::MaxIterations(_)) => ExitStatus::MaxIterations.code(),
            _ => ExitStatus::Failed.code(),
        }
    }
}
