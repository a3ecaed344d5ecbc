//! Command-line front end for the persuasion solvers: configuration,
//! experiment runs, parameter sweeps and CSV/JSON output.

pub mod config;
pub mod emit;
pub mod manifest;
pub mod run;
pub mod sweep;

use std::path::{Path, PathBuf};

use polarsolve_core::ModelError;
use thiserror::Error;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind, RawConfig};
pub use run::{run_experiment, RunOutcome};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 1;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("model error: {0}")]
    Model(#[from] ModelError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
}

impl RunError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        RunError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Model(_) => EXIT_CONFIG,
            RunError::Io { .. } | RunError::Parse { .. } => EXIT_IO,
        }
    }
}

/// Loads `path` (or an empty config), applies overrides and validates for
/// `kind`.
pub fn load_config(
    kind: ExperimentKind,
    path: Option<&Path>,
    overrides: &[String],
) -> Result<ExperimentConfig, ConfigError> {
    let mut raw = match path {
        Some(p) => RawConfig::load(p)?,
        None => RawConfig::empty(),
    };
    for o in overrides {
        raw.apply_override(o)?;
    }
    raw.resolve(kind)
}
