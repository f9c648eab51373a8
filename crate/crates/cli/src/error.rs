use std::io;
use std::path::PathBuf;

use pmdsg::bench::RunError;
use pmdsg::constructions::ConstructionError;
use pmdsg::{DensityError, GraphError};
use thiserror::Error;

/// Exit code for bad flags or parameter combinations.
pub const EXIT_USAGE: u8 = 2;
/// Exit code for unreadable or malformed inputs and failed writes.
pub const EXIT_FAILURE: u8 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Graph { path: PathBuf, source: GraphError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error("writing output: {0}")]
    Stdout(#[source] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        let usage = match self {
            CliError::Usage(_) => true,
            CliError::Run(e) => e.is_usage(),
            CliError::Construction(e) => matches!(
                e,
                ConstructionError::OutOfRegime { .. }
                    | ConstructionError::NoRegime { .. }
                    | ConstructionError::OddUnweighted(_)
                    | ConstructionError::GridOutOfRange(_)
                    | ConstructionError::InvalidParameter(_)
                    | ConstructionError::Density(DensityError::ZeroExponent | DensityError::InvalidExponent(_))
            ),
            _ => false,
        };
        if usage {
            EXIT_USAGE
        } else {
            EXIT_FAILURE
        }
    }
}
