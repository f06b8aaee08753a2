// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use qmapsim_core::QmapError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for configuration problems, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<QmapError> for CliError {
    fn from(e: QmapError) -> Self {
        match e {
            QmapError::InvalidInput(_) | QmapError::Parse { .. } => CliError::Config(e.to_string()),
            QmapError::Singular { .. } | QmapError::Numerical(_) | QmapError::Structural(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
