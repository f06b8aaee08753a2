// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, QmapError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QmapError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("map is singular or ill-conditioned (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error("malformed circuit: {0}")]
    Structural(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl QmapError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        QmapError::InvalidInput(msg.into())
    }
}
