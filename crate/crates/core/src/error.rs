// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, WildsegError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WildsegError {
    /// Caller supplied data or parameters outside the documented domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An index-level precondition (interval bounds, split position) failed.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl WildsegError {
    pub(crate) fn invalid_input(msg: impl Into<String>) -> Self {
        Self::InvalidInput(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Self::Precondition(msg.into())
    }
}
