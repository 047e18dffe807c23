// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use thiserror::Error;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("{pos}: parse error: {message}")]
    Parse { pos: Pos, message: String },
    #[error("{}semantic error: {message}", .pos.map(|p| format!("{p}: ")).unwrap_or_default())]
    Semantic { pos: Option<Pos>, message: String },
}

impl SpecError {
    pub fn parse(pos: Pos, message: impl Into<String>) -> Self {
        SpecError::Parse {
            pos,
            message: message.into(),
        }
    }

    pub fn semantic(message: impl Into<String>) -> Self {
        SpecError::Semantic {
            pos: None,
            message: message.into(),
        }
    }

    pub fn semantic_at(pos: Pos, message: impl Into<String>) -> Self {
        SpecError::Semantic {
            pos: Some(pos),
            message: message.into(),
        }
    }

    pub fn message(&self) -> &str {
        match self {
            SpecError::Parse { message, .. } | SpecError::Semantic { message, .. } => message,
        }
    }

    pub fn is_semantic(&self) -> bool {
        matches!(self, SpecError::Semantic { .. })
    }

    /// Attaches `pos` to a semantic error that has none.
    pub(crate) fn located(self, at: Pos) -> Self {
        match self {
            SpecError::Semantic { pos: None, message } => SpecError::Semantic {
                pos: Some(at),
                message,
            },
            other => other,
        }
    }
}
