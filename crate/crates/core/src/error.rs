use alloc::string::String;

use crate::sexpr::Pos;

/// Errors raised while reading and sort-checking SMT-LIB text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrontendError {
    #[error("{pos}: unbalanced parentheses")]
    UnbalancedParens { pos: Pos },
    #[error("{pos}: malformed token")]
    MalformedToken { pos: Pos },
    #[error("{pos}: command `{name}` is not allowed in VMT-LIB files")]
    DisallowedCommand { name: String, pos: Pos },
    #[error("{pos}: malformed command: {reason}")]
    MalformedCommand { reason: String, pos: Pos },
    #[error("{pos}: sort mismatch for `{symbol}`: expected {expected}, found {found}")]
    SortMismatch {
        symbol: String,
        expected: String,
        found: String,
        pos: Pos,
    },
    #[error("{pos}: unknown symbol `{name}`")]
    UnknownSymbol { name: String, pos: Pos },
    #[error("{pos}: unknown sort `{name}`")]
    UnknownSort { name: String, pos: Pos },
    #[error("{pos}: `{name}` is already declared")]
    DuplicateDeclaration { name: String, pos: Pos },
    #[error("{pos}: definition of `{name}` is recursive")]
    RecursiveDefinition { name: String, pos: Pos },
    #[error("{pos}: `{symbol}` expects {expected} argument(s), got {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
        pos: Pos,
    },
    #[error("{pos}: malformed term: {reason}")]
    MalformedTerm { reason: String, pos: Pos },
    #[error("{pos}: invalid sort: {reason}")]
    InvalidSort { reason: String, pos: Pos },
}

impl FrontendError {
    pub fn code(&self) -> &'static str {
        match self {
            FrontendError::UnbalancedParens { .. } => "UnbalancedParens",
            FrontendError::MalformedToken { .. } => "MalformedToken",
            FrontendError::DisallowedCommand { .. } => "DisallowedCommand",
            FrontendError::MalformedCommand { .. } => "MalformedCommand",
            FrontendError::SortMismatch { .. } => "SortMismatch",
            FrontendError::UnknownSymbol { .. } => "UnknownSymbol",
            FrontendError::UnknownSort { .. } => "UnknownSort",
            FrontendError::DuplicateDeclaration { .. } => "DuplicateDeclaration",
            FrontendError::RecursiveDefinition { .. } => "RecursiveDefinition",
            FrontendError::ArityMismatch { .. } => "ArityMismatch",
            FrontendError::MalformedTerm { .. } => "MalformedTerm",
            FrontendError::InvalidSort { .. } => "InvalidSort",
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            FrontendError::UnbalancedParens { pos }
            | FrontendError::MalformedToken { pos }
            | FrontendError::DisallowedCommand { pos, .. }
            | FrontendError::MalformedCommand { pos, .. }
            | FrontendError::SortMismatch { pos, .. }
            | FrontendError::UnknownSymbol { pos, .. }
            | FrontendError::UnknownSort { pos, .. }
            | FrontendError::DuplicateDeclaration { pos, .. }
            | FrontendError::RecursiveDefinition { pos, .. }
            | FrontendError::ArityMismatch { pos, .. }
            | FrontendError::MalformedTerm { pos, .. }
            | FrontendError::InvalidSort { pos, .. } => *pos,
        }
    }
}
