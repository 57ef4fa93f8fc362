use thiserror::Error;

use super::ast::Span;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: Span, message: String },

    #[error("{span}: duplicate option `{name}`")]
    DuplicateOption { span: Span, name: String },

    #[error("{span}: option name `{name}` must be an uppercase identifier")]
    BadOptionName { span: Span, name: String },

    #[error("{span}: undeclared option `{name}`")]
    UndefinedOption { span: Span, name: String },

    #[error("{span}: variable `{name}` may be used before it is assigned")]
    UndefinedVariable { span: Span, name: String },

    #[error("{span}: call to undefined function `{name}`")]
    UndefinedFunction { span: Span, name: String },

    #[error("{span}: `{name}` expects {expected} argument(s), got {found}")]
    ArityMismatch { span: Span, name: String, expected: usize, found: usize },

    #[error("{span}: duplicate function `{name}`")]
    DuplicateFunction { span: Span, name: String },

    #[error("{span}: duplicate parameter `{name}`")]
    DuplicateParam { span: Span, name: String },

    #[error("{span}: function `{name}` has an empty body")]
    EmptyBody { span: Span, name: String },

    #[error("{span}: loop body is empty")]
    EmptyLoopBody { span: Span },

    #[error("{span}: loop bound must be positive")]
    ZeroBound { span: Span },

    #[error("{span}: `return` is only allowed as the last statement of a function body")]
    MisplacedReturn { span: Span },

    #[error("recursive call cycle: {}", cycle.join(" -> "))]
    RecursiveCall { cycle: Vec<String> },

    #[error("entry function `{name}` is not defined")]
    MissingEntry { name: String },
}

impl LangError {
    pub fn span(&self) -> Option<Span> {
        match self {
            LangError::Syntax { span, .. }
            | LangError::DuplicateOption { span, .. }
            | LangError::BadOptionName { span, .. }
            | LangError::UndefinedOption { span, .. }
            | LangError::UndefinedVariable { span, .. }
            | LangError::UndefinedFunction { span, .. }
            | LangError::ArityMismatch { span, .. }
            | LangError::DuplicateFunction { span, .. }
            | LangError::DuplicateParam { span, .. }
            | LangError::EmptyBody { span, .. }
            | LangError::EmptyLoopBody { span }
            | LangError::ZeroBound { span }
            | LangError::MisplacedReturn { span } => Some(*span),
            LangError::RecursiveCall { .. } | LangError::MissingEntry { .. } => None,
        }
    }
}
