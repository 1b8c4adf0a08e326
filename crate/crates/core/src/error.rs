use std::fmt;

use thiserror::Error;

use crate::parser::Span;

/// Stable diagnostic codes. The numeric part never changes meaning.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    Lexical,
    Syntax,
    UnboundName,
    Duplicate,
    TypeMismatch,
    CannotInfer,
    Modal,
    NotAFunction,
    NotAType,
    UnsolvedMeta,
    RewriteNotIdentity,
    RewriteBadHead,
    RewriteNonlinear,
    RewriteUnsupportedPattern,
    RewriteUnboundRhs,
    Universe,
    Budget,
    Recursive,
    UnknownImplicit,
    Internal,
}

impl ErrorCode {
    pub const ALL: [ErrorCode; 20] = [
        ErrorCode::Lexical,
        ErrorCode::Syntax,
        ErrorCode::UnboundName,
        ErrorCode::Duplicate,
        ErrorCode::TypeMismatch,
        ErrorCode::CannotInfer,
        ErrorCode::Modal,
        ErrorCode::NotAFunction,
        ErrorCode::NotAType,
        ErrorCode::UnsolvedMeta,
        ErrorCode::RewriteNotIdentity,
        ErrorCode::RewriteBadHead,
        ErrorCode::RewriteNonlinear,
        ErrorCode::RewriteUnsupportedPattern,
        ErrorCode::RewriteUnboundRhs,
        ErrorCode::Universe,
        ErrorCode::Budget,
        ErrorCode::Recursive,
        ErrorCode::UnknownImplicit,
        ErrorCode::Internal,
    ];

    pub fn number(self) -> u32 {
        ErrorCode::ALL.iter().position(|&c| c == self).unwrap() as u32 + 1
    }

    pub fn code(self) -> String {
        format!("E{:03}", self.number())
    }

    /// Inverse of [`ErrorCode::code`].
    pub fn from_code(s: &str) -> Option<ErrorCode> {
        ErrorCode::ALL.into_iter().find(|c| c.code() == s)
    }

    pub fn summary(self) -> &'static str {
        match self {
            ErrorCode::Lexical => "illegal character or unterminated comment",
            ErrorCode::Syntax => "syntax error",
            ErrorCode::UnboundName => "unbound name",
            ErrorCode::Duplicate => "duplicate declaration",
            ErrorCode::TypeMismatch => "type mismatch",
            ErrorCode::CannotInfer => "cannot infer a type",
            ErrorCode::Modal => "non-crisp variable used in a crisp position",
            ErrorCode::NotAFunction => "not a function",
            ErrorCode::NotAType => "not a type",
            ErrorCode::UnsolvedMeta => "unsolved implicit argument",
            ErrorCode::RewriteNotIdentity => "rewrite proof does not end in an identity type",
            ErrorCode::RewriteBadHead => "rewrite left-hand side is not headed by a constant",
            ErrorCode::RewriteNonlinear => "pattern variable bound twice",
            ErrorCode::RewriteUnsupportedPattern => "unsupported pattern",
            ErrorCode::RewriteUnboundRhs => {
                "right-hand side uses a variable the pattern does not bind"
            }
            ErrorCode::Universe => "universe level error",
            ErrorCode::Budget => "rewrite budget exceeded",
            ErrorCode::Recursive => "recursive definition",
            ErrorCode::UnknownImplicit => "no implicit argument with that name",
            ErrorCode::Internal => "unsupported construct",
        }
    }

    /// Parse and lexing problems are reported with a different exit status.
    pub fn is_syntactic(self) -> bool {
        matches!(self, ErrorCode::Lexical | ErrorCode::Syntax)
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{:03}", self.number())
    }
}

/// A located diagnostic, printed as `file:line:col: [E###] message`.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{span}: [{code}] {message}")]
pub struct Diagnostic {
    pub code: ErrorCode,
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: ErrorCode, span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            code,
            span,
            message: message.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_dense_and_stable() {
        let codes: Vec<String> = ErrorCode::ALL.iter().map(|c| c.code()).collect();
        assert_eq!(codes.first().unwrap(), "E001");
        assert_eq!(codes.last().unwrap(), "E020");
        assert_eq!(ErrorCode::Modal.code(), "E007");
        assert_eq!(ErrorCode::from_code("E007"), Some(ErrorCode::Modal));
        assert_eq!(ErrorCode::from_code("E999"), None);
        assert_eq!(ErrorCode::RewriteNonlinear.code(), "E013");
    }

    #[test]
    fn display_format() {
        let d = Diagnostic::new(
            ErrorCode::UnboundName,
            Span::new("a.cohtt", 3, 7),
            "unbound name `x`",
        );
        assert_eq!(d.to_string(), "a.cohtt:3:7: [E003] unbound name `x`");
    }
}
