//! `.cohtt` source files: lexing, parsing and printing surface syntax.

pub mod ast;
mod grammar;
pub mod lexer;
mod print;

use std::fmt;
use std::rc::Rc;

pub use grammar::{parse_module, parse_term};
pub use print::{print_decl, print_module, print_term};

/// A source position (1-based line and column, counted in characters).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Span {
    pub file: Rc<str>,
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(file: &str, line: u32, col: u32) -> Span {
        Span {
            file: Rc::from(file),
            line,
            col,
        }
    }

    /// Placeholder for terms that do not come from a file.
    pub fn synthetic() -> Span {
        Span::new("<input>", 1, 1)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}
