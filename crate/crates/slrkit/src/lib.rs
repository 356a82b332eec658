//! Readers and writers for SIDs, MSO formulas, graphs and parse trees, and
//! the `slrkit` command-line front end.

pub mod cli;
pub mod dot;
pub mod json;
mod lex;
pub mod mso;
pub mod sid;

pub use mso::{parse_mso, parse_mso_in, MsoDocument};
pub use sid::{parse_sid, write_sid};

use std::fmt;

use slrkit_core::slr::SlrError;

/// A line and column in the input, both from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl Pos {
    pub(crate) fn error(self, kind: ParseErrorKind) -> ParseError {
        ParseError { pos: self, kind }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("`{symbol}` has arity {expected}, used with {found} arguments")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("the label `d__` is reserved")]
    ReservedLabel,
    #[error("set variable `{0}` is not bound")]
    UnboundSetVariable(String),
    #[error(transparent)]
    Invalid(#[from] SlrError),
}
