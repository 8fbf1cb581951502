//! Surface syntax: tokens, the tree, the parser and a pretty-printer.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;

use thiserror::Error;

use crate::diag::{Diagnostic, SourcePos};

pub use parser::{parse_frames, parse_library};
pub use pretty::{pretty_frames, pretty_library};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("unexpected character '{found}'")]
    Lex { pos: SourcePos, found: char },
    #[error("{}", expected_message(expected, found))]
    Parse {
        pos: SourcePos,
        expected: Vec<String>,
        found: String,
    },
    #[error("unknown frame keyword '{keyword}'")]
    UnknownFrame { pos: SourcePos, keyword: String },
    #[error("list variable '{name}' is bound twice in one template")]
    DuplicateListVariable { pos: SourcePos, name: String },
}

fn expected_message(expected: &[String], found: &str) -> String {
    match expected {
        [one] => format!("expected {one}, found {found}"),
        many => format!("expected one of {}, found {found}", many.join(", ")),
    }
}

impl SyntaxError {
    pub fn pos(&self) -> &SourcePos {
        match self {
            SyntaxError::Lex { pos, .. }
            | SyntaxError::Parse { pos, .. }
            | SyntaxError::UnknownFrame { pos, .. }
            | SyntaxError::DuplicateListVariable { pos, .. } => pos,
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(self.pos().clone(), self.to_string())
    }
}
