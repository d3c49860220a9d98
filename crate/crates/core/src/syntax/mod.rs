//! Lexing and parsing of method-level Java snippets.

pub mod ast;
pub mod lexer;
pub mod parser;

use thiserror::Error;

pub use ast::{
    BinaryOp, Block, CatchClause, Expr, MethodDecl, Param, QualifiedName, Snippet, Statement,
    UnaryOp,
};
pub use lexer::{lex, LexError, LexToken, TokenKind};
pub use parser::{parse_snippet, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Lexes and parses `source` in one step.
pub fn parse_source(source: &str) -> Result<Snippet, SyntaxError> {
    let tokens = lex(source)?;
    Ok(parse_snippet(&tokens)?)
}
