use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Identifier,
    Keyword,
    Literal,
    Operator,
    Punctuation,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Identifier => "identifier",
            TokenKind::Keyword => "keyword",
            TokenKind::Literal => "literal",
            TokenKind::Operator => "operator",
            TokenKind::Punctuation => "punctuation",
        };
        f.write_str(s)
    }
}

/// A lexical token with its 1-based source position (columns count chars).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexToken {
    pub kind: TokenKind,
    pub text: String,
    pub line: usize,
    pub column: usize,
}

impl LexToken {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_punct(&self, text: &str) -> bool {
        self.is(TokenKind::Punctuation, text)
    }

    pub fn is_op(&self, text: &str) -> bool {
        self.is(TokenKind::Operator, text)
    }

    pub fn is_keyword(&self, text: &str) -> bool {
        self.is(TokenKind::Keyword, text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("lex error at {line}:{column}: {message}")]
pub struct LexError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
];

// Longest match first.
const OPERATORS: &[&str] = &[
    "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%=", "->", "::", "=",
    "+", "-", "*", "/", "%", "<", ">", "!", "&", "|", "^", "~", "?", ":",
];

const PUNCTUATION: &[char] = &['(', ')', '{', '}', '[', ']', ';', ',', '.', '@'];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphanumeric()
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Cursor {
    fn new(source: &str) -> Self {
        Cursor {
            chars: source.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars()
            .enumerate()
            .all(|(i, c)| self.peek_at(i) == Some(c))
    }

    fn error(&self, line: usize, column: usize, message: impl Into<String>) -> LexError {
        LexError {
            line,
            column,
            message: message.into(),
        }
    }
}

/// Splits Java source into tokens, discarding whitespace and comments.
pub fn lex(source: &str) -> Result<Vec<LexToken>, LexError> {
    let mut cur = Cursor::new(source);
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);

        if c.is_whitespace() {
            cur.bump();
            continue;
        }

        if cur.starts_with("//") {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }

        if cur.starts_with("/*") {
            cur.bump();
            cur.bump();
            loop {
                if cur.starts_with("*/") {
                    cur.bump();
                    cur.bump();
                    break;
                }
                if cur.bump().is_none() {
                    return Err(cur.error(line, column, "unterminated block comment"));
                }
            }
            continue;
        }

        let mut push = |kind: TokenKind, text: String| {
            tokens.push(LexToken {
                kind,
                text,
                line,
                column,
            })
        };

        if is_ident_start(c) {
            let mut text = String::new();
            while let Some(c) = cur.peek().filter(|&c| is_ident_continue(c)) {
                text.push(c);
                cur.bump();
            }
            let kind = if matches!(text.as_str(), "true" | "false" | "null") {
                TokenKind::Literal
            } else if is_keyword(&text) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
            push(kind, text);
            continue;
        }

        if c.is_ascii_digit() {
            push(TokenKind::Literal, lex_number(&mut cur));
            continue;
        }

        if c == '"' || c == '\'' {
            let text = lex_quoted(&mut cur, c)
                .ok_or_else(|| cur.error(line, column, format!("unterminated {c} literal")))?;
            push(TokenKind::Literal, text);
            continue;
        }

        if let Some(op) = OPERATORS.iter().find(|op| cur.starts_with(op)) {
            for _ in 0..op.chars().count() {
                cur.bump();
            }
            push(TokenKind::Operator, op.to_string());
            continue;
        }

        if PUNCTUATION.contains(&c) {
            cur.bump();
            push(TokenKind::Punctuation, c.to_string());
            continue;
        }

        return Err(cur.error(line, column, format!("illegal character {c:?}")));
    }

    Ok(tokens)
}

fn lex_number(cur: &mut Cursor) -> String {
    let mut text = String::new();
    while let Some(c) = cur.peek() {
        let exponent_sign = matches!(c, '+' | '-')
            && matches!(text.chars().last(), Some('e' | 'E'))
            && !text.starts_with("0x")
            && !text.starts_with("0X");
        let fraction_dot = c == '.' && cur.peek_at(1).is_some_and(|d| d.is_ascii_digit());
        if c.is_ascii_alphanumeric() || c == '_' || exponent_sign || fraction_dot {
            text.push(c);
            cur.bump();
        } else {
            break;
        }
    }
    text
}

fn lex_quoted(cur: &mut Cursor, quote: char) -> Option<String> {
    let mut text = String::new();
    text.push(cur.bump()?);
    loop {
        let c = cur.peek()?;
        if c == '\n' {
            return None;
        }
        text.push(c);
        cur.bump();
        if c == '\\' {
            let escaped = cur.peek().filter(|&e| e != '\n')?;
            text.push(escaped);
            cur.bump();
        } else if c == quote {
            return Some(text);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds_and_texts(src: &str) -> Vec<(TokenKind, String)> {
        lex(src)
            .unwrap()
            .into_iter()
            .map(|t| (t.kind, t.text))
            .collect()
    }

    #[test]
    fn simple_declaration() {
        use TokenKind::*;
        assert_eq!(
            kinds_and_texts("int x = 1;"),
            vec![
                (Keyword, "int".to_string()),
                (Identifier, "x".to_string()),
                (Operator, "=".to_string()),
                (Literal, "1".to_string()),
                (Punctuation, ";".to_string()),
            ]
        );
    }

    #[test]
    fn empty_source() {
        assert!(lex("").unwrap().is_empty());
        assert!(lex("  \n\t ").unwrap().is_empty());
    }

    #[test]
    fn line_comment_dropped() {
        let toks = lex("a.b(c) // note").unwrap();
        assert_eq!(toks.len(), 6);
        assert_eq!(toks[5].text, ")");
    }

    #[test]
    fn block_comment_dropped() {
        let toks = lex("a /* x y \n z */ b").unwrap();
        assert_eq!(toks.len(), 2);
        assert_eq!((toks[1].line, toks[1].column), (2, 7));
    }

    #[test]
    fn positions_are_one_based() {
        let toks = lex("int\n  x").unwrap();
        assert_eq!((toks[0].line, toks[0].column), (1, 1));
        assert_eq!((toks[1].line, toks[1].column), (2, 3));
    }

    #[test]
    fn unterminated_string() {
        let err = lex("String s = \"abc;\n").unwrap_err();
        assert_eq!((err.line, err.column), (1, 12));
    }

    #[test]
    fn unterminated_comment() {
        let err = lex("int x; /* never closed").unwrap_err();
        assert_eq!((err.line, err.column), (1, 8));
    }

    #[test]
    fn illegal_character() {
        let err = lex("int #x;").unwrap_err();
        assert_eq!((err.line, err.column), (1, 5));
        assert!(err.message.contains('#'));
    }

    #[test]
    fn numbers_and_literals() {
        let toks = kinds_and_texts("1.5e-3f 0x1F 10L 'c' \"a\\\"b\" true null");
        let texts: Vec<_> = toks.iter().map(|(_, t)| t.as_str()).collect();
        assert_eq!(
            texts,
            vec![
                "1.5e-3f",
                "0x1F",
                "10L",
                "'c'",
                "\"a\\\"b\"",
                "true",
                "null"
            ]
        );
        assert!(toks.iter().all(|(k, _)| *k == TokenKind::Literal));
    }

    #[test]
    fn multi_char_operators() {
        let toks = kinds_and_texts("a<=b&&c++ != d");
        let texts: Vec<_> = toks.iter().map(|(_, t)| t.as_str()).collect();
        assert_eq!(texts, vec!["a", "<=", "b", "&&", "c", "++", "!=", "d"]);
    }

    #[test]
    fn generic_closers_stay_separate() {
        let toks = lex("Map<String, List<String>> m").unwrap();
        let closers = toks.iter().filter(|t| t.text == ">").count();
        assert_eq!(closers, 2);
    }
}
