//! Recursive-descent parser for the supported Java subset: leading imports
//! followed by exactly one method declaration.

use std::collections::HashSet;

use thiserror::Error;

use super::ast::*;
use super::lexer::{LexToken, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {line}:{column}: expected {expected}, found {found}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub found: String,
}

const MODIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "synchronized",
    "native",
    "strictfp",
];

const PRIMITIVES: &[&str] = &[
    "int", "long", "short", "byte", "char", "boolean", "float", "double",
];

const COMPOUND_ASSIGN: &[(&str, BinaryOp)] = &[
    ("+=", BinaryOp::Add),
    ("-=", BinaryOp::Sub),
    ("*=", BinaryOp::Mul),
    ("/=", BinaryOp::Div),
    ("%=", BinaryOp::Rem),
];

pub fn parse_snippet(tokens: &[LexToken]) -> Result<Snippet, ParseError> {
    let mut parser = Parser { tokens, pos: 0 };
    parser.snippet()
}

struct Parser<'t> {
    tokens: &'t [LexToken],
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t LexToken> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, offset: usize) -> Option<&'t LexToken> {
        self.tokens.get(self.pos + offset)
    }

    fn bump(&mut self) -> Option<&'t LexToken> {
        let tok = self.tokens.get(self.pos);
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        let (line, column, found) = match self.peek() {
            Some(tok) => (tok.line, tok.column, format!("{:?}", tok.text)),
            None => match self.tokens.last() {
                Some(tok) => (tok.line, tok.column, "end of input".to_string()),
                None => (1, 1, "end of input".to_string()),
            },
        };
        ParseError {
            line,
            column,
            expected: expected.into(),
            found,
        }
    }

    fn check(&self, pred: impl Fn(&LexToken) -> bool) -> bool {
        self.peek().is_some_and(pred)
    }

    fn at_punct(&self, p: &str) -> bool {
        self.check(|t| t.is_punct(p))
    }

    fn at_op(&self, op: &str) -> bool {
        self.check(|t| t.is_op(op))
    }

    fn at_keyword(&self, kw: &str) -> bool {
        self.check(|t| t.is_keyword(kw))
    }

    fn at_ident(&self) -> bool {
        self.check(|t| t.kind == TokenKind::Identifier)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.at_punct(p);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        let hit = self.at_keyword(kw);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(format!("{p:?}")))
        }
    }

    fn expect_op(&mut self, op: &str) -> PResult<()> {
        if self.at_op(op) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("{op:?}")))
        }
    }

    fn expect_ident(&mut self) -> PResult<String> {
        if self.at_ident() {
            Ok(self.bump().map(|t| t.text.clone()).unwrap_or_default())
        } else {
            Err(self.error("identifier"))
        }
    }

    fn snippet(&mut self) -> PResult<Snippet> {
        let mut imports = Vec::new();
        while self.eat_keyword("import") {
            imports.push(self.qualified_name()?);
            self.expect_punct(";")?;
        }
        let method = self.method()?;
        if self.peek().is_some() {
            return Err(self.error("end of input"));
        }
        Ok(Snippet { imports, method })
    }

    fn qualified_name(&mut self) -> PResult<QualifiedName> {
        let mut segments = vec![self.expect_ident()?];
        while self.eat_punct(".") {
            segments.push(self.expect_ident()?);
        }
        Ok(QualifiedName(segments))
    }

    fn annotation(&mut self) -> PResult<()> {
        self.expect_punct("@")?;
        self.qualified_name()?;
        if self.at_punct("(") {
            return Err(self.error("annotation without arguments"));
        }
        Ok(())
    }

    fn method(&mut self) -> PResult<MethodDecl> {
        loop {
            if self.at_punct("@") {
                self.annotation()?;
            } else if self
                .check(|t| t.kind == TokenKind::Keyword && MODIFIERS.contains(&t.text.as_str()))
            {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.at_op("<") {
            self.type_params()?;
        }

        let return_type = if self.eat_keyword("void") {
            "void".to_string()
        } else if self.at_type_start() {
            self.type_name()?
        } else {
            return Err(self.error("return type"));
        };
        let name = self.expect_ident()?;

        self.expect_punct("(")?;
        let mut params: Vec<Param> = Vec::new();
        let mut seen = HashSet::new();
        if !self.at_punct(")") {
            loop {
                while self.at_punct("@") || self.at_keyword("final") {
                    if self.at_punct("@") {
                        self.annotation()?;
                    } else {
                        self.pos += 1;
                    }
                }
                let type_name = self.type_name()?;
                if !self.at_ident() {
                    return Err(self.error("parameter name"));
                }
                if !seen.insert(self.peek().map(|t| t.text.clone()).unwrap_or_default()) {
                    return Err(self.error("distinct parameter name"));
                }
                let name = self.expect_ident()?;
                params.push(Param { type_name, name });
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;

        if self.eat_keyword("throws") {
            self.type_name()?;
            while self.eat_punct(",") {
                self.type_name()?;
            }
        }

        let body = self.block()?;
        Ok(MethodDecl {
            name,
            return_type,
            params,
            body,
        })
    }

    fn type_params(&mut self) -> PResult<()> {
        self.expect_op("<")?;
        loop {
            self.expect_ident()?;
            if self.eat_keyword("extends") {
                self.type_name()?;
                while self.at_op("&") {
                    self.pos += 1;
                    self.type_name()?;
                }
            }
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_op(">")
    }

    fn at_type_start(&self) -> bool {
        self.at_ident()
            || self.check(|t| t.kind == TokenKind::Keyword && PRIMITIVES.contains(&t.text.as_str()))
    }

    /// Parses a type and returns its raw simple name: generic arguments are
    /// dropped, qualified names keep their last segment, array suffixes stay.
    fn type_name(&mut self) -> PResult<String> {
        let mut name = if self
            .check(|t| t.kind == TokenKind::Keyword && PRIMITIVES.contains(&t.text.as_str()))
        {
            self.bump().map(|t| t.text.clone()).unwrap_or_default()
        } else if self.at_ident() {
            let mut last = self.expect_ident()?;
            while self.at_punct(".")
                && self
                    .peek_at(1)
                    .is_some_and(|t| t.kind == TokenKind::Identifier)
            {
                self.pos += 1;
                last = self.expect_ident()?;
            }
            if self.at_op("<") {
                self.generic_args()?;
            }
            last
        } else {
            return Err(self.error("type"));
        };
        while self.at_punct("[") && self.peek_at(1).is_some_and(|t| t.is_punct("]")) {
            self.pos += 2;
            name.push_str("[]");
        }
        Ok(name)
    }

    fn generic_args(&mut self) -> PResult<()> {
        self.expect_op("<")?;
        if self.at_op(">") {
            self.pos += 1;
            return Ok(());
        }
        loop {
            if self.at_op("?") {
                self.pos += 1;
                if self.eat_keyword("extends") || self.eat_keyword("super") {
                    self.type_name()?;
                }
            } else {
                self.type_name()?;
            }
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_op(">")
    }

    fn block(&mut self) -> PResult<Block> {
        self.expect_punct("{")?;
        let mut statements = Vec::new();
        while !self.eat_punct("}") {
            if self.peek().is_none() {
                return Err(self.error("\"}\""));
            }
            statements.push(self.statement()?);
        }
        Ok(Block::new(statements))
    }

    fn body(&mut self) -> PResult<Block> {
        if self.at_punct("{") {
            self.block()
        } else {
            Ok(Block::new(vec![self.statement()?]))
        }
    }

    fn statement(&mut self) -> PResult<Statement> {
        if self.eat_keyword("return") {
            let value = if self.at_punct(";") {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect_punct(";")?;
            return Ok(Statement::Return(value));
        }
        if self.eat_keyword("if") {
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let then_block = self.body()?;
            let else_block = if self.eat_keyword("else") {
                Some(self.body()?)
            } else {
                None
            };
            return Ok(Statement::If {
                cond,
                then_block,
                else_block,
            });
        }
        if self.eat_keyword("while") {
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let body = self.body()?;
            return Ok(Statement::While { cond, body });
        }
        if self.eat_keyword("for") {
            self.expect_punct("(")?;
            let init = if self.at_punct(";") {
                None
            } else {
                Some(Box::new(self.simple_statement()?))
            };
            self.expect_punct(";")?;
            let cond = if self.at_punct(";") {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect_punct(";")?;
            let update = if self.at_punct(")") {
                None
            } else {
                Some(Box::new(self.simple_statement()?))
            };
            self.expect_punct(")")?;
            let body = self.body()?;
            return Ok(Statement::For {
                init,
                cond,
                update,
                body,
            });
        }
        if self.eat_keyword("try") {
            let body = self.block()?;
            let catch = if self.eat_keyword("catch") {
                self.expect_punct("(")?;
                let type_name = self.type_name()?;
                let name = self.expect_ident()?;
                self.expect_punct(")")?;
                let body = self.block()?;
                Some(CatchClause {
                    type_name,
                    name,
                    body,
                })
            } else {
                None
            };
            return Ok(Statement::Try { body, catch });
        }
        let stmt = self.simple_statement()?;
        self.expect_punct(";")?;
        Ok(stmt)
    }

    /// A statement without its terminating `;`: local declaration, assignment,
    /// or expression statement.
    fn simple_statement(&mut self) -> PResult<Statement> {
        let is_final = self.eat_keyword("final");
        if is_final || self.at_local_decl() {
            let type_name = self.type_name()?;
            let name = self.expect_ident()?;
            let init = if self.at_op("=") {
                self.pos += 1;
                Some(self.expr()?)
            } else {
                None
            };
            return Ok(Statement::VarDecl {
                type_name,
                name,
                init,
            });
        }

        let start = self.pos;
        let expr = self.expr()?;

        if self.at_op("=") {
            let Expr::Name(target) = expr else {
                self.pos = start;
                return Err(self.error("assignable name"));
            };
            self.pos += 1;
            let value = self.expr()?;
            return Ok(Statement::Assign { target, value });
        }
        if let Some(&(_, op)) = COMPOUND_ASSIGN.iter().find(|(text, _)| self.at_op(text)) {
            let Expr::Name(target) = expr else {
                self.pos = start;
                return Err(self.error("assignable name"));
            };
            self.pos += 1;
            let rhs = self.expr()?;
            let value = Expr::Binary {
                op,
                left: Box::new(Expr::Name(target.clone())),
                right: Box::new(rhs),
            };
            return Ok(Statement::Assign { target, value });
        }

        match expr {
            Expr::Call { .. }
            | Expr::New { .. }
            | Expr::Unary {
                op:
                    UnaryOp::PreIncrement
                    | UnaryOp::PreDecrement
                    | UnaryOp::PostIncrement
                    | UnaryOp::PostDecrement,
                ..
            } => Ok(Statement::Expr(expr)),
            _ => {
                self.pos = start;
                Err(self.error("statement"))
            }
        }
    }

    fn at_local_decl(&mut self) -> bool {
        if self.check(|t| t.kind == TokenKind::Keyword && PRIMITIVES.contains(&t.text.as_str())) {
            return true;
        }
        if !self.at_ident() {
            return false;
        }
        let save = self.pos;
        let ok = self.type_name().is_ok() && self.at_ident();
        self.pos = save;
        ok
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(0)
    }

    fn binary(&mut self, level: usize) -> PResult<Expr> {
        const LEVELS: &[&[&str]] = &[
            &["||"],
            &["&&"],
            &["==", "!="],
            &["<", ">", "<=", ">="],
            &["+", "-"],
            &["*", "/", "%"],
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut left = self.binary(level + 1)?;
        while let Some(op) = LEVELS[level]
            .iter()
            .find(|op| self.at_op(op))
            .and_then(|op| BinaryOp::from_token(op))
        {
            self.pos += 1;
            let right = self.binary(level + 1)?;
            left = Expr::Binary {
                op,
                left: Box::new(left),
                right: Box::new(right),
            };
        }
        Ok(left)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let op = match self.peek() {
            Some(t) if t.is_op("!") => Some(UnaryOp::Not),
            Some(t) if t.is_op("-") => Some(UnaryOp::Neg),
            Some(t) if t.is_op("+") => Some(UnaryOp::Plus),
            Some(t) if t.is_op("++") => Some(UnaryOp::PreIncrement),
            Some(t) if t.is_op("--") => Some(UnaryOp::PreDecrement),
            _ => None,
        };
        if let Some(op) = op {
            self.pos += 1;
            let operand = self.unary()?;
            return Ok(Expr::Unary {
                op,
                operand: Box::new(operand),
            });
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut expr = self.primary()?;
        while self.eat_punct(".") {
            let name = self.expect_ident()?;
            expr = if self.at_punct("(") {
                let args = self.args()?;
                Expr::Call {
                    receiver: Some(Box::new(expr)),
                    callee: name,
                    args,
                }
            } else {
                Expr::FieldAccess {
                    receiver: Box::new(expr),
                    field: name,
                }
            };
        }
        let op = if self.at_op("++") {
            Some(UnaryOp::PostIncrement)
        } else if self.at_op("--") {
            Some(UnaryOp::PostDecrement)
        } else {
            None
        };
        if let Some(op) = op {
            self.pos += 1;
            expr = Expr::Unary {
                op,
                operand: Box::new(expr),
            };
        }
        Ok(expr)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let Some(tok) = self.peek() else {
            return Err(self.error("expression"));
        };
        match tok.kind {
            TokenKind::Literal => {
                self.pos += 1;
                Ok(Expr::Literal(tok.text.clone()))
            }
            TokenKind::Identifier => {
                self.pos += 1;
                if self.at_punct("(") {
                    let args = self.args()?;
                    Ok(Expr::Call {
                        receiver: None,
                        callee: tok.text.clone(),
                        args,
                    })
                } else {
                    Ok(Expr::Name(tok.text.clone()))
                }
            }
            TokenKind::Keyword if tok.text == "this" => {
                self.pos += 1;
                Ok(Expr::This)
            }
            TokenKind::Keyword if tok.text == "super" => {
                self.pos += 1;
                Ok(Expr::Super)
            }
            TokenKind::Keyword if tok.text == "new" => {
                self.pos += 1;
                if !self.at_ident() {
                    return Err(self.error("class type"));
                }
                let type_name = self.type_name()?;
                if type_name.ends_with("[]") || self.at_punct("[") {
                    return Err(self.error("constructor arguments"));
                }
                let args = self.args()?;
                Ok(Expr::New { type_name, args })
            }
            TokenKind::Punctuation if tok.text == "(" => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect_punct(")")?;
                Ok(inner)
            }
            _ => Err(self.error("expression")),
        }
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if self.eat_punct(")") {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(args)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{lex, parse_source};

    fn parse(src: &str) -> Result<Snippet, ParseError> {
        parse_snippet(&lex(src).unwrap())
    }

    #[test]
    fn minimal_method() {
        let s = parse("public int f() { return 1; }").unwrap();
        assert!(s.imports.is_empty());
        assert_eq!(s.method.name, "f");
        assert_eq!(s.method.return_type, "int");
        assert!(s.method.params.is_empty());
        assert_eq!(
            s.method.body.statements,
            vec![Statement::Return(Some(Expr::Literal("1".into())))]
        );
    }

    #[test]
    fn import_and_param() {
        let s = parse("import java.util.List; public int g(List xs) { return 0; }").unwrap();
        assert_eq!(s.imports.len(), 1);
        assert_eq!(s.imports[0].to_string(), "java.util.List");
        assert_eq!(s.imports[0].simple_name(), "List");
        assert_eq!(
            s.method.params,
            vec![Param {
                type_name: "List".into(),
                name: "xs".into()
            }]
        );
    }

    #[test]
    fn class_declaration_rejected() {
        let err = parse("class A {}").unwrap_err();
        assert_eq!((err.line, err.column), (1, 1));
        assert_eq!(err.expected, "return type");
    }

    #[test]
    fn generics_and_modifiers_discarded() {
        let s = parse(
            "@Override public static final <T extends Comparable<T>> Map<String, List<T>> \
             group(final List<? extends T> items) throws IOException { return null; }",
        )
        .unwrap();
        assert_eq!(s.method.return_type, "Map");
        assert_eq!(s.method.params[0].type_name, "List");
    }

    #[test]
    fn diamond_and_arrays() {
        let s = parse("void f(String[] args) { List<String> xs = new ArrayList<>(); }").unwrap();
        assert_eq!(s.method.params[0].type_name, "String[]");
        match &s.method.body.statements[0] {
            Statement::VarDecl {
                type_name,
                name,
                init: Some(Expr::New { type_name: t, args }),
            } => {
                assert_eq!(type_name, "List");
                assert_eq!(name, "xs");
                assert_eq!(t, "ArrayList");
                assert!(args.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn compound_assignment_desugars() {
        let s = parse("void f() { int a = 0; a += 2; a++; }").unwrap();
        assert_eq!(
            s.method.body.statements[1],
            Statement::Assign {
                target: "a".into(),
                value: Expr::Binary {
                    op: BinaryOp::Add,
                    left: Box::new(Expr::Name("a".into())),
                    right: Box::new(Expr::Literal("2".into())),
                }
            }
        );
        assert!(matches!(
            s.method.body.statements[2],
            Statement::Expr(Expr::Unary {
                op: UnaryOp::PostIncrement,
                ..
            })
        ));
    }

    #[test]
    fn control_flow() {
        let src = "int f(int n) {
            int s = 0;
            for (int i = 0; i < n; i++) { s = s + i; }
            while (s > 10) s = s - 1;
            if (s == 3) { return 1; } else if (s == 4) return 2; else { s = 0; }
            try { s = parse(s); } catch (Exception e) { log(e); }
            return s;
        }";
        let s = parse(src).unwrap();
        assert_eq!(s.method.body.statements.len(), 6);
        assert!(matches!(
            s.method.body.statements[1],
            Statement::For {
                init: Some(_),
                cond: Some(_),
                update: Some(_),
                ..
            }
        ));
        assert!(matches!(
            s.method.body.statements[4],
            Statement::Try { catch: Some(_), .. }
        ));
    }

    #[test]
    fn precedence() {
        let s = parse("int f(int a, int b) { return a + b * 2 < 3 && !c(); }").unwrap();
        let Statement::Return(Some(Expr::Binary { op, left, .. })) = &s.method.body.statements[0]
        else {
            panic!()
        };
        assert_eq!(*op, BinaryOp::And);
        let Expr::Binary { op, left, .. } = left.as_ref() else {
            panic!()
        };
        assert_eq!(*op, BinaryOp::Lt);
        let Expr::Binary { op, right, .. } = left.as_ref() else {
            panic!()
        };
        assert_eq!(*op, BinaryOp::Add);
        assert!(matches!(
            right.as_ref(),
            Expr::Binary {
                op: BinaryOp::Mul,
                ..
            }
        ));
    }

    #[test]
    fn call_chains() {
        let s = parse("void f() { this.items.get(0).close(); }").unwrap();
        let Statement::Expr(Expr::Call {
            receiver: Some(recv),
            callee,
            ..
        }) = &s.method.body.statements[0]
        else {
            panic!()
        };
        assert_eq!(callee, "close");
        assert!(matches!(recv.as_ref(), Expr::Call { callee, .. } if callee == "get"));
    }

    #[test]
    fn unsupported_constructs() {
        let cases = [
            ("void f() { run(() -> 1); }", "expression"),
            ("void f() { Object o = new Runnable() { }; }", "\";\""),
            (
                "@SuppressWarnings(\"x\") void f() {}",
                "annotation without arguments",
            ),
            ("void f() {} void g() {}", "end of input"),
            ("void f() { int a, b; }", "\";\""),
            ("void f() { a + b; }", "statement"),
            ("import java.util.*; void f() {}", "identifier"),
            ("void f(int a, int a) {}", "distinct parameter name"),
            ("void f() { int x = xs[0]; }", "\";\""),
            ("void f() { for (String s : xs) {} }", "\";\""),
            ("void f() {", "\"}\""),
            ("", "return type"),
        ];
        for (src, expected) in cases {
            let err = parse(src).unwrap_err();
            assert_eq!(err.expected, expected, "{src}");
        }
    }

    #[test]
    fn error_positions_are_token_positions() {
        let src = "void f() {\n  int x = 1;\n  x = ;\n}";
        let toks = lex(src).unwrap();
        let err = parse_snippet(&toks).unwrap_err();
        assert!(toks
            .iter()
            .any(|t| t.line == err.line && t.column == err.column));
        assert_eq!((err.line, err.column), (3, 7));
    }

    #[test]
    fn parse_source_reports_lex_errors() {
        assert!(parse_source("void f() { int # }").is_err());
    }
}
