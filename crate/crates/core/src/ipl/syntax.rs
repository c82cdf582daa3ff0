//! Lexer, untyped syntax tree, and recursive-descent parser.

use std::fmt;

use thiserror::Error;

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
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
#[error("syntax error at {pos}: {message}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u64),
    True,
    False,
    If,
    Else,
    While,
    Throw,
    Skip,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Assign,
    EqEq,
    OrOr,
    AndAnd,
    Plus,
    Minus,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "identifier `{name}`"),
            Tok::Nat(n) => return write!(f, "number `{n}`"),
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::If => "`if`",
            Tok::Else => "`else`",
            Tok::While => "`while`",
            Tok::Throw => "`throw`",
            Tok::Skip => "`skip`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Semi => "`;`",
            Tok::Assign => "`=`",
            Tok::EqEq => "`==`",
            Tok::OrOr => "`||`",
            Tok::AndAnd => "`&&`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

fn lex(source: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut col) = (1, 1);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' {
            bump!();
            if chars.peek() == Some(&'/') {
                while !matches!(chars.peek(), None | Some('\n')) {
                    bump!();
                }
                continue;
            }
            return Err(SyntaxError {
                pos,
                message: "unexpected character `/`".into(),
            });
        }
        if c.is_ascii_digit() {
            let mut text = String::new();
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                text.push(d);
                bump!();
            }
            let n = text.parse().map_err(|_| SyntaxError {
                pos,
                message: format!("numeric literal `{text}` is too large"),
            })?;
            out.push((Tok::Nat(n), pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut text = String::new();
            while let Some(&d) = chars.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_') {
                    break;
                }
                text.push(d);
                bump!();
            }
            let tok = match text.as_str() {
                "true" => Tok::True,
                "false" => Tok::False,
                "if" => Tok::If,
                "else" => Tok::Else,
                "while" => Tok::While,
                "throw" => Tok::Throw,
                "skip" => Tok::Skip,
                _ => Tok::Ident(text),
            };
            out.push((tok, pos));
            continue;
        }
        bump!();
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ';' => Tok::Semi,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '=' if chars.peek() == Some(&'=') => {
                bump!();
                Tok::EqEq
            }
            '=' => Tok::Assign,
            '|' if chars.peek() == Some(&'|') => {
                bump!();
                Tok::OrOr
            }
            '&' if chars.peek() == Some(&'&') => {
                bump!();
                Tok::AndAnd
            }
            other => {
                return Err(SyntaxError {
                    pos,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Eq,
    Plus,
    Minus,
    Or,
    And,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Eq => "==",
            BinOp::Plus => "+",
            BinOp::Minus => "-",
            BinOp::Or => "||",
            BinOp::And => "&&",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Nat(u64),
    Bool(bool),
    Ident(String),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    If {
        cond: Expr,
        then_block: Vec<Stmt>,
        else_block: Option<Vec<Stmt>>,
    },
    Assign {
        target: Expr,
        value: Expr,
    },
    Throw,
    Skip,
    While {
        cond: Expr,
        body: Vec<Stmt>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: Pos,
}

/// An untyped program: a statement list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub stmts: Vec<Stmt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept `while` loops. Off means only the core statement forms
    /// (if/assign/sequence/skip/throw).
    pub allow_while: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { allow_while: true }
    }
}

impl ParseOptions {
    pub fn strict() -> Self {
        Self { allow_while: false }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    opts: ParseOptions,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn advance(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<Pos, SyntaxError> {
        if *self.peek() == want {
            Ok(self.advance().1)
        } else {
            self.error(format!("expected {want}, found {}", self.peek()))
        }
    }

    fn program(&mut self) -> Result<Program, SyntaxError> {
        let mut stmts = Vec::new();
        while *self.peek() != Tok::Eof {
            stmts.push(self.stmt()?);
        }
        Ok(Program { stmts })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, SyntaxError> {
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while *self.peek() != Tok::RBrace {
            if *self.peek() == Tok::Eof {
                return self.error("expected `}`, found end of input");
            }
            stmts.push(self.stmt()?);
        }
        self.advance();
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let pos = self.pos();
        let kind = match self.peek() {
            Tok::If => {
                self.advance();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let then_block = self.block()?;
                let else_block = if *self.peek() == Tok::Else {
                    self.advance();
                    Some(self.block()?)
                } else {
                    None
                };
                StmtKind::If {
                    cond,
                    then_block,
                    else_block,
                }
            }
            Tok::While => {
                if !self.opts.allow_while {
                    return self.error("`while` is not available in strict mode");
                }
                self.advance();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let body = self.block()?;
                StmtKind::While { cond, body }
            }
            Tok::Throw => {
                self.advance();
                self.expect(Tok::Semi)?;
                StmtKind::Throw
            }
            Tok::Skip => {
                self.advance();
                self.expect(Tok::Semi)?;
                StmtKind::Skip
            }
            _ => {
                let target = self.expr()?;
                self.expect(Tok::Assign)?;
                let value = self.expr()?;
                self.expect(Tok::Semi)?;
                StmtKind::Assign { target, value }
            }
        };
        Ok(Stmt { kind, pos })
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        self.left_assoc(&[(Tok::OrOr, BinOp::Or)], Self::and)
    }

    fn and(&mut self) -> Result<Expr, SyntaxError> {
        self.left_assoc(&[(Tok::AndAnd, BinOp::And)], Self::eq)
    }

    fn eq(&mut self) -> Result<Expr, SyntaxError> {
        let lhs = self.add()?;
        if *self.peek() != Tok::EqEq {
            return Ok(lhs);
        }
        let pos = self.advance().1;
        let rhs = self.add()?;
        if *self.peek() == Tok::EqEq {
            return self.error("`==` cannot be chained; add parentheses");
        }
        Ok(Expr {
            kind: ExprKind::Binary(BinOp::Eq, Box::new(lhs), Box::new(rhs)),
            pos,
        })
    }

    fn add(&mut self) -> Result<Expr, SyntaxError> {
        self.left_assoc(&[(Tok::Plus, BinOp::Plus), (Tok::Minus, BinOp::Minus)], Self::atom)
    }

    fn left_assoc(
        &mut self,
        ops: &[(Tok, BinOp)],
        next: fn(&mut Self) -> Result<Expr, SyntaxError>,
    ) -> Result<Expr, SyntaxError> {
        let mut lhs = next(self)?;
        while let Some(&(_, op)) = ops.iter().find(|(t, _)| t == self.peek()) {
            let pos = self.advance().1;
            let rhs = next(self)?;
            lhs = Expr {
                kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let pos = self.pos();
        let kind = match self.peek().clone() {
            Tok::Nat(n) => ExprKind::Nat(n),
            Tok::True => ExprKind::Bool(true),
            Tok::False => ExprKind::Bool(false),
            Tok::Ident(name) => ExprKind::Ident(name),
            Tok::LParen => {
                self.advance();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(inner);
            }
            other => return self.error(format!("expected an expression, found {other}")),
        };
        self.advance();
        Ok(Expr { kind, pos })
    }
}

pub fn parse_program(source: &str) -> Result<Program, SyntaxError> {
    parse_program_with(source, ParseOptions::default())
}

pub fn parse_program_with(source: &str, opts: ParseOptions) -> Result<Program, SyntaxError> {
    let toks = lex(source)?;
    Parser { toks, at: 0, opts }.program()
}
