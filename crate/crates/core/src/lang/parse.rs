//! Lexer and recursive-descent parser for `.ccl` sources.
//!
//! ```text
//! program  := ("options" (OPT ("," OPT)*)? ";")? function*
//! function := "fn" IDENT "(" (IDENT ("," IDENT)*)? ")" block
//! block    := "{" stmt* "}"
//! stmt     := IDENT ":=" "opt" "(" STRING ")" ";"
//!           | IDENT ":=" expr ";"
//!           | "if" "(" expr ")" block ("else" (block | if-stmt))?
//!           | "while" "(" expr ")" "bound" INT block
//!           | "work" "(" DECIMAL ")" ";"
//!           | "call" IDENT "(" (expr ("," expr)*)? ")" ";"
//!           | "return" ";"
//! expr     := and ("||" and)*
//! and      := unary ("&&" unary)*
//! unary    := "!" unary | "true" | "false" | IDENT | "(" expr ")"
//! ```

use super::ast::{stmt, Expr, FunctionDef, Span, Stmt, StmtKind};
use super::error::LangError;
use super::program::Program;
use crate::options::OptionSet;
use crate::time::Millis;

const KEYWORDS: &[&str] =
    &["options", "fn", "if", "else", "while", "bound", "work", "call", "return", "opt", "true", "false"];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Assign,
    Not,
    AndAnd,
    OrOr,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Assign => "`:=`".into(),
            Tok::Not => "`!`".into(),
            Tok::AndAnd => "`&&`".into(),
            Tok::OrOr => "`||`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn syntax(span: Span, message: impl Into<String>) -> LangError {
    LangError::Syntax { span, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, LangError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        let advance = |n: usize, i: &mut usize, col: &mut u32| {
            *i += n;
            *col += n as u32;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' | ')' | '{' | '}' | ',' | ';' | '!' => {
                let t = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    _ => Tok::Not,
                };
                out.push((t, span));
                advance(1, &mut i, &mut col);
            }
            ':' if chars.get(i + 1) == Some(&'=') => {
                out.push((Tok::Assign, span));
                advance(2, &mut i, &mut col);
            }
            '&' if chars.get(i + 1) == Some(&'&') => {
                out.push((Tok::AndAnd, span));
                advance(2, &mut i, &mut col);
            }
            '|' if chars.get(i + 1) == Some(&'|') => {
                out.push((Tok::OrOr, span));
                advance(2, &mut i, &mut col);
            }
            '"' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                    j += 1;
                }
                if j >= chars.len() || chars[j] != '"' {
                    return Err(syntax(span, "unterminated string literal"));
                }
                out.push((Tok::Str(chars[start..j].iter().collect()), span));
                advance(j + 1 - i, &mut i, &mut col);
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                out.push((Tok::Number(chars[i..j].iter().collect()), span));
                advance(j - i, &mut i, &mut col);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                out.push((Tok::Ident(chars[i..j].iter().collect()), span));
                advance(j - i, &mut i, &mut col);
            }
            other => return Err(syntax(span, format!("unexpected character `{other}`"))),
        }
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect(&mut self, want: Tok) -> Result<Span, LangError> {
        if *self.peek() == want {
            Ok(self.bump().1)
        } else {
            Err(syntax(self.span(), format!("expected {}, found {}", want.describe(), self.peek().describe())))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<Span, LangError> {
        if self.is_kw(kw) {
            Ok(self.bump().1)
        } else {
            Err(syntax(self.span(), format!("expected `{kw}`, found {}", self.peek().describe())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Span), LangError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let span = self.bump().1;
                Ok((s, span))
            }
            t => Err(syntax(self.span(), format!("expected {what}, found {}", t.describe()))),
        }
    }

    fn program(&mut self) -> Result<(OptionSet, Vec<FunctionDef>), LangError> {
        let mut options = OptionSet::new();
        if self.is_kw("options") {
            self.bump();
            if *self.peek() != Tok::Semi {
                loop {
                    let (name, span) = self.ident("an option name")?;
                    if !is_option_name(&name) {
                        return Err(LangError::BadOptionName { span, name });
                    }
                    if !options.insert(name.clone()) {
                        return Err(LangError::DuplicateOption { span, name });
                    }
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::Semi)?;
        }
        let mut functions = Vec::new();
        while *self.peek() != Tok::Eof {
            functions.push(self.function()?);
        }
        Ok((options, functions))
    }

    fn function(&mut self) -> Result<FunctionDef, LangError> {
        let span = self.expect_kw("fn")?;
        let (name, _) = self.ident("a function name")?;
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let (p, pspan) = self.ident("a parameter name")?;
                if params.contains(&p) {
                    return Err(LangError::DuplicateParam { span: pspan, name: p });
                }
                params.push(p);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        let body = self.block()?;
        Ok(FunctionDef { name, params, body, span })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, LangError> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        while *self.peek() != Tok::RBrace {
            if *self.peek() == Tok::Eof {
                return Err(syntax(self.span(), "unclosed block"));
            }
            out.push(self.stmt()?);
        }
        self.bump();
        Ok(out)
    }

    fn stmt(&mut self) -> Result<Stmt, LangError> {
        let span = self.span();
        let kind = if self.is_kw("if") {
            return self.if_stmt();
        } else if self.is_kw("while") {
            self.bump();
            self.expect(Tok::LParen)?;
            let cond = self.expr()?;
            self.expect(Tok::RParen)?;
            self.expect_kw("bound")?;
            let bound = match self.bump() {
                (Tok::Number(n), nspan) => {
                    n.parse::<u64>().map_err(|_| syntax(nspan, format!("loop bound `{n}` is not an integer")))?
                }
                (t, tspan) => return Err(syntax(tspan, format!("expected loop bound, found {}", t.describe()))),
            };
            let body = self.block()?;
            StmtKind::While { cond, bound, body }
        } else if self.is_kw("work") {
            self.bump();
            self.expect(Tok::LParen)?;
            let cost = match self.bump() {
                (Tok::Number(n), nspan) => {
                    n.parse::<Millis>().map_err(|_| syntax(nspan, format!("invalid work cost `{n}`")))?
                }
                (t, tspan) => return Err(syntax(tspan, format!("expected work cost, found {}", t.describe()))),
            };
            self.expect(Tok::RParen)?;
            self.expect(Tok::Semi)?;
            StmtKind::Work { cost }
        } else if self.is_kw("call") {
            self.bump();
            let (callee, _) = self.ident("a function name")?;
            self.expect(Tok::LParen)?;
            let mut args = Vec::new();
            if *self.peek() != Tok::RParen {
                loop {
                    args.push(self.expr()?);
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
            self.expect(Tok::Semi)?;
            StmtKind::Call { callee, args }
        } else if self.is_kw("return") {
            self.bump();
            self.expect(Tok::Semi)?;
            StmtKind::Return
        } else {
            let (var, _) = self.ident("a statement")?;
            self.expect(Tok::Assign)?;
            let kind = if self.is_kw("opt") {
                self.bump();
                self.expect(Tok::LParen)?;
                let option = match self.bump() {
                    (Tok::Str(s), _) => s,
                    (t, tspan) => {
                        return Err(syntax(tspan, format!("expected option name string, found {}", t.describe())))
                    }
                };
                self.expect(Tok::RParen)?;
                StmtKind::OptionRead { var, option }
            } else {
                StmtKind::Assign { var, expr: self.expr()? }
            };
            self.expect(Tok::Semi)?;
            kind
        };
        Ok(Stmt { span, ..stmt(kind) })
    }

    fn if_stmt(&mut self) -> Result<Stmt, LangError> {
        let span = self.expect_kw("if")?;
        self.expect(Tok::LParen)?;
        let cond = self.expr()?;
        self.expect(Tok::RParen)?;
        let then_branch = self.block()?;
        let else_branch = if self.is_kw("else") {
            self.bump();
            if self.is_kw("if") {
                vec![self.if_stmt()?]
            } else {
                self.block()?
            }
        } else {
            Vec::new()
        };
        Ok(Stmt { span, ..stmt(StmtKind::If { cond, then_branch, else_branch }) })
    }

    fn expr(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.and_expr()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            lhs = Expr::or(lhs, self.and_expr()?);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            lhs = Expr::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, LangError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Expr::negate(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Expr::Lit(true))
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Expr::Lit(false))
            }
            _ => Ok(Expr::Var(self.ident("an expression")?.0)),
        }
    }
}

pub(crate) fn is_option_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

/// Parses and validates a `.ccl` source. The entry function is `main`.
pub fn parse(source: &str) -> Result<Program, LangError> {
    let toks = lex(source)?;
    let mut p = Parser { toks, pos: 0 };
    let (options, functions) = p.program()?;
    Program::new(options, functions, "main")
}
