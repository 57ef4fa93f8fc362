use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::time::Millis;

/// Program-wide statement identifier, assigned in source order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StmtId(pub u32);

impl fmt::Display for StmtId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(String),
    Lit(bool),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn negate(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }

    /// Variables referenced anywhere in the expression.
    pub fn vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expr::Var(v) => {
                out.insert(v);
            }
            Expr::Lit(_) => {}
            Expr::Not(e) => e.collect_vars(out),
            Expr::And(a, b) | Expr::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Stmt {
    pub id: StmtId,
    pub kind: StmtKind,
    pub span: Span,
}

// Spans are presentation only; two programs are structurally identical
// when ids and kinds agree.
impl PartialEq for Stmt {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.kind == other.kind
    }
}

impl Eq for Stmt {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    OptionRead { var: String, option: String },
    Assign { var: String, expr: Expr },
    If { cond: Expr, then_branch: Vec<Stmt>, else_branch: Vec<Stmt> },
    While { cond: Expr, bound: u64, body: Vec<Stmt> },
    Work { cost: Millis },
    Call { callee: String, args: Vec<Expr> },
    Return,
}

impl StmtKind {
    pub fn is_control(&self) -> bool {
        matches!(self, StmtKind::If { .. } | StmtKind::While { .. })
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            StmtKind::OptionRead { .. } => "opt",
            StmtKind::Assign { .. } => "assign",
            StmtKind::If { .. } => "if",
            StmtKind::While { .. } => "while",
            StmtKind::Work { .. } => "work",
            StmtKind::Call { .. } => "call",
            StmtKind::Return => "return",
        }
    }
}

/// Visits every statement of a block in source (pre-)order.
pub fn walk_block<'a>(block: &'a [Stmt], f: &mut impl FnMut(&'a Stmt)) {
    for s in block {
        f(s);
        match &s.kind {
            StmtKind::If { then_branch, else_branch, .. } => {
                walk_block(then_branch, f);
                walk_block(else_branch, f);
            }
            StmtKind::While { body, .. } => walk_block(body, f),
            _ => {}
        }
    }
}

pub(crate) fn walk_block_mut(block: &mut [Stmt], f: &mut impl FnMut(&mut Stmt)) {
    for s in block {
        f(s);
        match &mut s.kind {
            StmtKind::If { then_branch, else_branch, .. } => {
                walk_block_mut(then_branch, f);
                walk_block_mut(else_branch, f);
            }
            StmtKind::While { body, .. } => walk_block_mut(body, f),
            _ => {}
        }
    }
}

/// A function as written, before CFG construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

impl FunctionDef {
    pub fn new(name: impl Into<String>, params: Vec<String>, body: Vec<Stmt>) -> Self {
        FunctionDef { name: name.into(), params, body, span: Span::default() }
    }
}

/// Builds a statement with a placeholder id; ids are reassigned in source
/// order when the program is assembled.
pub fn stmt(kind: StmtKind) -> Stmt {
    Stmt { id: StmtId(0), kind, span: Span::default() }
}
