//! The configurable-program language: syntax, validation, control flow.

pub mod ast;
pub mod callgraph;
pub mod cfg;
pub mod dominance;
pub mod error;
pub mod parse;
pub mod print;
pub mod program;

pub use ast::{Expr, FunctionDef, Span, Stmt, StmtId, StmtKind};
pub use callgraph::{CallEdge, CallGraph};
pub use cfg::{CfgNode, ControlFlowGraph, Edge, EdgeLabel, Head};
pub use error::LangError;
pub use parse::parse;
pub use print::print;
pub use program::{Function, Program, StmtInfo};
