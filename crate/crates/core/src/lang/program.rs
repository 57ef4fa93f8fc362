//! Validated programs.

use std::collections::{BTreeSet, HashMap};

use indexmap::IndexMap;

use super::ast::{walk_block, walk_block_mut, FunctionDef, Span, Stmt, StmtId, StmtKind};
use super::callgraph::CallGraph;
use super::cfg::ControlFlowGraph;
use super::error::LangError;
use super::parse::is_option_name;
use crate::options::OptionSet;

/// A validated function with its control-flow graph.
#[derive(Clone, Debug)]
pub struct Function {
    pub name: String,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
    pub span: Span,
    cfg: ControlFlowGraph,
}

impl Function {
    pub fn cfg(&self) -> &ControlFlowGraph {
        &self.cfg
    }
}

impl PartialEq for Function {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.params == other.params && self.body == other.body
    }
}

impl Eq for Function {}

/// Where a statement lives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StmtInfo {
    pub function: String,
    /// Number of enclosing `while` statements.
    pub loop_depth: u32,
    /// Number of enclosing `if`/`while` statements.
    pub nesting_depth: u32,
    pub parent: Option<StmtId>,
}

#[derive(Clone, Debug)]
pub struct Program {
    options: OptionSet,
    functions: IndexMap<String, Function>,
    entry: String,
    call_graph: CallGraph,
    info: Vec<StmtInfo>,
    stmts: HashMap<StmtId, Stmt>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.options == other.options && self.entry == other.entry && self.functions == other.functions
    }
}

impl Eq for Program {}

impl Program {
    /// Validates and assembles a program. Statement ids are reassigned in
    /// source pre-order across all functions.
    pub fn new(options: OptionSet, mut defs: Vec<FunctionDef>, entry: &str) -> Result<Program, LangError> {
        for o in options.iter() {
            if !is_option_name(o) {
                return Err(LangError::BadOptionName { span: Span::default(), name: o.to_string() });
            }
        }
        let mut next = 0u32;
        for d in &mut defs {
            walk_block_mut(&mut d.body, &mut |s| {
                s.id = StmtId(next);
                next += 1;
            });
        }

        let mut arity: IndexMap<&str, usize> = IndexMap::new();
        for d in &defs {
            if arity.insert(&d.name, d.params.len()).is_some() {
                return Err(LangError::DuplicateFunction { span: d.span, name: d.name.clone() });
            }
            let mut seen = BTreeSet::new();
            for p in &d.params {
                if !seen.insert(p) {
                    return Err(LangError::DuplicateParam { span: d.span, name: p.clone() });
                }
            }
        }
        if !arity.contains_key(entry) {
            return Err(LangError::MissingEntry { name: entry.to_string() });
        }
        for d in &defs {
            if d.body.is_empty() {
                return Err(LangError::EmptyBody { span: d.span, name: d.name.clone() });
            }
            let v = Validator { options: &options, arity: &arity };
            let mut assigned: BTreeSet<String> = d.params.iter().cloned().collect();
            v.block(&d.body, &mut assigned, true)?;
        }

        let call_graph = CallGraph::build(&defs);
        if let Some(cycle) = call_graph.find_cycle() {
            return Err(LangError::RecursiveCall { cycle });
        }

        let mut info = Vec::with_capacity(next as usize);
        let mut stmts = HashMap::with_capacity(next as usize);
        for d in &defs {
            index_block(&d.name, &d.body, 0, 0, None, &mut info, &mut stmts);
        }
        let functions = defs
            .into_iter()
            .map(|d| {
                let cfg = ControlFlowGraph::build(&d.body);
                (d.name.clone(), Function { name: d.name, params: d.params, body: d.body, span: d.span, cfg })
            })
            .collect();
        Ok(Program { options, functions, entry: entry.to_string(), call_graph, info, stmts })
    }

    pub fn options(&self) -> &OptionSet {
        &self.options
    }

    pub fn entry(&self) -> &str {
        &self.entry
    }

    pub fn entry_function(&self) -> &Function {
        &self.functions[&self.entry]
    }

    pub fn function(&self, name: &str) -> Option<&Function> {
        self.functions.get(name)
    }

    /// Functions in source order.
    pub fn functions(&self) -> impl Iterator<Item = &Function> + '_ {
        self.functions.values()
    }

    pub fn call_graph(&self) -> &CallGraph {
        &self.call_graph
    }

    pub fn statement_count(&self) -> usize {
        self.info.len()
    }

    /// All statement ids in source order.
    pub fn stmt_ids(&self) -> impl Iterator<Item = StmtId> {
        (0..self.info.len() as u32).map(StmtId)
    }

    pub fn stmt(&self, id: StmtId) -> &Stmt {
        &self.stmts[&id]
    }

    pub fn info(&self, id: StmtId) -> &StmtInfo {
        &self.info[id.0 as usize]
    }

    /// Functions ordered so that every callee precedes its callers;
    /// ties keep source order.
    pub fn callee_first(&self) -> Vec<&Function> {
        self.call_graph.callee_first().iter().map(|n| &self.functions[n.as_str()]).collect()
    }

    /// Whether any statement reads an option.
    pub fn reads_options(&self) -> bool {
        self.stmts.values().any(|s| matches!(s.kind, StmtKind::OptionRead { .. }))
    }
}

fn index_block(
    function: &str,
    block: &[Stmt],
    loop_depth: u32,
    nesting_depth: u32,
    parent: Option<StmtId>,
    info: &mut Vec<StmtInfo>,
    stmts: &mut HashMap<StmtId, Stmt>,
) {
    for s in block {
        debug_assert_eq!(info.len(), s.id.0 as usize);
        info.push(StmtInfo { function: function.to_string(), loop_depth, nesting_depth, parent });
        stmts.insert(s.id, s.clone());
        match &s.kind {
            StmtKind::If { then_branch, else_branch, .. } => {
                index_block(function, then_branch, loop_depth, nesting_depth + 1, Some(s.id), info, stmts);
                index_block(function, else_branch, loop_depth, nesting_depth + 1, Some(s.id), info, stmts);
            }
            StmtKind::While { body, .. } => {
                index_block(function, body, loop_depth + 1, nesting_depth + 1, Some(s.id), info, stmts);
            }
            _ => {}
        }
    }
}

struct Validator<'a> {
    options: &'a OptionSet,
    arity: &'a IndexMap<&'a str, usize>,
}

impl Validator<'_> {
    fn expr(&self, e: &super::ast::Expr, assigned: &BTreeSet<String>, span: Span) -> Result<(), LangError> {
        for v in e.vars() {
            if !assigned.contains(v) {
                return Err(LangError::UndefinedVariable { span, name: v.to_string() });
            }
        }
        Ok(())
    }

    fn block(&self, block: &[Stmt], assigned: &mut BTreeSet<String>, top: bool) -> Result<(), LangError> {
        for (i, s) in block.iter().enumerate() {
            match &s.kind {
                StmtKind::OptionRead { var, option } => {
                    if !self.options.contains(option) {
                        return Err(LangError::UndefinedOption { span: s.span, name: option.clone() });
                    }
                    assigned.insert(var.clone());
                }
                StmtKind::Assign { var, expr } => {
                    self.expr(expr, assigned, s.span)?;
                    assigned.insert(var.clone());
                }
                StmtKind::If { cond, then_branch, else_branch } => {
                    self.expr(cond, assigned, s.span)?;
                    let mut t = assigned.clone();
                    self.block(then_branch, &mut t, false)?;
                    let mut f = assigned.clone();
                    self.block(else_branch, &mut f, false)?;
                    *assigned = t.intersection(&f).cloned().collect();
                }
                StmtKind::While { cond, bound, body } => {
                    self.expr(cond, assigned, s.span)?;
                    if *bound == 0 {
                        return Err(LangError::ZeroBound { span: s.span });
                    }
                    if body.is_empty() {
                        return Err(LangError::EmptyLoopBody { span: s.span });
                    }
                    self.block(body, &mut assigned.clone(), false)?;
                }
                StmtKind::Work { .. } => {}
                StmtKind::Call { callee, args } => {
                    let Some(&expected) = self.arity.get(callee.as_str()) else {
                        return Err(LangError::UndefinedFunction { span: s.span, name: callee.clone() });
                    };
                    if expected != args.len() {
                        return Err(LangError::ArityMismatch {
                            span: s.span,
                            name: callee.clone(),
                            expected,
                            found: args.len(),
                        });
                    }
                    for a in args {
                        self.expr(a, assigned, s.span)?;
                    }
                }
                StmtKind::Return => {
                    if !top || i + 1 != block.len() {
                        return Err(LangError::MisplacedReturn { span: s.span });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Every statement of a block, flattened in source order.
pub fn flatten(block: &[Stmt]) -> Vec<&Stmt> {
    let mut out = Vec::new();
    walk_block(block, &mut |s| out.push(s));
    out
}
