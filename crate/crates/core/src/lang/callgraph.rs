//! Call graph over function names.

use serde::Serialize;

use super::ast::{walk_block, FunctionDef, StmtId, StmtKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CallEdge {
    pub caller: String,
    pub site: StmtId,
    pub callee: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CallGraph {
    functions: Vec<String>,
    edges: Vec<CallEdge>,
}

impl CallGraph {
    /// One edge per call statement, in source order.
    pub fn build(defs: &[FunctionDef]) -> CallGraph {
        let mut edges = Vec::new();
        for d in defs {
            walk_block(&d.body, &mut |s| {
                if let StmtKind::Call { callee, .. } = &s.kind {
                    edges.push(CallEdge { caller: d.name.clone(), site: s.id, callee: callee.clone() });
                }
            });
        }
        CallGraph { functions: defs.iter().map(|d| d.name.clone()).collect(), edges }
    }

    pub fn edges(&self) -> &[CallEdge] {
        &self.edges
    }

    pub fn callees<'a>(&'a self, caller: &'a str) -> impl Iterator<Item = &'a CallEdge> + 'a {
        self.edges.iter().filter(move |e| e.caller == caller)
    }

    pub fn call_sites<'a>(&'a self, callee: &'a str) -> impl Iterator<Item = &'a CallEdge> + 'a {
        self.edges.iter().filter(move |e| e.callee == callee)
    }

    /// First cycle found by depth-first search from each function in source
    /// order, written as `f -> g -> f`.
    pub fn find_cycle(&self) -> Option<Vec<String>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        fn visit(g: &CallGraph, f: usize, marks: &mut [Mark], path: &mut Vec<usize>) -> Option<Vec<String>> {
            marks[f] = Mark::Active;
            path.push(f);
            for e in g.callees(&g.functions[f]) {
                let Some(t) = g.functions.iter().position(|n| *n == e.callee) else { continue };
                match marks[t] {
                    Mark::Active => {
                        let start = path.iter().position(|&p| p == t).unwrap_or(0);
                        let mut cycle: Vec<String> = path[start..].iter().map(|&i| g.functions[i].clone()).collect();
                        cycle.push(g.functions[t].clone());
                        return Some(cycle);
                    }
                    Mark::New => {
                        if let Some(c) = visit(g, t, marks, path) {
                            return Some(c);
                        }
                    }
                    Mark::Done => {}
                }
            }
            path.pop();
            marks[f] = Mark::Done;
            None
        }
        let mut marks = vec![Mark::New; self.functions.len()];
        for f in 0..self.functions.len() {
            if marks[f] == Mark::New {
                if let Some(c) = visit(self, f, &mut marks, &mut Vec::new()) {
                    return Some(c);
                }
            }
        }
        None
    }

    /// Function names with callees before callers (requires acyclicity).
    pub fn callee_first(&self) -> Vec<String> {
        let mut done: Vec<String> = Vec::new();
        fn visit(g: &CallGraph, f: &str, done: &mut Vec<String>) {
            if done.iter().any(|d| d == f) {
                return;
            }
            for e in g.callees(f) {
                visit(g, &e.callee, done);
            }
            if !done.iter().any(|d| d == f) {
                done.push(f.to_string());
            }
        }
        for f in &self.functions {
            visit(self, f, &mut done);
        }
        done
    }
}
