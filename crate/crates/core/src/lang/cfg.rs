//! Statement-level control-flow graphs.
//!
//! Every statement becomes one node. Conditionals and loops carry only their
//! condition ("head"); their bodies are separate nodes. Branching nodes list
//! their successors as `[true, false]`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::{Expr, Stmt, StmtId, StmtKind};
use super::dominance;
use crate::time::Millis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CfgNode {
    Entry,
    Exit,
    Stmt(StmtId),
}

impl CfgNode {
    pub fn stmt(&self) -> Option<StmtId> {
        match self {
            CfgNode::Stmt(id) => Some(*id),
            _ => None,
        }
    }
}

impl fmt::Display for CfgNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CfgNode::Entry => f.write_str("entry"),
            CfgNode::Exit => f.write_str("exit"),
            CfgNode::Stmt(id) => write!(f, "{id}"),
        }
    }
}

impl Serialize for CfgNode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CfgNode::Stmt(id) => s.serialize_u32(id.0),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for CfgNode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Id(u32),
            Name(String),
        }
        match Raw::deserialize(d)? {
            Raw::Id(n) => Ok(CfgNode::Stmt(StmtId(n))),
            Raw::Name(s) if s == "entry" => Ok(CfgNode::Entry),
            Raw::Name(s) if s == "exit" => Ok(CfgNode::Exit),
            Raw::Name(s) => Err(serde::de::Error::custom(format!("unknown CFG node `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeLabel {
    Fallthrough,
    True,
    False,
    LoopBack,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub from: CfgNode,
    pub to: CfgNode,
    pub label: EdgeLabel,
}

/// What a node does when control reaches it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Head {
    OptionRead { var: String, option: String },
    Assign { var: String, expr: Expr },
    Branch { cond: Expr },
    Loop { cond: Expr, bound: u64 },
    Work { cost: Millis },
    Call { callee: String, args: Vec<Expr> },
    Return,
}

impl Head {
    fn of(kind: &StmtKind) -> Head {
        match kind {
            StmtKind::OptionRead { var, option } => Head::OptionRead { var: var.clone(), option: option.clone() },
            StmtKind::Assign { var, expr } => Head::Assign { var: var.clone(), expr: expr.clone() },
            StmtKind::If { cond, .. } => Head::Branch { cond: cond.clone() },
            StmtKind::While { cond, bound, .. } => Head::Loop { cond: cond.clone(), bound: *bound },
            StmtKind::Work { cost } => Head::Work { cost: *cost },
            StmtKind::Call { callee, args } => Head::Call { callee: callee.clone(), args: args.clone() },
            StmtKind::Return => Head::Return,
        }
    }

    pub fn is_branching(&self) -> bool {
        matches!(self, Head::Branch { .. } | Head::Loop { .. })
    }
}

/// Dense node index; `0` is entry and `1` is exit.
pub type NodeIdx = usize;

pub const ENTRY: NodeIdx = 0;
pub const EXIT: NodeIdx = 1;

#[derive(Clone, Debug)]
pub struct ControlFlowGraph {
    nodes: Vec<CfgNode>,
    heads: Vec<Option<Head>>,
    succs: Vec<Vec<(NodeIdx, EdgeLabel)>>,
    preds: Vec<Vec<(NodeIdx, EdgeLabel)>>,
    index: HashMap<CfgNode, NodeIdx>,
    idom: Vec<Option<NodeIdx>>,
    ipdom: Vec<Option<NodeIdx>>,
}

struct Builder {
    nodes: Vec<CfgNode>,
    heads: Vec<Option<Head>>,
    succs: Vec<Vec<(NodeIdx, EdgeLabel)>>,
}

impl Builder {
    fn add(&mut self, s: &Stmt) -> NodeIdx {
        self.nodes.push(CfgNode::Stmt(s.id));
        self.heads.push(Some(Head::of(&s.kind)));
        self.succs.push(Vec::new());
        self.nodes.len() - 1
    }

    // Allocates nodes in source pre-order, then wires them back to front.
    fn alloc(&mut self, block: &[Stmt], out: &mut Vec<NodeIdx>) {
        for s in block {
            out.push(self.add(s));
            match &s.kind {
                StmtKind::If { then_branch, else_branch, .. } => {
                    self.alloc(then_branch, &mut Vec::new());
                    self.alloc(else_branch, &mut Vec::new());
                }
                StmtKind::While { body, .. } => self.alloc(body, &mut Vec::new()),
                _ => {}
            }
        }
    }

    /// Wires `block` so that it falls through to `follow`; returns the
    /// block's first node (or `follow` when empty).
    fn wire(&mut self, block: &[Stmt], follow: NodeIdx, index: &HashMap<StmtId, NodeIdx>) -> NodeIdx {
        let mut next = follow;
        for s in block.iter().rev() {
            let n = index[&s.id];
            match &s.kind {
                StmtKind::If { then_branch, else_branch, .. } => {
                    let t = self.wire(then_branch, next, index);
                    let f = self.wire(else_branch, next, index);
                    self.succs[n] = vec![(t, EdgeLabel::True), (f, EdgeLabel::False)];
                }
                StmtKind::While { body, .. } => {
                    let b = self.wire(body, n, index);
                    self.succs[n] = vec![(b, EdgeLabel::True), (next, EdgeLabel::False)];
                }
                _ => self.succs[n] = vec![(next, EdgeLabel::Fallthrough)],
            }
            next = n;
        }
        next
    }
}

impl ControlFlowGraph {
    /// Builds the graph for a function body and computes its dominator trees.
    pub fn build(body: &[Stmt]) -> ControlFlowGraph {
        let mut b = Builder {
            nodes: vec![CfgNode::Entry, CfgNode::Exit],
            heads: vec![None, None],
            succs: vec![Vec::new(), Vec::new()],
        };
        b.alloc(body, &mut Vec::new());
        let stmt_index: HashMap<StmtId, NodeIdx> =
            b.nodes.iter().enumerate().filter_map(|(i, n)| n.stmt().map(|id| (id, i))).collect();
        let first = b.wire(body, EXIT, &stmt_index);
        b.succs[ENTRY] = vec![(first, EdgeLabel::Fallthrough)];

        let n = b.nodes.len();
        let mut cfg = ControlFlowGraph {
            index: b.nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect(),
            nodes: b.nodes,
            heads: b.heads,
            succs: b.succs,
            preds: vec![Vec::new(); n],
            idom: Vec::new(),
            ipdom: Vec::new(),
        };
        let adj: Vec<Vec<NodeIdx>> = cfg.succs.iter().map(|s| s.iter().map(|e| e.0).collect()).collect();
        cfg.idom = dominance::immediate_dominators(&adj, ENTRY);
        cfg.ipdom = dominance::immediate_dominators(&dominance::reverse(&adj), EXIT);

        // An edge whose target dominates its source closes a loop.
        for from in 0..n {
            for k in 0..cfg.succs[from].len() {
                let to = cfg.succs[from][k].0;
                if cfg.dominates_idx(to, from) {
                    cfg.succs[from][k].1 = EdgeLabel::LoopBack;
                }
            }
        }
        for from in 0..n {
            for &(to, label) in &cfg.succs[from] {
                cfg.preds[to].push((from, label));
            }
        }
        cfg
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: NodeIdx) -> CfgNode {
        self.nodes[i]
    }

    pub fn idx(&self, node: CfgNode) -> Option<NodeIdx> {
        self.index.get(&node).copied()
    }

    pub fn stmt_idx(&self, id: StmtId) -> Option<NodeIdx> {
        self.idx(CfgNode::Stmt(id))
    }

    pub fn nodes(&self) -> impl Iterator<Item = CfgNode> + '_ {
        self.nodes.iter().copied()
    }

    /// Statement nodes in source order.
    pub fn stmts(&self) -> impl Iterator<Item = StmtId> + '_ {
        self.nodes.iter().filter_map(CfgNode::stmt)
    }

    pub fn head(&self, i: NodeIdx) -> Option<&Head> {
        self.heads[i].as_ref()
    }

    pub fn succs(&self, i: NodeIdx) -> &[(NodeIdx, EdgeLabel)] {
        &self.succs[i]
    }

    pub fn preds(&self, i: NodeIdx) -> &[(NodeIdx, EdgeLabel)] {
        &self.preds[i]
    }

    pub fn edge(&self, from: NodeIdx, to: NodeIdx, label: EdgeLabel) -> Edge {
        Edge { from: self.nodes[from], to: self.nodes[to], label }
    }

    pub fn edges(&self) -> Vec<Edge> {
        (0..self.len()).flat_map(|f| self.succs[f].iter().map(move |&(t, l)| self.edge(f, t, l))).collect()
    }

    pub fn idom_idx(&self, i: NodeIdx) -> Option<NodeIdx> {
        self.idom[i]
    }

    pub fn ipdom_idx(&self, i: NodeIdx) -> Option<NodeIdx> {
        self.ipdom[i]
    }

    pub fn idom(&self, node: CfgNode) -> Option<CfgNode> {
        self.idx(node).and_then(|i| self.idom[i]).map(|i| self.nodes[i])
    }

    pub fn ipdom(&self, node: CfgNode) -> Option<CfgNode> {
        self.idx(node).and_then(|i| self.ipdom[i]).map(|i| self.nodes[i])
    }

    /// Whether `a` dominates `b` (reflexive).
    pub fn dominates_idx(&self, a: NodeIdx, b: NodeIdx) -> bool {
        dominance::in_tree_above(&self.idom, a, b)
    }

    /// Whether `a` post-dominates `b` (reflexive).
    pub fn post_dominates_idx(&self, a: NodeIdx, b: NodeIdx) -> bool {
        dominance::in_tree_above(&self.ipdom, a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn main_cfg(src: &str) -> ControlFlowGraph {
        parse(src).unwrap().function("main").unwrap().cfg().clone()
    }

    #[test]
    fn if_without_else() {
        let p = parse("fn main() { call f(true); } fn f(a) { if (a) { work(2); } }").unwrap();
        let cfg = p.function("f").unwrap().cfg();
        assert_eq!(cfg.len(), 4);
        let cond = cfg.stmt_idx(StmtId(1)).unwrap();
        let work = cfg.stmt_idx(StmtId(2)).unwrap();
        assert_eq!(cfg.succs(cond), &[(work, EdgeLabel::True), (EXIT, EdgeLabel::False)]);
        assert_eq!(cfg.ipdom_idx(cond), Some(EXIT));
    }

    #[test]
    fn diamond_joins_at_follower() {
        let cfg = main_cfg("fn main() { a := true; if (a) { work(1); } else { work(2); } work(3); }");
        let cond = cfg.stmt_idx(StmtId(1)).unwrap();
        let join = cfg.stmt_idx(StmtId(4)).unwrap();
        assert_eq!(cfg.ipdom_idx(cond), Some(join));
        assert_eq!(cfg.idom_idx(join), Some(cond));
        assert_eq!(cfg.preds(join).len(), 2);
    }

    #[test]
    fn straight_line_dominators_follow_predecessors() {
        let cfg = main_cfg("fn main() { work(1); work(2); work(3); work(4); }");
        for k in 0..4u32 {
            let n = cfg.stmt_idx(StmtId(k)).unwrap();
            let expected = if k == 0 { ENTRY } else { cfg.stmt_idx(StmtId(k - 1)).unwrap() };
            assert_eq!(cfg.idom_idx(n), Some(expected));
        }
    }

    #[test]
    fn loop_back_edges_are_retreating() {
        let cfg = main_cfg("fn main() { a := true; while (a) bound 3 { if (a) { a := false; } } work(1); }");
        let header = cfg.stmt_idx(StmtId(1)).unwrap();
        let inner = cfg.stmt_idx(StmtId(2)).unwrap();
        let assign = cfg.stmt_idx(StmtId(3)).unwrap();
        let back: Vec<Edge> = cfg.edges().into_iter().filter(|e| e.label == EdgeLabel::LoopBack).collect();
        assert_eq!(back.len(), 2);
        assert!(back.iter().all(|e| e.to == cfg.node(header)));
        assert!(back.iter().any(|e| e.from == cfg.node(inner)));
        assert!(back.iter().any(|e| e.from == cfg.node(assign)));
        assert_eq!(cfg.ipdom_idx(inner), Some(header));
    }
}
