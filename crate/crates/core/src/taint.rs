//! Option-taint analysis.
//!
//! Walks the program from the entry function, tracking which options each
//! variable may depend on and which options the current control context
//! depends on. Functions are analyzed once per distinct context (parameter
//! taints plus context taint). Loops are iterated until variable taints stop
//! growing.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lang::{Expr, Program, Stmt, StmtId, StmtKind};
use crate::options::OptionSet;

/// Influencing options of every statement.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementInfluenceMap {
    influence: BTreeMap<StmtId, OptionSet>,
}

impl StatementInfluenceMap {
    /// Map with every statement of `program` set to the empty set.
    pub fn empty_for(program: &Program) -> Self {
        StatementInfluenceMap { influence: program.stmt_ids().map(|id| (id, OptionSet::new())).collect() }
    }

    pub fn get(&self, id: StmtId) -> &OptionSet {
        static EMPTY: OptionSet = OptionSet::new();
        self.influence.get(&id).unwrap_or(&EMPTY)
    }

    pub fn contains(&self, id: StmtId) -> bool {
        self.influence.contains_key(&id)
    }

    pub fn set(&mut self, id: StmtId, options: OptionSet) {
        self.influence.insert(id, options);
    }

    pub fn len(&self) -> usize {
        self.influence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.influence.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (StmtId, &OptionSet)> + '_ {
        self.influence.iter().map(|(k, v)| (*k, v))
    }

    /// The distinct non-empty influence sets.
    pub fn interactions(&self) -> InteractionSet {
        self.influence.values().filter(|s| !s.is_empty()).cloned().collect()
    }

    fn add(&mut self, id: StmtId, options: &OptionSet) {
        self.influence.entry(id).or_default().extend_from(options);
    }
}

/// A set of non-empty option sets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InteractionSet(BTreeSet<OptionSet>);

impl InteractionSet {
    pub fn new() -> Self {
        InteractionSet::default()
    }

    /// Inserts `set` unless it is empty.
    pub fn insert(&mut self, set: OptionSet) -> bool {
        !set.is_empty() && self.0.insert(set)
    }

    pub fn contains(&self, set: &OptionSet) -> bool {
        self.0.contains(set)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &OptionSet> + '_ {
        self.0.iter()
    }

    pub fn is_subset(&self, other: &InteractionSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Union of all member sets.
    pub fn options(&self) -> OptionSet {
        let mut out = OptionSet::new();
        for s in &self.0 {
            out.extend_from(s);
        }
        out
    }

    /// Members ordered by size, then lexicographically.
    pub fn by_degree(&self) -> Vec<&OptionSet> {
        let mut v: Vec<&OptionSet> = self.0.iter().collect();
        v.sort_by(|a, b| a.degree_cmp(b));
        v
    }
}

impl FromIterator<OptionSet> for InteractionSet {
    fn from_iter<T: IntoIterator<Item = OptionSet>>(iter: T) -> Self {
        let mut s = InteractionSet::new();
        for o in iter {
            s.insert(o);
        }
        s
    }
}

impl fmt::Display for InteractionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.by_degree().into_iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// Counters describing how much work the analysis did.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TaintStats {
    /// Distinct (function, context) pairs analyzed.
    pub contexts: usize,
    /// Most passes any single loop needed to stabilize.
    pub max_loop_passes: usize,
}

type Env = HashMap<String, OptionSet>;

struct Analyzer<'p> {
    program: &'p Program,
    si: StatementInfluenceMap,
    done: HashSet<(String, Vec<OptionSet>, OptionSet)>,
    stats: TaintStats,
}

fn expr_taint(e: &Expr, env: &Env) -> OptionSet {
    let mut out = OptionSet::new();
    for v in e.vars() {
        if let Some(t) = env.get(v) {
            out.extend_from(t);
        }
    }
    out
}

fn join(a: &mut Env, b: &Env) {
    for (k, v) in b {
        a.entry(k.clone()).or_default().extend_from(v);
    }
}

fn assign(env: &mut Env, var: &str, value: OptionSet, pc: &OptionSet) {
    if pc.is_empty() {
        env.insert(var.to_string(), value);
    } else {
        // Under an influenced context the old value may survive.
        let slot = env.entry(var.to_string()).or_default();
        slot.extend_from(&value);
        slot.extend_from(pc);
    }
}

impl Analyzer<'_> {
    fn function(&mut self, name: &str, params: Vec<OptionSet>, pc: OptionSet) {
        let key = (name.to_string(), params, pc);
        if self.done.contains(&key) {
            return;
        }
        self.stats.contexts += 1;
        let f = self.program.function(name).expect("validated call");
        let mut env: Env = f.params.iter().cloned().zip(key.1.iter().cloned()).collect();
        let body = &f.body;
        self.block(body, &mut env, &key.2);
        self.done.insert(key);
    }

    fn block(&mut self, block: &[Stmt], env: &mut Env, pc: &OptionSet) {
        for s in block {
            self.stmt(s, env, pc);
        }
    }

    fn stmt(&mut self, s: &Stmt, env: &mut Env, pc: &OptionSet) {
        match &s.kind {
            StmtKind::OptionRead { var, option } => {
                self.si.add(s.id, pc);
                assign(env, var, OptionSet::singleton(option.as_str()), pc);
            }
            StmtKind::Assign { var, expr } => {
                self.si.add(s.id, pc);
                let t = expr_taint(expr, env);
                assign(env, var, t, pc);
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                let ct = expr_taint(cond, env).union(pc);
                self.si.add(s.id, &ct);
                let mut t = env.clone();
                self.block(then_branch, &mut t, &ct);
                let mut f = env.clone();
                self.block(else_branch, &mut f, &ct);
                join(&mut t, &f);
                *env = t;
            }
            StmtKind::While { cond, body, .. } => {
                let mut passes = 0;
                loop {
                    passes += 1;
                    let ct = expr_taint(cond, env).union(pc);
                    self.si.add(s.id, &ct);
                    let mut after = env.clone();
                    self.block(body, &mut after, &ct);
                    let mut next = env.clone();
                    join(&mut next, &after);
                    if next == *env {
                        break;
                    }
                    *env = next;
                }
                self.stats.max_loop_passes = self.stats.max_loop_passes.max(passes);
            }
            StmtKind::Work { .. } | StmtKind::Return => self.si.add(s.id, pc),
            StmtKind::Call { callee, args } => {
                self.si.add(s.id, pc);
                let params = args.iter().map(|a| expr_taint(a, env)).collect();
                self.function(callee, params, pc.clone());
            }
        }
    }
}

/// Computes the statement influence map of `program`.
pub fn analyze(program: &Program) -> StatementInfluenceMap {
    analyze_with_stats(program).0
}

pub fn analyze_with_stats(program: &Program) -> (StatementInfluenceMap, TaintStats) {
    let mut a = Analyzer {
        program,
        si: StatementInfluenceMap::empty_for(program),
        done: HashSet::new(),
        stats: TaintStats::default(),
    };
    let entry = program.entry_function();
    let params = vec![OptionSet::new(); entry.params.len()];
    a.function(program.entry(), params, OptionSet::new());
    (a.si, a.stats)
}

/// The distinct non-empty influence sets of `si`.
pub fn interactions(si: &StatementInfluenceMap) -> InteractionSet {
    si.interactions()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::lang::parse;
    use crate::options::opts;

    fn stmt_where(p: &Program, f: impl Fn(&StmtKind) -> bool) -> Vec<StmtId> {
        p.stmt_ids().filter(|id| f(&p.stmt(*id).kind)).collect()
    }

    #[test]
    fn short_example_influences() {
        let p = corpus::running_example_short();
        let si = analyze(&p);
        // foo
        for id in p.stmt_ids().filter(|id| p.info(*id).function == "foo") {
            assert_eq!(si.get(id), &opts(&["A", "C"]), "{id}");
        }
        let ifs = stmt_where(&p, |k| matches!(k, StmtKind::If { .. }));
        let main_ifs: Vec<StmtId> = ifs.into_iter().filter(|id| p.info(*id).function == "main").collect();
        let if_a = main_ifs[0];
        let if_bx = main_ifs[1];
        assert_eq!(si.get(if_a), &opts(&["A"]));
        for id in p.stmt_ids().filter(|id| p.info(*id).parent == Some(if_a)) {
            assert_eq!(si.get(id), &opts(&["A"]));
        }
        assert_eq!(si.get(if_bx), &opts(&["A", "B"]));
        let reads = stmt_where(&p, |k| matches!(k, StmtKind::OptionRead { .. }));
        assert_eq!(reads.len(), 10);
        for id in reads {
            assert!(si.get(id).is_empty());
        }
        let expected: InteractionSet = [opts(&["A"]), opts(&["A", "B"]), opts(&["A", "C"])].into_iter().collect();
        assert_eq!(si.interactions(), expected);
    }

    #[test]
    fn full_example_interactions() {
        let si = analyze(&corpus::running_example());
        let expected: InteractionSet = [
            &["A"][..],
            &["A", "B"],
            &["A", "C"],
            &["B"],
            &["C"],
            &["D"],
            &["E"],
            &["F"],
            &["G"],
            &["H"],
            &["I"],
            &["D", "E", "F"],
        ]
        .iter()
        .map(|s| opts(s))
        .collect();
        assert_eq!(interactions(&si), expected);
    }

    #[test]
    fn unused_options_leave_everything_clean() {
        let si = analyze(&corpus::irrelevant());
        assert!(si.interactions().is_empty());
        assert!(si.iter().all(|(_, s)| s.is_empty()));
    }

    #[test]
    fn copies_carry_taint() {
        let p = parse("options A; fn main() { x := opt(\"A\"); y := x; if (y) { work(1); } }").unwrap();
        let si = analyze(&p);
        assert_eq!(si.get(StmtId(3)), &opts(&["A"]));
    }

    #[test]
    fn strong_update_clears_under_clean_context() {
        let p = parse("options A; fn main() { x := opt(\"A\"); x := true; if (x) { work(1); } }").unwrap();
        let si = analyze(&p);
        assert!(si.get(StmtId(3)).is_empty());
    }

    #[test]
    fn context_taint_is_restored_after_join() {
        let p =
            parse("options A; fn main() { a := opt(\"A\"); if (a) { work(1); } else { work(2); } work(3); }").unwrap();
        let si = analyze(&p);
        assert_eq!(si.get(StmtId(2)), &opts(&["A"]));
        assert!(si.get(StmtId(4)).is_empty());
    }

    #[test]
    fn loop_carried_taint_reaches_fixpoint() {
        // y only becomes tainted on the second pass over the body.
        let src = "options A; fn main() { a := opt(\"A\"); x := false; y := false; n := true;
            while (n) bound 3 { y := x; x := a; n := false; } if (y) { work(1); } }";
        let p = parse(src).unwrap();
        let (si, stats) = analyze_with_stats(&p);
        let last_if = p.stmt_ids().filter(|id| matches!(p.stmt(*id).kind, StmtKind::If { .. })).last().unwrap();
        assert_eq!(si.get(last_if), &opts(&["A"]));
        assert!(stats.max_loop_passes >= 2);
    }

    #[test]
    fn functions_are_analyzed_per_context() {
        let p = corpus::calls();
        let (si, stats) = analyze_with_stats(&p);
        assert_eq!(stats.contexts, 4);
        let heavy_work = p
            .stmt_ids()
            .filter(|id| matches!(&p.stmt(*id).kind, StmtKind::Work { .. }) && p.info(*id).function == "step")
            .last()
            .unwrap();
        // merged over the (A, false) and (B, C) contexts
        assert_eq!(si.get(heavy_work), &opts(&["A", "B", "C"]));
    }
}
