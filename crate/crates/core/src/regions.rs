//! Measurable regions and their optimization.
//!
//! A region starts before a statement whose influence differs from that of
//! its immediate dominator and extends along the post-dominator chain while
//! the influence stays the same. Optimization raises influences (never adding
//! option combinations absent from the original interaction set) so that
//! neighbouring regions merge and regions move out of loops and callees.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashSet};
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::lang::cfg::{NodeIdx, ENTRY, EXIT};
use crate::lang::{ControlFlowGraph, Edge, Function, Program, StmtId};
use crate::options::OptionSet;
use crate::taint::{InteractionSet, StatementInfluenceMap};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegionId(pub String);

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegionError {
    #[error("influence map has no entry for statement {0}")]
    MissingStatement(StmtId),
}

/// Serializes edges as `[from, to]` pairs.
fn edge_pairs<S: Serializer>(edges: &[Edge], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(edges.len()))?;
    for e in edges {
        seq.serialize_element(&(e.from, e.to))?;
    }
    seq.end()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Region {
    pub id: RegionId,
    /// `base`, or `R1`, `R2`, ... in source order of the first statement.
    pub name: String,
    pub function: String,
    pub options: OptionSet,
    #[serde(serialize_with = "edge_pairs")]
    pub start: Vec<Edge>,
    #[serde(serialize_with = "edge_pairs")]
    pub end: Vec<Edge>,
    /// First statement of the region; `None` for the base region.
    #[serde(skip)]
    pub first: Option<StmtId>,
    /// Statements attributed to the region when not inside a nested one.
    #[serde(skip)]
    pub body: Vec<StmtId>,
}

impl Region {
    pub fn is_base(&self) -> bool {
        self.first.is_none()
    }
}

/// Options of every region.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegionInfluenceMap(pub BTreeMap<RegionId, OptionSet>);

impl RegionInfluenceMap {
    pub fn get(&self, id: &RegionId) -> Option<&OptionSet> {
        self.0.get(id)
    }

    /// The distinct non-empty option sets.
    pub fn interactions(&self) -> InteractionSet {
        self.0.values().cloned().collect()
    }
}

/// The regions of one program, base region first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionSet {
    regions: Vec<Region>,
    base: RegionId,
}

impl RegionSet {
    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn base(&self) -> &Region {
        &self.regions[0]
    }

    pub fn get(&self, id: &RegionId) -> Option<&Region> {
        self.regions.iter().find(|r| r.id == *id)
    }

    pub fn by_name(&self, name: &str) -> Option<&Region> {
        self.regions.iter().find(|r| r.name == name)
    }

    /// Regions other than the base region.
    pub fn option_regions(&self) -> impl Iterator<Item = &Region> + '_ {
        self.regions.iter().skip(1)
    }

    pub fn influence_map(&self) -> RegionInfluenceMap {
        RegionInfluenceMap(self.regions.iter().map(|r| (r.id.clone(), r.options.clone())).collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("region report serializes")
    }
}

fn region_id(tag: &str, function: &str, start: &[Edge]) -> RegionId {
    let mut h = Sha256::new();
    h.update(tag.as_bytes());
    h.update([0]);
    h.update(function.as_bytes());
    for e in start {
        h.update(format!("|{}>{}:{:?}", e.from, e.to, e.label).as_bytes());
    }
    RegionId(hex::encode(h.finalize())[..16].to_string())
}

fn node_influence<'a>(cfg: &ControlFlowGraph, si: &'a StatementInfluenceMap, n: NodeIdx) -> &'a OptionSet {
    static EMPTY: OptionSet = OptionSet::new();
    match cfg.node(n).stmt() {
        Some(id) => si.get(id),
        None => &EMPTY,
    }
}

/// Nodes reachable from `start` without entering `stop`.
fn reach_until(cfg: &ControlFlowGraph, start: NodeIdx, stop: NodeIdx) -> Vec<NodeIdx> {
    let mut seen = vec![false; cfg.len()];
    let mut stack = vec![start];
    let mut out = Vec::new();
    seen[start] = true;
    while let Some(n) = stack.pop() {
        out.push(n);
        for &(m, _) in cfg.succs(n) {
            if m != stop && !seen[m] {
                seen[m] = true;
                stack.push(m);
            }
        }
    }
    out.sort_unstable();
    out
}

fn function_regions(f: &Function, si: &StatementInfluenceMap, out: &mut Vec<Region>) {
    let cfg = f.cfg();
    for s in 0..cfg.len() {
        let Some(first) = cfg.node(s).stmt() else { continue };
        let inf = node_influence(cfg, si, s);
        if inf.is_empty() {
            continue;
        }
        let d = cfg.idom_idx(s).expect("statements have dominators");
        if node_influence(cfg, si, d) == inf {
            continue;
        }
        let mut p = cfg.ipdom_idx(s).expect("statements reach exit");
        while p != EXIT && node_influence(cfg, si, p) == inf && cfg.dominates_idx(s, p) && p != s {
            p = cfg.ipdom_idx(p).expect("statements reach exit");
        }
        let body = reach_until(cfg, s, p);
        let inside: HashSet<NodeIdx> = body.iter().copied().collect();
        let start: Vec<Edge> =
            cfg.preds(s).iter().filter(|(u, _)| !inside.contains(u)).map(|&(u, l)| cfg.edge(u, s, l)).collect();
        let mut end: Vec<Edge> = Vec::new();
        for &u in &body {
            for &(v, l) in cfg.succs(u) {
                if v == p {
                    end.push(cfg.edge(u, v, l));
                }
            }
        }
        out.push(Region {
            id: region_id("region", &f.name, &start),
            name: String::new(),
            function: f.name.clone(),
            options: inf.clone(),
            start,
            end,
            first: Some(first),
            body: body.iter().filter_map(|&n| cfg.node(n).stmt()).collect(),
        });
    }
}

/// Derives regions from an influence map.
pub fn identify_regions(program: &Program, si: &StatementInfluenceMap) -> Result<RegionSet, RegionError> {
    for id in program.stmt_ids() {
        if !si.contains(id) {
            return Err(RegionError::MissingStatement(id));
        }
    }
    let main = program.entry_function();
    let cfg = main.cfg();
    let start = vec![cfg.edge(ENTRY, cfg.succs(ENTRY)[0].0, cfg.succs(ENTRY)[0].1)];
    let end = cfg.preds(EXIT).iter().map(|&(u, l)| cfg.edge(u, EXIT, l)).collect();
    let base = Region {
        id: region_id("base", &main.name, &start),
        name: "base".into(),
        function: main.name.clone(),
        options: OptionSet::new(),
        start,
        end,
        first: None,
        body: cfg.stmts().collect(),
    };
    let mut regions = Vec::new();
    for f in program.functions() {
        function_regions(f, si, &mut regions);
    }
    regions.sort_by_key(|r| r.first);
    for (i, r) in regions.iter_mut().enumerate() {
        r.name = format!("R{}", i + 1);
    }
    let base_id = base.id.clone();
    regions.insert(0, base);
    Ok(RegionSet { regions, base: base_id })
}

/// Whether two influence sets may share a region without creating a new
/// interaction.
pub fn merge_ok(i1: &OptionSet, i2: &OptionSet, gi: &InteractionSet) -> bool {
    gi.contains(&i1.union(i2))
}

type Priority = (u32, u32, Reverse<StmtId>);

struct Propagation<'a> {
    program: &'a Program,
    cfg: &'a ControlFlowGraph,
    si: &'a mut StatementInfluenceMap,
    gi: &'a InteractionSet,
    heap: BinaryHeap<(Priority, NodeIdx)>,
    queued: HashSet<NodeIdx>,
    changed: bool,
}

impl Propagation<'_> {
    fn inf(&self, n: NodeIdx) -> OptionSet {
        node_influence(self.cfg, self.si, n).clone()
    }

    fn push(&mut self, n: NodeIdx) {
        let Some(id) = self.cfg.node(n).stmt() else { return };
        if self.queued.insert(n) {
            let info = self.program.info(id);
            self.heap.push(((info.loop_depth, info.nesting_depth, Reverse(id)), n));
        }
    }

    fn is_control(&self, n: NodeIdx) -> bool {
        self.cfg.head(n).is_some_and(|h| h.is_branching())
    }

    fn raise(&mut self, n: NodeIdx, to: OptionSet) {
        let id = self.cfg.node(n).stmt().expect("statement node");
        self.si.set(id, to);
        self.changed = true;
        self.push(n);
        for k in 0..self.cfg.succs(n).len() {
            let m = self.cfg.succs(n)[k].0;
            self.push(m);
        }
        if self.is_control(n) {
            self.down(n);
        }
    }

    /// Raises statements between a control statement and its immediate
    /// post-dominator whose influence is a strict subset of its own.
    fn down(&mut self, c: NodeIdx) {
        let target = self.inf(c);
        let stop = self.cfg.ipdom_idx(c).expect("statements reach exit");
        for n in reach_until(self.cfg, c, stop) {
            if n != c && self.inf(n).is_strict_subset(&target) {
                self.raise(n, target.clone());
            }
        }
    }

    fn up(&mut self) {
        while let Some((_, n)) = self.heap.pop() {
            self.queued.remove(&n);
            let mut s = self.inf(n);
            if s.is_empty() {
                continue;
            }
            for k in 0..self.cfg.preds(n).len() {
                let p = self.cfg.preds(n)[k].0;
                if p == ENTRY {
                    continue;
                }
                let pi = self.inf(p);
                if pi.is_empty() {
                    continue;
                }
                let u = pi.union(&s);
                if u == pi || !merge_ok(&pi, &s, self.gi) {
                    continue;
                }
                self.raise(p, u.clone());
                if s != u {
                    self.raise(n, u.clone());
                    s = u;
                }
            }
        }
    }
}

/// Raises influences inside `function` until nothing changes.
fn optimize_function(program: &Program, f: &Function, si: &mut StatementInfluenceMap, gi: &InteractionSet) {
    let cfg = f.cfg();
    loop {
        let mut prop =
            Propagation { program, cfg, si, gi, heap: BinaryHeap::new(), queued: HashSet::new(), changed: false };
        for n in 0..cfg.len() {
            prop.push(n);
        }
        prop.up();
        for n in 0..cfg.len() {
            if prop.is_control(n) {
                prop.down(n);
            }
        }
        if !prop.changed {
            break;
        }
    }
}

/// Moves a callee whose whole body shares one influence set to its call
/// sites, when every site can absorb it.
fn pull_out(program: &Program, f: &Function, si: &mut StatementInfluenceMap, gi: &InteractionSet) -> bool {
    if f.name == program.entry() {
        return false;
    }
    let ids: Vec<StmtId> = f.cfg().stmts().collect();
    let common = si.get(ids[0]).clone();
    if common.is_empty() || ids.iter().any(|id| *si.get(*id) != common) {
        return false;
    }
    let sites: Vec<StmtId> = program.call_graph().call_sites(&f.name).map(|e| e.site).collect();
    if sites.is_empty() {
        return false;
    }
    let ok = sites.iter().all(|site| {
        let s = si.get(*site);
        !s.is_empty() && merge_ok(s, &common, gi)
    });
    if !ok {
        return false;
    }
    for site in sites {
        let u = si.get(site).union(&common);
        si.set(site, u);
    }
    for id in ids {
        si.set(id, OptionSet::new());
    }
    true
}

/// The optimized influence map: same interactions, fewer and larger regions.
pub fn optimize_influence(program: &Program, si: &StatementInfluenceMap) -> StatementInfluenceMap {
    let gi = si.interactions();
    let mut cur = si.clone();
    for f in program.callee_first() {
        optimize_function(program, f, &mut cur, &gi);
        pull_out(program, f, &mut cur, &gi);
    }
    cur
}

/// Regions derived from the optimized influence map.
pub fn optimize(program: &Program, si: &StatementInfluenceMap) -> Result<RegionSet, RegionError> {
    identify_regions(program, si)?;
    identify_regions(program, &optimize_influence(program, si))
}

/// Applies only the downward rule to every control statement.
pub fn propagate_down(program: &Program, si: &StatementInfluenceMap) -> StatementInfluenceMap {
    let mut cur = si.clone();
    let gi = si.interactions();
    for f in program.functions() {
        let mut prop = Propagation {
            program,
            cfg: f.cfg(),
            si: &mut cur,
            gi: &gi,
            heap: BinaryHeap::new(),
            queued: HashSet::new(),
            changed: false,
        };
        for n in 0..f.cfg().len() {
            if prop.is_control(n) {
                prop.down(n);
            }
        }
    }
    cur
}

/// Applies only the upward rule (with its downward follow-ups), using `gi`
/// as the admissible interactions.
pub fn propagate_up(program: &Program, si: &StatementInfluenceMap, gi: &InteractionSet) -> StatementInfluenceMap {
    let mut cur = si.clone();
    for f in program.callee_first() {
        let mut prop = Propagation {
            program,
            cfg: f.cfg(),
            si: &mut cur,
            gi,
            heap: BinaryHeap::new(),
            queued: HashSet::new(),
            changed: false,
        };
        for n in 0..f.cfg().len() {
            prop.push(n);
        }
        prop.up();
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::lang::parse;
    use crate::lang::StmtKind;
    use crate::options::opts;
    use crate::taint::analyze;

    #[test]
    fn short_example_unoptimized_has_three_regions() {
        let p = corpus::running_example_short();
        let rs = identify_regions(&p, &analyze(&p)).unwrap();
        let opts_of: Vec<(String, OptionSet)> =
            rs.option_regions().map(|r| (r.function.clone(), r.options.clone())).collect();
        assert_eq!(
            opts_of,
            vec![
                ("foo".to_string(), opts(&["A", "C"])),
                ("main".to_string(), opts(&["A"])),
                ("main".to_string(), opts(&["A", "B"])),
            ]
        );
        // the {A} region spans if(a), work(2000), call foo, x := true
        let r2 = rs.by_name("R2").unwrap();
        assert_eq!(r2.body.len(), 4);
        assert!(rs.base().is_base());
    }

    #[test]
    fn short_example_optimized_matches_two_regions() {
        let p = corpus::running_example_short();
        let si = analyze(&p);
        let rs = optimize(&p, &si).unwrap();
        let got: Vec<(String, OptionSet)> =
            rs.option_regions().map(|r| (r.function.clone(), r.options.clone())).collect();
        assert_eq!(got, vec![("main".into(), opts(&["A", "C"])), ("main".into(), opts(&["A", "B"]))]);
        assert!(rs.influence_map().interactions().is_subset(&si.interactions()));
    }

    #[test]
    fn clean_program_has_only_base() {
        let p = corpus::irrelevant();
        let si = analyze(&p);
        assert_eq!(identify_regions(&p, &si).unwrap().len(), 1);
        assert_eq!(optimize(&p, &si).unwrap().len(), 1);
    }

    #[test]
    fn merge_ok_is_membership_of_union() {
        let gi: InteractionSet = [opts(&["A"]), opts(&["A", "B"]), opts(&["A", "C"])].into_iter().collect();
        assert!(merge_ok(&opts(&["A"]), &opts(&["A", "B"]), &gi));
        assert!(!merge_ok(&opts(&["A", "B"]), &opts(&["A", "C"]), &gi));
        for i in gi.iter() {
            assert!(merge_ok(i, i, &gi));
        }
    }

    #[test]
    fn down_raises_followers_with_smaller_influence() {
        let p = parse("options A; fn main() { a := opt(\"A\"); if (a) { work(1); work(2); } }").unwrap();
        let mut si = analyze(&p);
        si.set(StmtId(1), opts(&["A", "B"]));
        let out = propagate_down(&p, &si);
        assert_eq!(out.get(StmtId(2)), &opts(&["A", "B"]));
        assert_eq!(out.get(StmtId(3)), &opts(&["A", "B"]));
    }

    #[test]
    fn down_leaves_incomparable_followers() {
        let p = parse("options A; fn main() { a := opt(\"A\"); if (a) { work(1); } }").unwrap();
        let mut si = analyze(&p);
        si.set(StmtId(1), opts(&["A", "B"]));
        si.set(StmtId(2), opts(&["A", "C"]));
        assert_eq!(propagate_down(&p, &si).get(StmtId(2)), &opts(&["A", "C"]));
    }

    #[test]
    fn up_requires_union_in_interactions() {
        let p = parse(
            "options B, C; fn main() { b := opt(\"B\"); c := opt(\"C\"); if (b) { work(1); } if (c) { work(2); } }",
        )
        .unwrap();
        let si = analyze(&p);
        let out = propagate_up(&p, &si, &si.interactions());
        assert_eq!(out, si);
    }

    #[test]
    fn up_pulls_region_out_of_loop() {
        let p = corpus::deep_loop();
        let si = analyze(&p);
        let header = p.stmt_ids().find(|id| matches!(p.stmt(*id).kind, StmtKind::While { .. })).unwrap();
        assert_eq!(si.get(header), &opts(&["A"]));
        let out = optimize_influence(&p, &si);
        assert_eq!(out.get(header), &opts(&["A", "B"]));
        let rs = identify_regions(&p, &out).unwrap();
        assert_eq!(rs.len(), 2);
        assert!(rs.option_regions().all(|r| p.info(r.first.unwrap()).loop_depth == 0));
    }

    #[test]
    fn region_ids_are_stable_and_distinct() {
        let p = corpus::running_example();
        let si = analyze(&p);
        let a = identify_regions(&p, &si).unwrap();
        let b = identify_regions(&p, &si).unwrap();
        assert_eq!(a, b);
        let ids: HashSet<&RegionId> = a.regions().iter().map(|r| &r.id).collect();
        assert_eq!(ids.len(), a.len());
    }

    #[test]
    fn missing_statement_is_reported() {
        let p = corpus::running_example_short();
        let si = StatementInfluenceMap::default();
        assert!(matches!(identify_regions(&p, &si), Err(RegionError::MissingStatement(_))));
    }
}
