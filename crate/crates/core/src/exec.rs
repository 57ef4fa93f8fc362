//! Interpreter with region instrumentation.
//!
//! Crossing a region's start edge pushes a frame on the region stack;
//! crossing an end edge pops it and charges the elapsed time minus the time
//! spent in nested regions. The default clock is virtual: only `work`
//! statements advance it.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compress::{verify_coverage, CompressedSet};
use crate::lang::cfg::{EdgeLabel, Head, NodeIdx, ENTRY, EXIT};
use crate::lang::{Expr, Program, StmtId};
use crate::options::{Configuration, OptionSet};
use crate::regions::{RegionId, RegionInfluenceMap, RegionSet};
use crate::time::Millis;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExecError {
    #[error("loop at statement {stmt} exceeded its bound of {bound} iterations")]
    LoopBoundExceeded { stmt: StmtId, bound: u64 },
    #[error("unbalanced region events: {0}")]
    UnbalancedRegions(String),
    #[error("configuration enables unknown option `{0}`")]
    UnknownOption(String),
    #[error("compressed set does not cover the interactions of the regions")]
    Coverage,
    #[error("repetitions must be positive")]
    ZeroRepetitions,
}

/// Supplies option values to a running program.
pub trait OptionOracle {
    /// When true, option reads yield placeholders that are resolved only when
    /// a condition needs them.
    fn lazy(&self) -> bool {
        false
    }

    fn value(&mut self, option: &str) -> bool;
}

impl OptionOracle for Configuration {
    fn value(&mut self, option: &str) -> bool {
        self.is_enabled(option)
    }
}

pub trait Clock {
    fn now(&self) -> Millis;
    fn work(&mut self, cost: Millis);
}

/// Time advances exactly by the declared work costs.
#[derive(Clone, Debug, Default)]
pub struct VirtualClock {
    now: Millis,
}

impl Clock for VirtualClock {
    fn now(&self) -> Millis {
        self.now
    }

    fn work(&mut self, cost: Millis) {
        self.now += cost;
    }
}

/// Sleeps for each work statement and reads the system clock.
#[derive(Clone, Debug)]
pub struct WallClock {
    start: Instant,
}

impl Default for WallClock {
    fn default() -> Self {
        WallClock { start: Instant::now() }
    }
}

impl Clock for WallClock {
    fn now(&self) -> Millis {
        Millis::from_f64_nanos(self.start.elapsed().as_secs_f64() * 1000.0)
    }

    fn work(&mut self, cost: Millis) {
        let ms = cost.to_f64().max(0.0);
        std::thread::sleep(Duration::from_secs_f64(ms / 1000.0));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Enter,
    Exit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub kind: EventKind,
    pub region: RegionId,
    pub at: Millis,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub events: Vec<TraceEvent>,
}

/// Enter plus exit events per region.
pub fn count_region_events(trace: &ExecutionTrace) -> BTreeMap<RegionId, u64> {
    let mut out = BTreeMap::new();
    for e in &trace.events {
        *out.entry(e.region.clone()).or_insert(0) += 1;
    }
    out
}

/// Total number of region events in a trace.
pub fn total_events(trace: &ExecutionTrace) -> u64 {
    trace.events.len() as u64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    /// Exclusive time per region, base region included.
    pub region_times: BTreeMap<RegionId, Millis>,
    /// How often each region was entered.
    pub entries: BTreeMap<RegionId, u64>,
    pub end_to_end: Millis,
    pub trace: ExecutionTrace,
    /// How often each statement executed.
    pub visits: BTreeMap<StmtId, u64>,
}

#[derive(Clone, Debug, Default)]
struct EdgeAction {
    ends: Vec<usize>,
    starts: Vec<usize>,
}

/// Region start/end actions attached to CFG edges.
#[derive(Clone, Debug)]
pub struct Instrumentation {
    ids: Vec<RegionId>,
    functions: HashMap<String, Vec<Vec<EdgeAction>>>,
}

impl Instrumentation {
    pub fn new(program: &Program, regions: &RegionSet) -> Instrumentation {
        let mut functions: HashMap<String, Vec<Vec<EdgeAction>>> = program
            .functions()
            .map(|f| {
                let cfg = f.cfg();
                let slots = (0..cfg.len()).map(|n| vec![EdgeAction::default(); cfg.succs(n).len()]).collect();
                (f.name.clone(), slots)
            })
            .collect();
        for (r, region) in regions.regions().iter().enumerate() {
            let cfg = program.function(&region.function).expect("region function exists").cfg();
            let slots = functions.get_mut(&region.function).expect("region function exists");
            let slot = |e: &crate::lang::Edge| -> (usize, usize) {
                let from = cfg.idx(e.from).expect("edge source in CFG");
                let to = cfg.idx(e.to).expect("edge target in CFG");
                let k = cfg.succs(from).iter().position(|&(t, l)| t == to && l == e.label).expect("edge in CFG");
                (from, k)
            };
            for e in &region.start {
                let (f, k) = slot(e);
                slots[f][k].starts.push(r);
            }
            for e in &region.end {
                let (f, k) = slot(e);
                slots[f][k].ends.push(r);
            }
        }
        Instrumentation { ids: regions.regions().iter().map(|r| r.id.clone()).collect(), functions }
    }
}

#[derive(Clone, Debug)]
enum Value {
    Bool(bool),
    Deferred(String),
}

struct Frame {
    region: usize,
    entry: Millis,
    child: Millis,
}

struct Interp<'a, O, C> {
    program: &'a Program,
    instr: Option<&'a Instrumentation>,
    oracle: &'a mut O,
    clock: &'a mut C,
    stack: Vec<Frame>,
    times: Vec<Millis>,
    entries: Vec<u64>,
    events: Vec<TraceEvent>,
    visits: BTreeMap<StmtId, u64>,
}

impl<O: OptionOracle, C: Clock> Interp<'_, O, C> {
    fn force(&mut self, v: &Value) -> bool {
        match v {
            Value::Bool(b) => *b,
            Value::Deferred(o) => self.oracle.value(o),
        }
    }

    fn eval(&mut self, e: &Expr, env: &HashMap<String, Value>) -> bool {
        match e {
            Expr::Var(v) => {
                let val = env[v].clone();
                self.force(&val)
            }
            Expr::Lit(b) => *b,
            Expr::Not(x) => !self.eval(x, env),
            Expr::And(a, b) => self.eval(a, env) && self.eval(b, env),
            Expr::Or(a, b) => self.eval(a, env) || self.eval(b, env),
        }
    }

    // Plain variable copies keep deferred values deferred.
    fn value(&mut self, e: &Expr, env: &HashMap<String, Value>) -> Value {
        match e {
            Expr::Var(v) => env[v].clone(),
            _ => Value::Bool(self.eval(e, env)),
        }
    }

    fn on_edge(&mut self, function: &str, from: NodeIdx, k: usize) -> Result<(), ExecError> {
        let Some(instr) = self.instr else { return Ok(()) };
        let action = &instr.functions[function][from][k];
        if action.ends.is_empty() && action.starts.is_empty() {
            return Ok(());
        }
        let now = self.clock.now();
        for _ in 0..action.ends.len() {
            let Some(frame) = self.stack.pop() else {
                return Err(ExecError::UnbalancedRegions(format!("exit with empty stack in `{function}`")));
            };
            if !action.ends.contains(&frame.region) {
                return Err(ExecError::UnbalancedRegions(format!(
                    "region {} left while {} is innermost",
                    instr.ids[action.ends[0]], instr.ids[frame.region]
                )));
            }
            let elapsed = now - frame.entry;
            self.times[frame.region] += elapsed - frame.child;
            if let Some(parent) = self.stack.last_mut() {
                parent.child += elapsed;
            }
            self.events.push(TraceEvent { kind: EventKind::Exit, region: instr.ids[frame.region].clone(), at: now });
        }
        for &r in &action.starts {
            self.stack.push(Frame { region: r, entry: now, child: Millis::ZERO });
            self.entries[r] += 1;
            self.events.push(TraceEvent { kind: EventKind::Enter, region: instr.ids[r].clone(), at: now });
        }
        Ok(())
    }

    fn call(&mut self, name: &str, args: Vec<Value>) -> Result<(), ExecError> {
        let program = self.program;
        let f = program.function(name).expect("validated call");
        let cfg = f.cfg();
        let mut env: HashMap<String, Value> = f.params.iter().cloned().zip(args).collect();
        let mut iterations: HashMap<NodeIdx, u64> = HashMap::new();
        let mut node = ENTRY;
        while node != EXIT {
            if let Some(id) = cfg.node(node).stmt() {
                *self.visits.entry(id).or_insert(0) += 1;
            }
            let k = match cfg.head(node) {
                None => 0,
                Some(Head::OptionRead { var, option }) => {
                    let v = if self.oracle.lazy() {
                        Value::Deferred(option.clone())
                    } else {
                        Value::Bool(self.oracle.value(option))
                    };
                    env.insert(var.clone(), v);
                    0
                }
                Some(Head::Assign { var, expr }) => {
                    let v = self.value(expr, &env);
                    env.insert(var.clone(), v);
                    0
                }
                Some(Head::Branch { cond }) => usize::from(!self.eval(cond, &env)),
                Some(Head::Loop { cond, bound }) => {
                    if self.eval(cond, &env) {
                        let n = iterations.entry(node).or_insert(0);
                        if *n >= *bound {
                            let stmt = cfg.node(node).stmt().expect("statement node");
                            return Err(ExecError::LoopBoundExceeded { stmt, bound: *bound });
                        }
                        *n += 1;
                        0
                    } else {
                        1
                    }
                }
                Some(Head::Work { cost }) => {
                    self.clock.work(*cost);
                    0
                }
                Some(Head::Call { callee, args }) => {
                    let vals = args.iter().map(|a| self.value(a, &env)).collect();
                    self.call(callee, vals)?;
                    0
                }
                Some(Head::Return) => 0,
            };
            let (next, label) = cfg.succs(node)[k];
            self.on_edge(name, node, k)?;
            if label != EdgeLabel::LoopBack && matches!(cfg.head(next), Some(Head::Loop { .. })) {
                iterations.remove(&next);
            }
            node = next;
        }
        Ok(())
    }
}

fn check_configuration(program: &Program, c: &Configuration) -> Result<(), ExecError> {
    match c.enabled().iter().find(|o| !program.options().contains(o)) {
        Some(o) => Err(ExecError::UnknownOption(o.to_string())),
        None => Ok(()),
    }
}

/// Runs `program` with any oracle and clock; `instr` may be absent for plain
/// end-to-end timing.
pub fn run_with<O: OptionOracle, C: Clock>(
    program: &Program,
    oracle: &mut O,
    instr: Option<&Instrumentation>,
    clock: &mut C,
) -> Result<RunResult, ExecError> {
    let n = instr.map_or(0, |i| i.ids.len());
    let start = clock.now();
    let mut it = Interp {
        program,
        instr,
        oracle,
        clock,
        stack: Vec::new(),
        times: vec![Millis::ZERO; n],
        entries: vec![0; n],
        events: Vec::new(),
        visits: BTreeMap::new(),
    };
    it.call(program.entry(), Vec::new())?;
    if let Some(top) = it.stack.last() {
        let id = &instr.expect("frames imply instrumentation").ids[top.region];
        return Err(ExecError::UnbalancedRegions(format!("region {id} still open at exit")));
    }
    let end_to_end = it.clock.now() - start;
    let ids: &[RegionId] = instr.map_or(&[], |i| &i.ids);
    Ok(RunResult {
        region_times: ids.iter().cloned().zip(it.times).collect(),
        entries: ids.iter().cloned().zip(it.entries).collect(),
        end_to_end,
        trace: ExecutionTrace { events: it.events },
        visits: it.visits,
    })
}

/// Runs one configuration under the virtual clock.
pub fn run(program: &Program, configuration: &Configuration, regions: &RegionSet) -> Result<RunResult, ExecError> {
    check_configuration(program, configuration)?;
    let instr = Instrumentation::new(program, regions);
    run_with(program, &mut configuration.clone(), Some(&instr), &mut VirtualClock::default())
}

/// End-to-end virtual time of one configuration, without instrumentation.
pub fn end_to_end(program: &Program, configuration: &Configuration) -> Result<Millis, ExecError> {
    check_configuration(program, configuration)?;
    Ok(run_with(program, &mut configuration.clone(), None, &mut VirtualClock::default())?.end_to_end)
}

/// End-to-end times for many configurations, in input order.
pub fn end_to_end_all(
    program: &Program,
    configurations: &[Configuration],
    jobs: usize,
) -> Result<Vec<Millis>, ExecError> {
    in_pool(jobs, || configurations.par_iter().map(|c| end_to_end(program, c)).collect())
}

fn in_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    pool.install(f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ClockKind {
    #[default]
    Virtual,
    Wall,
}

#[derive(Clone, Copy, Debug)]
pub struct MeasureOptions {
    pub repetitions: usize,
    pub jobs: usize,
    pub clock: ClockKind,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions { repetitions: 1, jobs: 1, clock: ClockKind::Virtual }
    }
}

/// Measurements of one configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpRow {
    pub configuration: Configuration,
    /// Exclusive time per region, averaged over repetitions.
    pub times: BTreeMap<RegionId, Millis>,
    pub entries: BTreeMap<RegionId, u64>,
    pub end_to_end: Millis,
    pub events: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionColumn {
    pub id: RegionId,
    pub name: String,
    pub options: OptionSet,
}

/// Per configuration, per region, accumulated exclusive time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigurationPerformanceMap {
    pub options: OptionSet,
    pub regions: Vec<RegionColumn>,
    pub rows: Vec<CpRow>,
}

impl ConfigurationPerformanceMap {
    pub fn region(&self, id: &RegionId) -> Option<&RegionColumn> {
        self.regions.iter().find(|r| r.id == *id)
    }

    /// Times of `region` grouped by the configuration's projection onto the
    /// region's options.
    pub fn samples(&self, id: &RegionId) -> BTreeMap<OptionSet, Vec<Millis>> {
        let mut out: BTreeMap<OptionSet, Vec<Millis>> = BTreeMap::new();
        let Some(col) = self.region(id) else { return out };
        for row in &self.rows {
            let t = row.times.get(id).copied().unwrap_or(Millis::ZERO);
            out.entry(row.configuration.project(&col.options)).or_default().push(t);
        }
        out
    }

    /// Mean time per projection group.
    pub fn averaged(&self, id: &RegionId) -> BTreeMap<OptionSet, Millis> {
        self.samples(id)
            .into_iter()
            .map(|(k, v)| {
                let n = v.len() as i64;
                (k, v.into_iter().sum::<Millis>() / n)
            })
            .collect()
    }

    pub fn total_events(&self) -> u64 {
        self.rows.iter().map(|r| r.events).sum()
    }

    /// Boolean option columns followed by one millisecond column per region.
    pub fn to_csv(&self) -> String {
        let mut header: Vec<String> = self.options.iter().map(str::to_string).collect();
        header.extend(self.regions.iter().map(|r| r.name.clone()));
        header.push("total".into());
        let mut out = header.join(",");
        out.push('\n');
        for row in &self.rows {
            let mut cells: Vec<String> =
                self.options.iter().map(|o| row.configuration.is_enabled(o).to_string()).collect();
            for r in &self.regions {
                cells.push(row.times.get(&r.id).copied().unwrap_or(Millis::ZERO).to_string());
            }
            cells.push(row.end_to_end.to_string());
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Full detail including projection groups.
    pub fn to_json(&self) -> serde_json::Value {
        let groups: Vec<serde_json::Value> = self
            .regions
            .iter()
            .map(|r| {
                let samples: Vec<serde_json::Value> = self
                    .samples(&r.id)
                    .into_iter()
                    .map(|(proj, v)| serde_json::json!({ "projection": proj, "samples": v }))
                    .collect();
                serde_json::json!({ "region": r.id, "name": r.name, "groups": samples })
            })
            .collect();
        serde_json::json!({
            "options": self.options,
            "regions": self.regions,
            "rows": self.rows,
            "projections": groups,
        })
    }
}

/// Runs every configuration of `cc` and records per-region times.
pub fn measure(
    program: &Program,
    cc: &CompressedSet,
    regions: &RegionSet,
    ri: &RegionInfluenceMap,
    repetitions: usize,
) -> Result<ConfigurationPerformanceMap, ExecError> {
    measure_with(
        program,
        &cc.configurations,
        Some(cc),
        regions,
        ri,
        MeasureOptions { repetitions, ..Default::default() },
    )
}

/// Like [`measure`], over an explicit configuration list.
pub fn measure_with(
    program: &Program,
    configurations: &[Configuration],
    cc: Option<&CompressedSet>,
    regions: &RegionSet,
    ri: &RegionInfluenceMap,
    opts: MeasureOptions,
) -> Result<ConfigurationPerformanceMap, ExecError> {
    if opts.repetitions == 0 {
        return Err(ExecError::ZeroRepetitions);
    }
    if let Some(cc) = cc {
        if !verify_coverage(cc, &ri.interactions()) {
            return Err(ExecError::Coverage);
        }
    }
    for c in configurations {
        check_configuration(program, c)?;
    }
    let instr = Instrumentation::new(program, regions);
    let one = |c: &Configuration| -> Result<CpRow, ExecError> {
        let mut times: BTreeMap<RegionId, Millis> = BTreeMap::new();
        let mut entries = BTreeMap::new();
        let mut total = Millis::ZERO;
        let mut events = 0;
        for _ in 0..opts.repetitions {
            let r = match opts.clock {
                ClockKind::Virtual => run_with(program, &mut c.clone(), Some(&instr), &mut VirtualClock::default())?,
                ClockKind::Wall => run_with(program, &mut c.clone(), Some(&instr), &mut WallClock::default())?,
            };
            for (id, t) in r.region_times {
                *times.entry(id).or_insert(Millis::ZERO) += t;
            }
            entries = r.entries;
            total += r.end_to_end;
            events = r.trace.events.len() as u64;
        }
        let reps = opts.repetitions as i64;
        for t in times.values_mut() {
            *t = *t / reps;
        }
        Ok(CpRow { configuration: c.clone(), times, entries, end_to_end: total / reps, events })
    };
    let rows: Result<Vec<CpRow>, ExecError> = in_pool(opts.jobs, || configurations.par_iter().map(one).collect());
    Ok(ConfigurationPerformanceMap {
        options: program.options().clone(),
        regions: regions
            .regions()
            .iter()
            .map(|r| RegionColumn { id: r.id.clone(), name: r.name.clone(), options: r.options.clone() })
            .collect(),
        rows: rows?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compress::compress;
    use crate::corpus;
    use crate::lang::parse;
    use crate::regions::{identify_regions, optimize};
    use crate::taint::analyze;

    fn ms(n: i64) -> Millis {
        Millis::from_integer(n)
    }

    fn cfg(list: &str) -> Configuration {
        Configuration::parse_list(list)
    }

    #[test]
    fn short_example_all_enabled() {
        let p = corpus::running_example_short();
        let rs = optimize(&p, &analyze(&p)).unwrap();
        let r = run(&p, &cfg("A,B,C"), &rs).unwrap();
        assert_eq!(r.region_times[&rs.base().id], ms(1000));
        assert_eq!(r.region_times[&rs.by_name("R1").unwrap().id], ms(6000));
        assert_eq!(r.region_times[&rs.by_name("R2").unwrap().id], ms(3000));
        assert_eq!(r.end_to_end, ms(10000));
        let r = run(&p, &Configuration::all_disabled(), &rs).unwrap();
        assert_eq!(r.region_times[&rs.base().id], ms(1000));
        assert!(r.region_times.values().filter(|t| !t.is_zero()).count() == 1);
    }

    #[test]
    fn nested_time_is_subtracted() {
        let p = parse("options A, B; fn main() { a := opt(\"A\"); b := opt(\"B\"); if (a) { work(5000); if (b) { work(2000); } } }")
            .unwrap();
        let rs = identify_regions(&p, &analyze(&p)).unwrap();
        let r = run(&p, &cfg("A,B"), &rs).unwrap();
        assert_eq!(r.region_times[&rs.by_name("R1").unwrap().id], ms(5000));
        assert_eq!(r.region_times[&rs.by_name("R2").unwrap().id], ms(2000));
        assert_eq!(r.region_times[&rs.base().id], ms(0));
    }

    #[test]
    fn base_only_program_has_two_events() {
        let p = corpus::irrelevant();
        let rs = identify_regions(&p, &analyze(&p)).unwrap();
        let r = run(&p, &Configuration::all_disabled(), &rs).unwrap();
        let counts = count_region_events(&r.trace);
        assert_eq!(counts.values().sum::<u64>(), 2);
        assert_eq!(r.trace.events[0].kind, EventKind::Enter);
    }

    #[test]
    fn loop_bound_is_enforced() {
        let p = parse("fn main() { x := true; while (x) bound 3 { work(1); } }").unwrap();
        let err = end_to_end(&p, &Configuration::all_disabled()).unwrap_err();
        assert_eq!(err, ExecError::LoopBoundExceeded { stmt: StmtId(1), bound: 3 });
        // the counter restarts each time the loop is entered afresh
        let p = parse("fn main() { y := true; while (y) bound 2 { x := true; while (x) bound 1 { x := false; } y := false; } call f(); }
            fn f() { x := true; while (x) bound 1 { x := false; } }")
        .unwrap();
        assert!(end_to_end(&p, &Configuration::all_disabled()).is_ok());
    }

    #[test]
    fn unknown_option_is_rejected() {
        let p = corpus::running_example_short();
        assert_eq!(end_to_end(&p, &cfg("Z")), Err(ExecError::UnknownOption("Z".into())));
    }

    #[test]
    fn measure_matches_hand_computed_region_times() {
        let p = corpus::running_example_short();
        let si = analyze(&p);
        let rs = optimize(&p, &si).unwrap();
        let cc = compress(&si.interactions());
        let cp = measure(&p, &cc, &rs, &rs.influence_map(), 1).unwrap();
        let col = |name: &str| -> Vec<Millis> {
            let id = &rs.by_name(name).unwrap().id;
            cp.rows.iter().map(|r| r.times[id]).collect()
        };
        assert_eq!(col("base"), vec![ms(1000); 4]);
        assert_eq!(col("R1"), vec![ms(0), ms(0), ms(3000), ms(6000)]);
        assert_eq!(col("R2"), vec![ms(0), ms(0), ms(0), ms(3000)]);
        let csv = cp.to_csv();
        assert!(csv.starts_with("A,B,C,D,E,F,G,H,I,J,base,R1,R2,total\n"));
    }

    #[test]
    fn measure_rejects_uncovering_sets() {
        let p = corpus::running_example_short();
        let rs = optimize(&p, &analyze(&p)).unwrap();
        let cc = compress(&[crate::opts(&["A"])].into_iter().collect());
        assert_eq!(measure(&p, &cc, &rs, &rs.influence_map(), 1), Err(ExecError::Coverage));
    }

    #[test]
    fn parallel_measurement_matches_sequential() {
        let p = corpus::running_example();
        let si = analyze(&p);
        let rs = optimize(&p, &si).unwrap();
        let configs = Configuration::enumerate(p.options());
        let ri = rs.influence_map();
        let seq = measure_with(&p, &configs, None, &rs, &ri, MeasureOptions::default()).unwrap();
        let par = measure_with(&p, &configs, None, &rs, &ri, MeasureOptions { jobs: 4, ..Default::default() }).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn lazy_oracle_defers_reads() {
        struct Log(Vec<String>);
        impl OptionOracle for Log {
            fn lazy(&self) -> bool {
                true
            }
            fn value(&mut self, option: &str) -> bool {
                self.0.push(option.to_string());
                false
            }
        }
        let p = corpus::running_example_short();
        let mut log = Log(Vec::new());
        run_with(&p, &mut log, None, &mut VirtualClock::default()).unwrap();
        // a is false, so `b && x` reads b and x is a plain boolean
        assert_eq!(log.0, vec!["A", "B"]);
    }
}
