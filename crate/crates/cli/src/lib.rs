//! Command-line front end for analyzing `.ccl` programs and comparing
//! sampling approaches against the full configuration space.

pub mod compare;
pub mod report;
pub mod truth;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ccrush_core::baselines::Approach;
use ccrush_core::compress::compress;
use ccrush_core::exec::{run, MeasureOptions};
use ccrush_core::lang::{parse, Program};
use ccrush_core::model::classify_regions;
use ccrush_core::pipeline::{analyze_regions, run_pipeline, PipelineOptions};
use ccrush_core::regions::RegionSet;
use ccrush_core::taint::analyze;
use ccrush_core::Configuration;

use report::{json as to_json, Format, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{message}")]
    Parse { path: String, message: String },
    #[error("{options} options exceed the brute-force cap of {cap}; provide a cached ground truth")]
    Cap { options: usize, cap: usize },
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    /// 1 when the analysis is infeasible, 2 for bad input.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Cap { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ccrush", version, about = "White-box performance-influence modeling for .ccl programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Program to analyze.
    pub file: PathBuf,
    /// Emit JSON.
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV.
    #[arg(long)]
    pub csv: bool,
    /// Worker threads for measurement.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

impl Common {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            Format::Markdown
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Statement influence and option interactions.
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Option-influenced regions.
    Regions {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        no_optimize: bool,
    },
    /// Compressed configuration set.
    Compress {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        no_optimize: bool,
    },
    /// Region times of one configuration.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        no_optimize: bool,
        /// Enabled options, e.g. `A,B`; empty for all disabled.
        #[arg(long, default_value = "")]
        config: String,
    },
    /// Global and local performance-influence models.
    Model {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        no_optimize: bool,
    },
    /// End-to-end time of every configuration.
    Groundtruth {
        #[command(flatten)]
        common: Common,
        /// Directory holding `<sha256>.gt.json` files.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Add a `metadata` object with wall-clock timings and cache status.
        #[arg(long)]
        timings: bool,
    },
    /// Cost and accuracy of each approach.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        no_optimize: bool,
        #[arg(long, value_delimiter = ',', default_value = "cc,bf,fw,pw,splat,splat-lazy")]
        approaches: Vec<Approach>,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        timings: bool,
    },
}

fn load(path: &Path) -> Result<(String, Program), CliError> {
    let source = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let program =
        parse(&source).map_err(|e| CliError::Parse { path: path.display().to_string(), message: e.to_string() })?;
    Ok((source, program))
}

fn input<E: ToString>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

/// Runs a command and returns what it prints on success.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Analyze { common } => cmd_analyze(common),
        Command::Regions { common, no_optimize } => cmd_regions(common, !no_optimize),
        Command::Compress { common, no_optimize } => cmd_compress(common, !no_optimize),
        Command::Run { common, no_optimize, config } => cmd_run(common, !no_optimize, config),
        Command::Model { common, no_optimize } => cmd_model(common, !no_optimize),
        Command::Groundtruth { common, cache, timings } => cmd_groundtruth(common, cache.as_deref(), *timings),
        Command::Compare { common, no_optimize, approaches, cache, timings } => {
            cmd_compare(common, !no_optimize, approaches, cache.as_deref(), *timings)
        }
    }
}

fn cmd_analyze(common: &Common) -> Result<String, CliError> {
    let (_, p) = load(&common.file)?;
    let si = analyze(&p);
    let interactions = si.interactions();
    let mut t = Table::new(["Statement", "Function", "Line", "Kind", "Influence"]);
    for id in p.stmt_ids() {
        let s = p.stmt(id);
        t.push([
            id.to_string(),
            p.info(id).function.clone(),
            s.span.line.to_string(),
            s.kind.keyword().to_string(),
            si.get(id).to_string(),
        ]);
    }
    Ok(match common.format() {
        Format::Json => to_json(&json!({
            "influence": si.iter().map(|(id, o)| (id.to_string(), json!(o))).collect::<serde_json::Map<_, _>>(),
            "interactions": interactions.by_degree(),
        })),
        Format::Csv => t.csv(),
        Format::Markdown => {
            let list: Vec<String> = interactions.by_degree().iter().map(|s| s.to_string()).collect();
            format!("{}\nInteractions ({}): {}\n", t.markdown(), list.len(), list.join(" "))
        }
    })
}

fn regions_for(p: &Program, optimize: bool) -> Result<RegionSet, CliError> {
    Ok(analyze_regions(p, optimize).map_err(input)?.2)
}

fn edges(es: &[ccrush_core::lang::Edge]) -> String {
    es.iter().map(|e| format!("{}->{}", e.from, e.to)).collect::<Vec<_>>().join(" ")
}

fn cmd_regions(common: &Common, optimize: bool) -> Result<String, CliError> {
    let (_, p) = load(&common.file)?;
    let rs = regions_for(&p, optimize)?;
    let mut t = Table::new(["Region", "Id", "Function", "Options", "Start", "End", "Statements"]);
    for r in rs.regions() {
        t.push([
            r.name.clone(),
            r.id.to_string(),
            r.function.clone(),
            r.options.to_string(),
            edges(&r.start),
            edges(&r.end),
            r.body.len().to_string(),
        ]);
    }
    Ok(match common.format() {
        Format::Json => to_json(&rs.to_json()),
        Format::Csv => t.csv(),
        Format::Markdown => t.markdown(),
    })
}

fn cmd_compress(common: &Common, optimize: bool) -> Result<String, CliError> {
    let (_, p) = load(&common.file)?;
    let rs = regions_for(&p, optimize)?;
    let cc = compress(&rs.influence_map().interactions()).with_universe(p.options());
    Ok(match common.format() {
        Format::Json => {
            to_json(&json!({ "size": cc.len(), "options": cc.options, "configurations": cc.configurations }))
        }
        Format::Csv => cc.to_csv(),
        Format::Markdown => {
            let mut t = Table::new(cc.options.iter().map(str::to_string));
            for c in &cc.configurations {
                t.push(cc.options.iter().map(|o| if c.is_enabled(o) { "1" } else { "0" }));
            }
            format!("{}\n{} configurations\n", t.markdown(), cc.len())
        }
    })
}

fn cmd_run(common: &Common, optimize: bool, config: &str) -> Result<String, CliError> {
    let (_, p) = load(&common.file)?;
    let rs = regions_for(&p, optimize)?;
    let c = Configuration::parse_list(config);
    let r = run(&p, &c, &rs).map_err(input)?;
    let mut t = Table::new(["Region", "Options", "Time (ms)", "Entries"]);
    let mut rows = Vec::new();
    for region in rs.regions() {
        let ms = r.region_times[&region.id];
        let entries = r.entries[&region.id];
        t.push([region.name.clone(), region.options.to_string(), ms.to_string(), entries.to_string()]);
        rows.push(
            json!({ "region": region.name, "id": region.id, "options": region.options, "ms": ms, "entries": entries }),
        );
    }
    Ok(match common.format() {
        Format::Json => to_json(&json!({
            "configuration": c,
            "end_to_end": r.end_to_end,
            "events": r.trace.events.len(),
            "regions": rows,
        })),
        Format::Csv => t.csv(),
        Format::Markdown => {
            format!("{}\nEnd-to-end: {} ms, region events: {}\n", t.markdown(), r.end_to_end, r.trace.events.len())
        }
    })
}

fn cmd_model(common: &Common, optimize: bool) -> Result<String, CliError> {
    let (_, p) = load(&common.file)?;
    let opts = PipelineOptions { optimize, measure: MeasureOptions { jobs: common.jobs, ..Default::default() } };
    let r = run_pipeline(&p, opts).map_err(input)?;
    let report = classify_regions(&r.locals, &r.performance);
    let mut t = Table::new(["Region", "Options", "Category", "Min degree", "Max degree", "Share", "Model (s)"]);
    for e in &report {
        let options = r.regions.get(&e.region).map(|x| x.options.to_string()).unwrap_or_default();
        let degree = |d: Option<usize>| d.map_or("-".to_string(), |d| d.to_string());
        t.push([
            e.name.clone(),
            options,
            e.category.to_string(),
            degree(e.min_degree),
            degree(e.max_degree),
            format!("{:.1}%", e.share * 100.0),
            e.model.clone(),
        ]);
    }
    Ok(match common.format() {
        Format::Json => to_json(&json!({
            "global": r.global,
            "rendered": r.global.render_seconds(),
            "locals": r.locals,
            "classification": report,
        })),
        Format::Csv => t.csv(),
        Format::Markdown => format!("Global model (s): {}\n\n{}", r.global.render_seconds(), t.markdown()),
    })
}

fn cmd_groundtruth(common: &Common, cache: Option<&Path>, timings: bool) -> Result<String, CliError> {
    let (source, p) = load(&common.file)?;
    let start = Instant::now();
    let (gt, cached) = truth::load_or_compute(&p, &source, cache, common.jobs)?;
    let elapsed = start.elapsed().as_secs_f64() * 1000.0;
    Ok(match common.format() {
        Format::Json => {
            let mut v = serde_json::to_value(&gt).expect("ground truth serializes");
            if timings {
                v["metadata"] = json!({ "cached": cached, "elapsed_ms": elapsed });
            }
            to_json(&v)
        }
        Format::Csv => {
            let mut t = Table::new(gt.options.iter().map(str::to_string).chain(["ms".to_string()]));
            for r in &gt.rows {
                t.push(gt.options.iter().map(|o| r.configuration.is_enabled(o).to_string()).chain([r.ms.to_string()]));
            }
            t.csv()
        }
        Format::Markdown => {
            let mut t = Table::new(["Configuration", "Time (ms)"]);
            for r in &gt.rows {
                t.push([r.configuration.to_string(), r.ms.to_string()]);
            }
            let mut out = format!("{}\n{} configurations\n", t.markdown(), gt.rows.len());
            if timings {
                out.push_str(&format!("cached: {cached}, elapsed: {elapsed:.1} ms\n"));
            }
            out
        }
    })
}

fn cmd_compare(
    common: &Common,
    optimize: bool,
    approaches: &[Approach],
    cache: Option<&Path>,
    timings: bool,
) -> Result<String, CliError> {
    let (source, p) = load(&common.file)?;
    let (gt, cached) = truth::load_or_compute(&p, &source, cache, common.jobs)?;
    let (report, times) = compare::compare(&p, &gt, approaches, optimize, common.jobs)?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    let mut headers = vec!["Approach", "Cost", "MAPE (%)", "Regions", "Events (opt)", "Events (unopt)", "Notes"];
    if timings {
        headers.push("Time (ms)");
    }
    let mut t = Table::new(headers);
    for row in &report.approaches {
        let mut cells = vec![
            row.label.clone(),
            opt(row.cost.map(|c| c.to_string())),
            opt(row.mape.map(|m| format!("{m:.2}"))),
            opt(row.regions.map(|r| r.to_string())),
            opt(row.events_optimized.map(|e| e.to_string())),
            opt(row.events_unoptimized.map(|e| e.to_string())),
            opt(row.error.clone()),
        ];
        if timings {
            cells.push(format!("{:.1}", times[&row.approach]));
        }
        t.push(cells);
    }
    Ok(match common.format() {
        Format::Json => {
            let mut v: Value = serde_json::to_value(&report).expect("report serializes");
            if timings {
                v["metadata"] = json!({ "ground_truth_cached": cached, "timings_ms": times });
            }
            to_json(&v)
        }
        Format::Csv => t.csv(),
        Format::Markdown => t.markdown(),
    })
}
