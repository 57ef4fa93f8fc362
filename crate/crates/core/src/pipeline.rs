//! The whole analysis: taint, regions, compression, measurement, models.

use crate::compress::{compress, CompressedSet};
use crate::exec::{measure_with, ClockKind, ConfigurationPerformanceMap, ExecError, MeasureOptions};
use crate::lang::Program;
use crate::model::{build_global, build_locals, ModelError, PerformanceInfluenceModel};
use crate::regions::{identify_regions, optimize_influence, RegionError, RegionSet};
use crate::taint::{analyze, InteractionSet, StatementInfluenceMap};
use crate::time::Millis;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug)]
pub struct PipelineOptions {
    pub optimize: bool,
    pub measure: MeasureOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { optimize: true, measure: MeasureOptions::default() }
    }
}

impl PipelineOptions {
    /// Pruning threshold for model coefficients: exact under virtual time,
    /// one millisecond under wall time.
    pub fn epsilon(&self) -> Millis {
        match self.measure.clock {
            ClockKind::Virtual => Millis::ZERO,
            ClockKind::Wall => Millis::from_integer(1),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    /// Influence straight from the taint analysis.
    pub influence: StatementInfluenceMap,
    pub interactions: InteractionSet,
    /// Influence the regions were built from (optimized or not).
    pub region_influence: StatementInfluenceMap,
    pub regions: RegionSet,
    pub compressed: CompressedSet,
    pub performance: ConfigurationPerformanceMap,
    pub locals: Vec<PerformanceInfluenceModel>,
    pub global: PerformanceInfluenceModel,
}

/// Runs the taint analysis and builds regions, optionally from optimized
/// influence. Returns the raw influence alongside the influence actually used.
pub fn analyze_regions(
    program: &Program,
    optimize: bool,
) -> Result<(StatementInfluenceMap, StatementInfluenceMap, RegionSet), RegionError> {
    let si = analyze(program);
    let used = if optimize { optimize_influence(program, &si) } else { si.clone() };
    let regions = identify_regions(program, &used)?;
    Ok((si, used, regions))
}

pub fn run_pipeline(program: &Program, opts: PipelineOptions) -> Result<PipelineResult, PipelineError> {
    let (influence, region_influence, regions) = analyze_regions(program, opts.optimize)?;
    let ri = regions.influence_map();
    let compressed = compress(&ri.interactions()).with_universe(program.options());
    let performance =
        measure_with(program, &compressed.configurations, Some(&compressed), &regions, &ri, opts.measure)?;
    let locals = build_locals(&ri, &performance, opts.epsilon())?;
    let global = build_global(&locals);
    Ok(PipelineResult {
        interactions: influence.interactions(),
        influence,
        region_influence,
        regions,
        compressed,
        performance,
        locals,
        global,
    })
}
