//! Cost and accuracy of each approach against the ground truth.

use std::collections::{BTreeMap, HashSet};
use std::time::Instant;

use serde::Serialize;

use ccrush_core::baselines::{
    brute_force, feature_wise, learn, pair_wise, splat, Approach, BaselineError, LookupModel, PathModel, SamplePlan,
    DEFAULT_DEGREE,
};
use ccrush_core::exec::{run, MeasureOptions};
use ccrush_core::lang::Program;
use ccrush_core::model::{mape, ModelError, Predictor};
use ccrush_core::pipeline::{analyze_regions, run_pipeline, PipelineOptions};
use ccrush_core::{Configuration, Millis};

use crate::truth::GroundTruth;
use crate::CliError;

#[derive(Clone, Debug, Default, Serialize)]
pub struct ApproachRow {
    pub approach: String,
    pub label: String,
    /// Configurations measured.
    pub cost: Option<usize>,
    /// Mean absolute percentage error over configurations the approach did
    /// not measure; absent when it measured all of them.
    pub mape: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub events_optimized: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub events_unoptimized: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub options: usize,
    pub ground_truth: usize,
    pub approaches: Vec<ApproachRow>,
}

/// Wall-clock analysis time per approach, in milliseconds.
pub type Timings = BTreeMap<String, f64>;

fn evaluate<P: Predictor>(
    model: &P,
    truth: &[(Configuration, Millis)],
    sampled: &[Configuration],
) -> Result<Option<f64>, CliError> {
    let sampled: HashSet<Configuration> = sampled.iter().cloned().collect();
    match mape(model, truth, &sampled) {
        Ok(m) => Ok(Some(m)),
        Err(ModelError::EmptyEvaluation) => Ok(None),
        Err(e) => Err(CliError::Input(e.to_string())),
    }
}

fn events_over(program: &Program, optimize: bool, configs: &[Configuration]) -> Result<u64, CliError> {
    let (_, _, regions) = analyze_regions(program, optimize).map_err(|e| CliError::Input(e.to_string()))?;
    configs.iter().try_fold(0u64, |acc, c| {
        let r = run(program, c, &regions).map_err(|e| CliError::Input(e.to_string()))?;
        Ok(acc + r.trace.events.len() as u64)
    })
}

fn white_box(
    program: &Program,
    truth: &[(Configuration, Millis)],
    optimize: bool,
    jobs: usize,
) -> Result<ApproachRow, CliError> {
    let opts = PipelineOptions { optimize, measure: MeasureOptions { jobs, ..Default::default() } };
    let r = run_pipeline(program, opts).map_err(|e| CliError::Input(e.to_string()))?;
    let configs = &r.compressed.configurations;
    Ok(ApproachRow {
        cost: Some(configs.len()),
        mape: evaluate(&r.global, truth, configs)?,
        model: Some(r.global.render_seconds()),
        regions: Some(r.regions.len()),
        events_optimized: Some(events_over(program, true, configs)?),
        events_unoptimized: Some(events_over(program, false, configs)?),
        ..Default::default()
    })
}

fn black_box(
    plan: Result<SamplePlan, BaselineError>,
    truth: &[(Configuration, Millis)],
) -> Result<ApproachRow, CliError> {
    let plan = match plan {
        Ok(p) => p,
        Err(e) => return Ok(ApproachRow { error: Some(e.to_string()), ..Default::default() }),
    };
    let table: BTreeMap<Configuration, Millis> = truth.iter().cloned().collect();
    let measured = plan.select(&table).map_err(|e| CliError::Input(e.to_string()))?;
    let mut row = ApproachRow { cost: Some(plan.len()), ..Default::default() };
    match plan.approach {
        Approach::BruteForce => {
            row.mape = evaluate(&LookupModel::new(&measured), truth, &plan.configurations)?;
        }
        Approach::Splat | Approach::SplatLazy => {
            let model = PathModel::new(&plan, &measured).map_err(|e| CliError::Input(e.to_string()))?;
            row.mape = evaluate(&model, truth, &plan.configurations)?;
        }
        _ => match learn(&plan, &table, DEFAULT_DEGREE) {
            Ok(model) => {
                row.mape = evaluate(&model, truth, &plan.configurations)?;
                row.model = Some(model.render_seconds());
            }
            Err(e) => row.error = Some(e.to_string()),
        },
    }
    Ok(row)
}

pub fn compare(
    program: &Program,
    truth: &GroundTruth,
    approaches: &[Approach],
    optimize: bool,
    jobs: usize,
) -> Result<(ComparisonReport, Timings), CliError> {
    let pairs = truth.pairs();
    let mut rows = Vec::new();
    let mut timings = Timings::new();
    for &a in approaches {
        let start = Instant::now();
        let mut row = match a {
            Approach::WhiteBox => white_box(program, &pairs, optimize, jobs)?,
            Approach::BruteForce => black_box(brute_force(program.options()), &pairs)?,
            Approach::FeatureWise => black_box(feature_wise(program.options()), &pairs)?,
            Approach::PairWise => black_box(pair_wise(program.options()), &pairs)?,
            Approach::Splat => black_box(splat(program, false), &pairs)?,
            Approach::SplatLazy => black_box(splat(program, true), &pairs)?,
        };
        timings.insert(a.key().to_string(), start.elapsed().as_secs_f64() * 1000.0);
        row.approach = a.key().to_string();
        row.label = a.label().to_string();
        rows.push(row);
    }
    Ok((ComparisonReport { options: program.options().len(), ground_truth: pairs.len(), approaches: rows }, timings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truth::compute;
    use ccrush_core::corpus;

    #[test]
    fn running_example_costs() {
        let p = corpus::running_example();
        let gt = compute(&p, "h", 1).unwrap();
        let (r, t) = compare(&p, &gt, &Approach::ALL, true, 1).unwrap();
        let row = |k: &str| r.approaches.iter().find(|a| a.approach == k).unwrap();
        assert_eq!(row("cc").cost, Some(8));
        assert_eq!(row("cc").mape, Some(0.0));
        assert_eq!(row("bf").cost, Some(1024));
        assert_eq!(row("bf").mape, None);
        assert_eq!(row("fw").cost, Some(11));
        assert!(row("fw").mape.unwrap() > 0.0);
        assert_eq!(row("splat").cost, Some(1024));
        assert_eq!(row("splat-lazy").mape, Some(0.0));
        assert_eq!(t.len(), 6);
    }

    #[test]
    fn pair_wise_needs_two_options() {
        let p =
            ccrush_core::lang::parse("options A; fn main() { a := opt(\"A\"); if (a) { work(2); } work(1); }").unwrap();
        let gt = compute(&p, "h", 1).unwrap();
        let (r, _) = compare(&p, &gt, &[Approach::PairWise], true, 1).unwrap();
        assert!(r.approaches[0].error.is_some());
        assert_eq!(r.approaches[0].cost, None);
    }
}
