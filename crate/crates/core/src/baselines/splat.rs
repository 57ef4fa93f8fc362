//! Dynamic exploration of distinct execution paths.

use std::collections::{BTreeMap, BTreeSet};

use super::{Approach, BaselineError, PlanMetadata, Read, SamplePlan, DEFAULT_CAP};
use crate::exec::{run_with, OptionOracle, VirtualClock};
use crate::lang::Program;
use crate::model::Predictor;
use crate::options::Configuration;
use crate::time::Millis;

/// Answers reads from a forced prefix, then with `false`, recording the
/// first read of each option.
struct Explorer<'a> {
    lazy: bool,
    forced: &'a [Read],
    reads: Vec<Read>,
    seen: BTreeMap<String, bool>,
}

impl OptionOracle for Explorer<'_> {
    fn lazy(&self) -> bool {
        self.lazy
    }

    fn value(&mut self, option: &str) -> bool {
        if let Some(&v) = self.seen.get(option) {
            return v;
        }
        let i = self.reads.len();
        let v = match self.forced.get(i) {
            Some(r) => {
                debug_assert_eq!(r.option, option, "replay diverged");
                r.value
            }
            None => false,
        };
        self.reads.push(Read { option: option.to_string(), value: v });
        self.seen.insert(option.to_string(), v);
        v
    }
}

/// Explores every distinct sequence of option reads. With `lazy`, options
/// are read where a condition first needs them; otherwise every option
/// read statement reads immediately.
pub fn splat(program: &Program, lazy: bool) -> Result<SamplePlan, BaselineError> {
    splat_with_cap(program, lazy, DEFAULT_CAP)
}

pub fn splat_with_cap(program: &Program, lazy: bool, cap: usize) -> Result<SamplePlan, BaselineError> {
    let limit = 1usize << cap.min(usize::BITS as usize - 1);
    let mut stack: Vec<Vec<Read>> = vec![Vec::new()];
    let mut configurations = Vec::new();
    let mut runs = Vec::new();
    let mut seen = BTreeSet::new();
    while let Some(forced) = stack.pop() {
        let mut ex = Explorer { lazy, forced: &forced, reads: Vec::new(), seen: BTreeMap::new() };
        run_with(program, &mut ex, None, &mut VirtualClock::default())?;
        let reads = ex.reads;
        for i in forced.len()..reads.len() {
            let mut alt = reads[..i].to_vec();
            alt.push(Read { option: reads[i].option.clone(), value: true });
            stack.push(alt);
        }
        let c = Configuration::new(reads.iter().filter(|r| r.value).map(|r| r.option.clone()).collect());
        if seen.insert(c.clone()) {
            configurations.push(c);
            runs.push(reads);
        }
        if configurations.len() > limit {
            return Err(BaselineError::CapExceeded { options: program.options().len(), cap });
        }
    }
    Ok(SamplePlan {
        approach: if lazy { Approach::SplatLazy } else { Approach::Splat },
        options: program.options().clone(),
        configurations,
        metadata: PlanMetadata::Exploration { runs },
    })
}

/// Predicts a configuration by the measured run whose reads it agrees with.
#[derive(Clone, Debug, PartialEq)]
pub struct PathModel {
    paths: Vec<(Vec<Read>, Millis)>,
}

impl PathModel {
    /// Pairs each exploration run with its measurement.
    pub fn new(plan: &SamplePlan, measurements: &[(Configuration, Millis)]) -> Result<Self, BaselineError> {
        let PlanMetadata::Exploration { runs } = &plan.metadata else {
            return Ok(PathModel { paths: Vec::new() });
        };
        let table: BTreeMap<&Configuration, Millis> = measurements.iter().map(|(c, t)| (c, *t)).collect();
        let paths = plan
            .configurations
            .iter()
            .zip(runs)
            .map(|(c, r)| {
                table.get(c).map(|t| (r.clone(), *t)).ok_or_else(|| BaselineError::MissingMeasurement(c.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(PathModel { paths })
    }

    pub fn predict(&self, configuration: &Configuration) -> Option<Millis> {
        self.paths
            .iter()
            .find(|(reads, _)| reads.iter().all(|r| configuration.is_enabled(&r.option) == r.value))
            .map(|(_, t)| *t)
    }
}

impl Predictor for PathModel {
    fn predict_ms(&self, configuration: &Configuration) -> f64 {
        self.predict(configuration).map_or(0.0, |t| t.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::exec::end_to_end;
    use crate::lang::parse;

    #[test]
    fn lazy_short_example_explores_six() {
        let plan = splat(&corpus::running_example_short(), true).unwrap();
        assert_eq!(plan.len(), 6);
        assert_eq!(plan.configurations[0], Configuration::all_disabled());
    }

    #[test]
    fn eager_full_example_degenerates_to_brute_force() {
        assert_eq!(splat(&corpus::running_example(), false).unwrap().len(), 1024);
    }

    #[test]
    fn no_reads_means_one_run() {
        let p = parse("options A; fn main() { work(1); }").unwrap();
        assert_eq!(splat(&p, true).unwrap().len(), 1);
        assert_eq!(splat(&p, false).unwrap().len(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        let err = splat_with_cap(&corpus::running_example(), false, 4).unwrap_err();
        assert!(matches!(err, BaselineError::CapExceeded { cap: 4, .. }));
    }

    #[test]
    fn path_model_is_exact_on_the_short_example() {
        let p = corpus::running_example_short();
        let plan = splat(&p, true).unwrap();
        let m: Vec<_> = plan.configurations.iter().map(|c| (c.clone(), end_to_end(&p, c).unwrap())).collect();
        let model = PathModel::new(&plan, &m).unwrap();
        for c in Configuration::enumerate(p.options()) {
            assert_eq!(model.predict(&c), Some(end_to_end(&p, &c).unwrap()), "{c}");
        }
    }
}
