//! Black-box sampling, regression learning, and dynamic path exploration.

mod learn;
mod sampling;
mod splat;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::exec::ExecError;
use crate::model::Predictor;
use crate::options::{Configuration, OptionSet};
use crate::time::Millis;

pub use learn::{candidates, learn, learn_with, LearnedModel, LearnedTerm, DEFAULT_DEGREE, MIN_RELATIVE_IMPROVEMENT};
pub use sampling::{brute_force, brute_force_with_cap, feature_wise, pair_coverage, pair_wise, DEFAULT_CAP};
pub use splat::{splat, splat_with_cap, PathModel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BaselineError {
    #[error("{options} options exceed the cap of {cap}")]
    CapExceeded { options: usize, cap: usize },
    #[error("{approach} needs at least {needed} options, found {found}")]
    TooFewOptions { approach: Approach, needed: usize, found: usize },
    #[error("learning needs at least two measurements, found {0}")]
    TooFewMeasurements(usize),
    #[error("no measurement for planned configuration {0}")]
    MissingMeasurement(Configuration),
    #[error(transparent)]
    Exec(#[from] ExecError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Approach {
    #[serde(rename = "cc")]
    WhiteBox,
    #[serde(rename = "bf")]
    BruteForce,
    #[serde(rename = "fw")]
    FeatureWise,
    #[serde(rename = "pw")]
    PairWise,
    #[serde(rename = "splat")]
    Splat,
    #[serde(rename = "splat-lazy")]
    SplatLazy,
}

impl Approach {
    pub const ALL: [Approach; 6] = [
        Approach::WhiteBox,
        Approach::BruteForce,
        Approach::FeatureWise,
        Approach::PairWise,
        Approach::Splat,
        Approach::SplatLazy,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Approach::WhiteBox => "cc",
            Approach::BruteForce => "bf",
            Approach::FeatureWise => "fw",
            Approach::PairWise => "pw",
            Approach::Splat => "splat",
            Approach::SplatLazy => "splat-lazy",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Approach::WhiteBox => "White-box",
            Approach::BruteForce => "Brute Force",
            Approach::FeatureWise => "Feature-wise",
            Approach::PairWise => "Pair-wise",
            Approach::Splat => "SPLat",
            Approach::SplatLazy => "SPLat (delayed)",
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown approach `{0}` (expected cc, bf, fw, pw, splat or splat-lazy)")]
pub struct ParseApproachError(pub String);

impl FromStr for Approach {
    type Err = ParseApproachError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Approach::ALL.into_iter().find(|a| a.key() == s).ok_or_else(|| ParseApproachError(s.to_string()))
    }
}

/// One option read during an exploration run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Read {
    pub option: String,
    pub value: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlanMetadata {
    None,
    /// Every pair of options was seen with all four value combinations.
    PairCoverage {
        pairs: usize,
        verified: bool,
    },
    /// Reads of each run, in execution order, one run per configuration.
    Exploration {
        runs: Vec<Vec<Read>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub approach: Approach,
    pub options: OptionSet,
    pub configurations: Vec<Configuration>,
    pub metadata: PlanMetadata,
}

impl SamplePlan {
    pub fn len(&self) -> usize {
        self.configurations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configurations.is_empty()
    }

    /// The measurements of the planned configurations, in plan order.
    pub fn select(
        &self,
        measurements: &BTreeMap<Configuration, Millis>,
    ) -> Result<Vec<(Configuration, Millis)>, BaselineError> {
        self.configurations
            .iter()
            .map(|c| {
                measurements.get(c).map(|t| (c.clone(), *t)).ok_or_else(|| BaselineError::MissingMeasurement(c.clone()))
            })
            .collect()
    }
}

/// Predicts measured configurations by lookup and everything else as zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LookupModel {
    pub table: BTreeMap<Configuration, Millis>,
}

impl LookupModel {
    pub fn new(measurements: &[(Configuration, Millis)]) -> Self {
        LookupModel { table: measurements.iter().cloned().collect() }
    }
}

impl Predictor for LookupModel {
    fn predict_ms(&self, configuration: &Configuration) -> f64 {
        self.table.get(configuration).map_or(0.0, Millis::to_f64)
    }
}
