//! Forward-selection linear regression over option terms.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{BaselineError, SamplePlan};
use crate::model::Predictor;
use crate::options::{Configuration, OptionSet};
use crate::time::Millis;

/// Largest term size considered by default.
pub const DEFAULT_DEGREE: usize = 2;

/// Selection stops once the best candidate improves the residual sum of
/// squares by less than this fraction.
pub const MIN_RELATIVE_IMPROVEMENT: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnedTerm {
    pub options: OptionSet,
    /// Milliseconds.
    pub coefficient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnedModel {
    /// Intercept first, then terms in selection order.
    pub terms: Vec<LearnedTerm>,
    pub rss: f64,
    /// Selected terms in selection order, without the intercept.
    pub selected: Vec<OptionSet>,
}

impl LearnedModel {
    pub fn coefficient(&self, options: &OptionSet) -> f64 {
        self.terms.iter().find(|t| &t.options == options).map_or(0.0, |t| t.coefficient)
    }

    pub fn predict(&self, configuration: &Configuration) -> f64 {
        self.terms.iter().filter(|t| t.options.is_subset(configuration.enabled())).map(|t| t.coefficient).sum()
    }

    /// Coefficients in seconds, rounded to the millisecond.
    pub fn render_seconds(&self) -> String {
        let mut terms: Vec<&LearnedTerm> = self.terms.iter().filter(|t| t.coefficient.abs() >= 0.5).collect();
        terms.sort_by(|a, b| a.options.degree_cmp(&b.options));
        if terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, t) in terms.iter().enumerate() {
            let secs = t.coefficient / 1000.0;
            let sign = if secs < 0.0 { "-" } else { "+" };
            if i == 0 {
                if secs < 0.0 {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            let mag = format!("{:.3}", secs.abs());
            out.push_str(mag.trim_end_matches('0').trim_end_matches('.'));
            let names: Vec<&str> = t.options.iter().collect();
            out.push_str(&if names.iter().all(|n| n.len() == 1) { names.concat() } else { names.join("·") });
        }
        out
    }
}

impl Predictor for LearnedModel {
    fn predict_ms(&self, configuration: &Configuration) -> f64 {
        self.predict(configuration)
    }
}

/// Fits a model from the measurements of the plan's configurations only.
pub fn learn(
    plan: &SamplePlan,
    measurements: &BTreeMap<Configuration, Millis>,
    degree: usize,
) -> Result<LearnedModel, BaselineError> {
    let samples = plan.select(measurements)?;
    learn_with(&plan.options, &samples, degree)
}

fn combinations(names: &[&str], k: usize, start: usize, current: &mut Vec<String>, out: &mut Vec<OptionSet>) {
    if current.len() == k {
        out.push(current.iter().cloned().collect());
        return;
    }
    for i in start..names.len() {
        current.push(names[i].to_string());
        combinations(names, k, i + 1, current, out);
        current.pop();
    }
}

/// All non-empty option sets of size at most `degree`, by size then name.
pub fn candidates(options: &OptionSet, degree: usize) -> Vec<OptionSet> {
    let names: Vec<&str> = options.iter().collect();
    let mut out = Vec::new();
    for k in 1..=degree.min(names.len()) {
        combinations(&names, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

struct Fit {
    coefficients: Vec<f64>,
    rss: f64,
}

fn fit(rows: &[&Configuration], y: &DVector<f64>, terms: &[OptionSet]) -> Option<Fit> {
    let x =
        DMatrix::from_fn(rows.len(), terms.len(), |i, j| if terms[j].is_subset(rows[i].enabled()) { 1.0 } else { 0.0 });
    let svd = x.clone().svd(true, true);
    let largest = svd.singular_values.max();
    let tol = largest * rows.len().max(terms.len()) as f64 * f64::EPSILON;
    if largest == 0.0 || svd.rank(tol) < terms.len() {
        return None;
    }
    let b = svd.solve(y, tol).ok()?;
    let rss = (y - &x * &b).norm_squared();
    Some(Fit { coefficients: b.iter().copied().collect(), rss })
}

/// Forward selection over `candidates(options, degree)` with an intercept.
/// Samples are ordered by configuration first, so the result does not depend
/// on their order; ties go to the earlier candidate.
pub fn learn_with(
    options: &OptionSet,
    samples: &[(Configuration, Millis)],
    degree: usize,
) -> Result<LearnedModel, BaselineError> {
    if samples.len() < 2 {
        return Err(BaselineError::TooFewMeasurements(samples.len()));
    }
    let mut sorted: Vec<&(Configuration, Millis)> = samples.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let rows: Vec<&Configuration> = sorted.iter().map(|(c, _)| c).collect();
    let y = DVector::from_iterator(sorted.len(), sorted.iter().map(|(_, t)| t.to_f64()));
    let scale = y.norm_squared().max(1.0);

    let mut terms = vec![OptionSet::new()];
    let mut current = fit(&rows, &y, &terms).expect("intercept column is never deficient");
    let mut pool = candidates(options, degree);
    while current.rss > scale * 1e-24 {
        let mut best: Option<(usize, Fit)> = None;
        for (i, cand) in pool.iter().enumerate() {
            let mut trial = terms.clone();
            trial.push(cand.clone());
            if let Some(f) = fit(&rows, &y, &trial) {
                if best.as_ref().is_none_or(|(_, b)| f.rss < b.rss) {
                    best = Some((i, f));
                }
            }
        }
        let Some((i, f)) = best else { break };
        if (current.rss - f.rss) / current.rss < MIN_RELATIVE_IMPROVEMENT {
            break;
        }
        terms.push(pool.remove(i));
        current = f;
    }
    Ok(LearnedModel {
        selected: terms[1..].to_vec(),
        terms: terms
            .into_iter()
            .zip(current.coefficients)
            .map(|(options, coefficient)| LearnedTerm { options, coefficient })
            .collect(),
        rss: current.rss,
    })
}
