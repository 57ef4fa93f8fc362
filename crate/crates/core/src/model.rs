//! Performance-influence models.
//!
//! A model is a sum of terms, each an option set with a coefficient; it
//! predicts a configuration by adding the coefficients of all terms whose
//! options are enabled. Local models come from one region's measurements by
//! Möbius inversion over the subset lattice; the global model is their sum.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exec::ConfigurationPerformanceMap;
use crate::options::{Configuration, OptionSet};
use crate::regions::{RegionId, RegionInfluenceMap};
use crate::time::Millis;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("region {region} has no measurement for projection {projection}")]
    MissingProjection { region: RegionId, projection: OptionSet },
    #[error("region {0} is unknown")]
    UnknownRegion(RegionId),
    #[error("no configurations left to evaluate")]
    EmptyEvaluation,
    #[error("configuration {0} has zero measured time")]
    ZeroActual(Configuration),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scope {
    Global,
    Region(RegionId),
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Global => f.write_str("global"),
            Scope::Region(id) => write!(f, "{id}"),
        }
    }
}

impl Serialize for Scope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(if s == "global" { Scope::Global } else { Scope::Region(RegionId(s)) })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub options: OptionSet,
    pub ms: Millis,
}

/// Anything that predicts a configuration's time in milliseconds.
pub trait Predictor {
    fn predict_ms(&self, configuration: &Configuration) -> f64;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerformanceInfluenceModel {
    pub scope: Scope,
    terms: BTreeMap<OptionSet, Millis>,
}

impl PerformanceInfluenceModel {
    pub fn new(scope: Scope) -> Self {
        PerformanceInfluenceModel { scope, terms: BTreeMap::new() }
    }

    pub fn from_terms(scope: Scope, terms: impl IntoIterator<Item = (OptionSet, Millis)>) -> Self {
        let mut m = PerformanceInfluenceModel::new(scope);
        for (o, c) in terms {
            m.add(o, c);
        }
        m
    }

    /// Adds to a coefficient, dropping the term if it cancels out.
    pub fn add(&mut self, options: OptionSet, ms: Millis) {
        let slot = self.terms.entry(options.clone()).or_insert(Millis::ZERO);
        *slot += ms;
        if slot.is_zero() {
            self.terms.remove(&options);
        }
    }

    pub fn coefficient(&self, options: &OptionSet) -> Millis {
        self.terms.get(options).copied().unwrap_or(Millis::ZERO)
    }

    /// Non-zero terms, by degree then lexicographically.
    pub fn terms(&self) -> Vec<Term> {
        let mut v: Vec<Term> = self.terms.iter().map(|(o, ms)| Term { options: o.clone(), ms: *ms }).collect();
        v.sort_by(|a, b| a.options.degree_cmp(&b.options));
        v
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn predict(&self, configuration: &Configuration) -> Millis {
        self.terms.iter().filter(|(o, _)| o.is_subset(configuration.enabled())).map(|(_, c)| *c).sum()
    }

    /// Coefficients in seconds, e.g. `1 + 3A + 3AB + 3AC`.
    pub fn render_seconds(&self) -> String {
        let terms = self.terms();
        if terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, t) in terms.iter().enumerate() {
            let secs = t.ms.to_seconds();
            let mag = secs.abs();
            if i == 0 {
                if secs.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if secs.is_negative() { " - " } else { " + " });
            }
            out.push_str(&mag.to_string());
            let names: Vec<&str> = t.options.iter().collect();
            if names.iter().all(|n| n.len() == 1) {
                out.push_str(&names.concat());
            } else {
                out.push_str(&names.join("·"));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "scope": self.scope, "terms": self.terms() })
    }
}

impl Serialize for PerformanceInfluenceModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            scope: &'a Scope,
            terms: Vec<Term>,
        }
        Repr { scope: &self.scope, terms: self.terms() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PerformanceInfluenceModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            scope: Scope,
            terms: Vec<Term>,
        }
        let r = Repr::deserialize(d)?;
        Ok(PerformanceInfluenceModel::from_terms(r.scope, r.terms.into_iter().map(|t| (t.options, t.ms))))
    }
}

impl Predictor for PerformanceInfluenceModel {
    fn predict_ms(&self, configuration: &Configuration) -> f64 {
        self.predict(configuration).to_f64()
    }
}

/// Sum of the coefficients of enabled terms.
pub fn predict(model: &PerformanceInfluenceModel, configuration: &Configuration) -> Millis {
    model.predict(configuration)
}

/// Coefficients from per-projection times: the coefficient of `s` is the
/// alternating sum of `t[u]` over all subsets `u` of `s`. Coefficients whose
/// magnitude is at most `epsilon` are dropped.
pub fn mobius(
    scope: Scope,
    options: &OptionSet,
    t: &BTreeMap<OptionSet, Millis>,
    epsilon: Millis,
) -> Result<PerformanceInfluenceModel, OptionSet> {
    let mut m = PerformanceInfluenceModel::new(scope);
    for s in options.subsets() {
        let mut c = Millis::ZERO;
        for u in s.subsets() {
            let tu = *t.get(&u).ok_or_else(|| u.clone())?;
            if (s.len() - u.len()) % 2 == 0 {
                c += tu;
            } else {
                c -= tu;
            }
        }
        if c.abs() > epsilon {
            m.add(s, c);
        }
    }
    Ok(m)
}

/// Local model of one region, with exact pruning.
pub fn build_local(
    region: &RegionId,
    ri: &RegionInfluenceMap,
    cp: &ConfigurationPerformanceMap,
) -> Result<PerformanceInfluenceModel, ModelError> {
    build_local_with(region, ri, cp, Millis::ZERO)
}

/// Local model of one region, dropping coefficients within `epsilon` of zero.
pub fn build_local_with(
    region: &RegionId,
    ri: &RegionInfluenceMap,
    cp: &ConfigurationPerformanceMap,
    epsilon: Millis,
) -> Result<PerformanceInfluenceModel, ModelError> {
    let options = ri.get(region).ok_or_else(|| ModelError::UnknownRegion(region.clone()))?;
    let t = cp.averaged(region);
    mobius(Scope::Region(region.clone()), options, &t, epsilon)
        .map_err(|projection| ModelError::MissingProjection { region: region.clone(), projection })
}

/// Local models of every region in `ri`.
pub fn build_locals(
    ri: &RegionInfluenceMap,
    cp: &ConfigurationPerformanceMap,
    epsilon: Millis,
) -> Result<Vec<PerformanceInfluenceModel>, ModelError> {
    ri.0.keys().map(|id| build_local_with(id, ri, cp, epsilon)).collect()
}

/// Term-wise sum of local models.
pub fn build_global(locals: &[PerformanceInfluenceModel]) -> PerformanceInfluenceModel {
    let mut g = PerformanceInfluenceModel::new(Scope::Global);
    for l in locals {
        for (o, c) in &l.terms {
            g.add(o.clone(), *c);
        }
    }
    g
}

/// Mean absolute percentage error over the ground truth minus `exclude`.
pub fn mape<P: Predictor + ?Sized>(
    model: &P,
    ground_truth: &[(Configuration, Millis)],
    exclude: &HashSet<Configuration>,
) -> Result<f64, ModelError> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (c, actual) in ground_truth {
        if exclude.contains(c) {
            continue;
        }
        if actual.is_zero() {
            return Err(ModelError::ZeroActual(c.clone()));
        }
        let a = actual.to_f64();
        sum += (model.predict_ms(c) - a).abs() / a * 100.0;
        n += 1;
    }
    if n == 0 {
        return Err(ModelError::EmptyEvaluation);
    }
    Ok(sum / n as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    NotInfluencedNegligible,
    NotInfluencedNonNegligible,
    Influenced,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::NotInfluencedNegligible => "not influenced (negligible)",
            Category::NotInfluencedNonNegligible => "not influenced",
            Category::Influenced => "influenced",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalModelReportEntry {
    pub region: RegionId,
    pub name: String,
    pub category: Category,
    /// Smallest and largest degree among non-constant terms.
    pub min_degree: Option<usize>,
    pub max_degree: Option<usize>,
    /// Mean fraction of end-to-end time spent in the region.
    pub share: f64,
    pub model: String,
}

pub const NEGLIGIBLE_SHARE: f64 = 0.05;

/// Sorts local models into influenced, not influenced, and negligible.
pub fn classify_regions(
    locals: &[PerformanceInfluenceModel],
    cp: &ConfigurationPerformanceMap,
) -> Vec<LocalModelReportEntry> {
    classify_regions_with(locals, cp, NEGLIGIBLE_SHARE)
}

pub fn classify_regions_with(
    locals: &[PerformanceInfluenceModel],
    cp: &ConfigurationPerformanceMap,
    threshold: f64,
) -> Vec<LocalModelReportEntry> {
    let mut out = Vec::new();
    for col in &cp.regions {
        let Some(model) = locals.iter().find(|m| m.scope == Scope::Region(col.id.clone())) else { continue };
        let degrees: Vec<usize> = model.terms().iter().map(|t| t.options.len()).filter(|&d| d > 0).collect();
        let shares: Vec<f64> = cp
            .rows
            .iter()
            .map(|r| {
                let total = r.end_to_end.to_f64();
                if total > 0.0 {
                    r.times.get(&col.id).map_or(0.0, Millis::to_f64) / total
                } else {
                    0.0
                }
            })
            .collect();
        let category = if !degrees.is_empty() {
            Category::Influenced
        } else if shares.iter().all(|&s| s < threshold) {
            Category::NotInfluencedNegligible
        } else {
            Category::NotInfluencedNonNegligible
        };
        out.push(LocalModelReportEntry {
            region: col.id.clone(),
            name: col.name.clone(),
            category,
            min_degree: degrees.iter().copied().min(),
            max_degree: degrees.iter().copied().max(),
            share: if shares.is_empty() { 0.0 } else { shares.iter().sum::<f64>() / shares.len() as f64 },
            model: model.render_seconds(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::options::opts;

    fn ms(n: i64) -> Millis {
        Millis::from_integer(n)
    }

    #[test]
    fn two_option_inversion() {
        let ac = opts(&["A", "C"]);
        let t: BTreeMap<OptionSet, Millis> =
            [(opts(&[]), ms(0)), (opts(&["C"]), ms(0)), (opts(&["A"]), ms(3000)), (ac.clone(), ms(6000))]
                .into_iter()
                .collect();
        let m = mobius(Scope::Global, &ac, &t, Millis::ZERO).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.coefficient(&opts(&["A"])), ms(3000));
        assert_eq!(m.coefficient(&ac), ms(3000));
        assert_eq!(m.render_seconds(), "3A + 3AC");
    }

    #[test]
    fn constant_samples_collapse() {
        let ab = opts(&["A", "B"]);
        let t = ab.subsets().into_iter().map(|s| (s, ms(700))).collect();
        let m = mobius(Scope::Global, &ab, &t, Millis::ZERO).unwrap();
        assert_eq!(m.terms(), vec![Term { options: opts(&[]), ms: ms(700) }]);
    }

    #[test]
    fn linear_three_option_region_has_no_interactions() {
        // brute-force check: inversion of t(S) = 1000 |S| gives 1000 per option
        let abc = opts(&["A", "B", "C"]);
        let t: BTreeMap<OptionSet, Millis> = abc
            .subsets()
            .into_iter()
            .map(|s| {
                let n = s.len() as i64;
                (s, ms(1000 * n))
            })
            .collect();
        let m = mobius(Scope::Global, &abc, &t, Millis::ZERO).unwrap();
        assert_eq!(m.len(), 3);
        for o in ["A", "B", "C"] {
            assert_eq!(m.coefficient(&opts(&[o])), ms(1000));
        }
        for s in abc.subsets() {
            assert_eq!(m.predict(&Configuration::new(s.clone())), t[&s]);
        }
    }

    #[test]
    fn missing_projection_is_reported() {
        let a = opts(&["A"]);
        let t = [(opts(&[]), ms(1))].into_iter().collect();
        assert_eq!(mobius(Scope::Global, &a, &t, Millis::ZERO), Err(a));
    }

    #[test]
    fn rendering() {
        let m = PerformanceInfluenceModel::from_terms(
            Scope::Global,
            [
                (opts(&["A", "C"]), ms(3000)),
                (opts(&[]), ms(1000)),
                (opts(&["A"]), ms(3100)),
                (opts(&["A", "B"]), ms(-3000)),
                (opts(&["B"]), ms(200)),
            ],
        );
        assert_eq!(m.render_seconds(), "1 + 3.1A + 0.2B - 3AB + 3AC");
        let m = PerformanceInfluenceModel::from_terms(Scope::Global, [(opts(&["FOO", "BAR"]), ms(500))]);
        assert_eq!(m.render_seconds(), "0.5BAR·FOO");
        assert_eq!(PerformanceInfluenceModel::new(Scope::Global).render_seconds(), "0");
    }

    #[test]
    fn global_is_termwise_sum() {
        let a = PerformanceInfluenceModel::from_terms(Scope::Global, [(opts(&["A"]), ms(1)), (opts(&[]), ms(2))]);
        let b = PerformanceInfluenceModel::from_terms(Scope::Global, [(opts(&["A"]), ms(-1)), (opts(&["B"]), ms(5))]);
        let g = build_global(&[a.clone(), b.clone()]);
        assert_eq!(g.coefficient(&opts(&["A"])), Millis::ZERO);
        assert_eq!(g.len(), 2);
        let c = Configuration::parse_list("A,B");
        assert_eq!(g.predict(&c), a.predict(&c) + b.predict(&c));
        assert_eq!(build_global(std::slice::from_ref(&a)).terms(), a.terms());
    }

    #[test]
    fn mape_errors_and_values() {
        let m = PerformanceInfluenceModel::from_terms(Scope::Global, [(opts(&[]), ms(100))]);
        let gt = vec![(Configuration::all_disabled(), ms(100)), (Configuration::parse_list("A"), ms(200))];
        assert_eq!(mape(&m, &gt, &HashSet::new()).unwrap(), 25.0);
        let all: HashSet<Configuration> = gt.iter().map(|(c, _)| c.clone()).collect();
        assert_eq!(mape(&m, &gt, &all), Err(ModelError::EmptyEvaluation));
        let zero = vec![(Configuration::all_disabled(), Millis::ZERO)];
        assert!(matches!(mape(&m, &zero, &HashSet::new()), Err(ModelError::ZeroActual(_))));
    }

    #[test]
    fn json_round_trip() {
        let m = PerformanceInfluenceModel::from_terms(
            Scope::Global,
            [(opts(&["A", "B"]), ms(3000)), (opts(&[]), ms(1000))],
        );
        let v = m.to_json();
        assert_eq!(v["scope"], "global");
        assert_eq!(v["terms"][1]["options"], serde_json::json!(["A", "B"]));
        assert_eq!(v["terms"][1]["ms"], 3000);
        let back: PerformanceInfluenceModel = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);
    }
}
