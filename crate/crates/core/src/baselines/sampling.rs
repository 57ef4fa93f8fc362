//! Black-box sampling plans.

use std::collections::BTreeSet;

use super::{Approach, BaselineError, PlanMetadata, SamplePlan};
use crate::options::{Configuration, OptionSet};

/// Largest option count brute force will enumerate.
pub const DEFAULT_CAP: usize = 22;

/// All 2^n configurations in binary-counter order.
pub fn brute_force(options: &OptionSet) -> Result<SamplePlan, BaselineError> {
    brute_force_with_cap(options, DEFAULT_CAP)
}

pub fn brute_force_with_cap(options: &OptionSet, cap: usize) -> Result<SamplePlan, BaselineError> {
    if options.len() > cap {
        return Err(BaselineError::CapExceeded { options: options.len(), cap });
    }
    Ok(SamplePlan {
        approach: Approach::BruteForce,
        options: options.clone(),
        configurations: Configuration::enumerate(options),
        metadata: PlanMetadata::None,
    })
}

/// All options disabled, then each option enabled alone.
pub fn feature_wise(options: &OptionSet) -> Result<SamplePlan, BaselineError> {
    if options.is_empty() {
        return Err(BaselineError::TooFewOptions { approach: Approach::FeatureWise, needed: 1, found: 0 });
    }
    let mut configurations = vec![Configuration::all_disabled()];
    configurations.extend(options.iter().map(|o| Configuration::new(OptionSet::singleton(o))));
    Ok(SamplePlan {
        approach: Approach::FeatureWise,
        options: options.clone(),
        configurations,
        metadata: PlanMetadata::None,
    })
}

type Pair = (usize, usize, bool, bool);

fn all_pairs(n: usize) -> BTreeSet<Pair> {
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for vi in [false, true] {
                for vj in [false, true] {
                    out.insert((i, j, vi, vj));
                }
            }
        }
    }
    out
}

fn row_pairs(row: &[bool]) -> impl Iterator<Item = Pair> + '_ {
    (0..row.len()).flat_map(move |i| (i + 1..row.len()).map(move |j| (i, j, row[i], row[j])))
}

/// A strength-2 covering array built one row at a time: each row starts
/// from the first uncovered pair and fixes the remaining options greedily
/// to cover as many further pairs as possible.
pub fn pair_wise(options: &OptionSet) -> Result<SamplePlan, BaselineError> {
    let n = options.len();
    if n < 2 {
        return Err(BaselineError::TooFewOptions { approach: Approach::PairWise, needed: 2, found: n });
    }
    let names: Vec<&str> = options.iter().collect();
    let mut uncovered = all_pairs(n);
    let total = uncovered.len();
    let mut rows: Vec<Vec<bool>> = Vec::new();
    while let Some(&(i, j, vi, vj)) = uncovered.iter().next() {
        let mut row: Vec<Option<bool>> = vec![None; n];
        row[i] = Some(vi);
        row[j] = Some(vj);
        for k in 0..n {
            if row[k].is_some() {
                continue;
            }
            let gain = |v: bool| {
                row.iter()
                    .enumerate()
                    .filter_map(|(m, r)| r.map(|rv| (m, rv)))
                    .filter(|&(m, rv)| {
                        let p = if m < k { (m, k, rv, v) } else { (k, m, v, rv) };
                        uncovered.contains(&p)
                    })
                    .count()
            };
            row[k] = Some(gain(true) > gain(false));
        }
        let row: Vec<bool> = row.into_iter().map(|v| v.unwrap_or(false)).collect();
        for p in row_pairs(&row) {
            uncovered.remove(&p);
        }
        rows.push(row);
    }
    let configurations: Vec<Configuration> = rows
        .iter()
        .map(|r| Configuration::new(names.iter().zip(r).filter(|(_, &v)| v).map(|(o, _)| *o).collect()))
        .collect();
    let verified = pair_coverage(options, &configurations);
    assert!(verified, "greedy covering array misses a pair");
    Ok(SamplePlan {
        approach: Approach::PairWise,
        options: options.clone(),
        configurations,
        metadata: PlanMetadata::PairCoverage { pairs: total, verified },
    })
}

/// Whether every pair of options takes all four value combinations.
pub fn pair_coverage(options: &OptionSet, configurations: &[Configuration]) -> bool {
    let names: Vec<&str> = options.iter().collect();
    names.iter().enumerate().all(|(i, a)| {
        names[i + 1..].iter().all(|b| {
            let seen: BTreeSet<(bool, bool)> =
                configurations.iter().map(|c| (c.is_enabled(a), c.is_enabled(b))).collect();
            seen.len() == 4
        })
    })
}
