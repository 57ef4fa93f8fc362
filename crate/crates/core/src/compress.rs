//! Compression of the configuration space.
//!
//! Every interaction must be measured under all combinations of its options.
//! Maximal interactions are enumerated separately and their enumerations are
//! zipped together, pairing configurations that agree on the options the two
//! blocks share.

use serde::{Deserialize, Serialize};

use crate::corpus;
use crate::options::{Configuration, OptionSet};
use crate::taint::{analyze, InteractionSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressedSet {
    /// Column universe for reports.
    pub options: OptionSet,
    pub configurations: Vec<Configuration>,
    #[serde(skip)]
    pub covered: InteractionSet,
}

impl CompressedSet {
    pub fn len(&self) -> usize {
        self.configurations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configurations.is_empty()
    }

    /// Widens the column universe (for example to all program options).
    pub fn with_universe(mut self, options: &OptionSet) -> Self {
        self.options.extend_from(options);
        self
    }

    /// One boolean column per option, one row per configuration.
    pub fn to_csv(&self) -> String {
        let names: Vec<&str> = self.options.iter().collect();
        let mut out = names.join(",");
        out.push('\n');
        for c in &self.configurations {
            let row: Vec<&str> = names.iter().map(|o| if c.is_enabled(o) { "true" } else { "false" }).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Interactions that are not strictly contained in another, largest first
/// and lexicographic among equal sizes.
pub fn maximal(io: &InteractionSet) -> Vec<OptionSet> {
    let mut out: Vec<OptionSet> = io.iter().filter(|s| !io.iter().any(|t| s.is_strict_subset(t))).cloned().collect();
    out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    out
}

fn merge(cs1: Vec<OptionSet>, o1: &OptionSet, cs2: Vec<OptionSet>, o2: &OptionSet) -> Vec<OptionSet> {
    let pivot = o1.intersection(o2);
    let mut used = vec![false; cs2.len()];
    let mut out = Vec::with_capacity(cs1.len().max(cs2.len()));
    for c1 in cs1 {
        let key = c1.intersection(&pivot);
        match (0..cs2.len()).find(|&j| !used[j] && cs2[j].intersection(&pivot) == key) {
            Some(j) => {
                used[j] = true;
                out.push(c1.union(&cs2[j]));
            }
            None => out.push(c1),
        }
    }
    out.extend(cs2.into_iter().zip(used).filter(|(_, u)| !u).map(|(c, _)| c));
    out
}

/// A configuration list that exercises every interaction in `io` under all
/// of its option combinations. Options outside `io` stay disabled.
pub fn compress(io: &InteractionSet) -> CompressedSet {
    let blocks = maximal(io);
    let mut acc: Vec<OptionSet> = vec![OptionSet::new()];
    let mut acc_opts = OptionSet::new();
    for block in &blocks {
        acc = merge(acc, &acc_opts, block.subsets(), block);
        acc_opts.extend_from(block);
    }
    let cc = CompressedSet {
        options: io.options(),
        configurations: acc.into_iter().map(Configuration::new).collect(),
        covered: io.clone(),
    };
    debug_assert!(verify_coverage(&cc, io));
    cc
}

/// Whether every interaction sees all of its option combinations.
pub fn verify_coverage(cc: &CompressedSet, io: &InteractionSet) -> bool {
    io.iter().all(|i| {
        let seen: std::collections::BTreeSet<OptionSet> = cc.configurations.iter().map(|c| c.project(i)).collect();
        seen.len() == 1usize << i.len()
    })
}

/// The compressed set of the bundled ten-option running example.
pub fn compress_full_example() -> CompressedSet {
    let p = corpus::running_example();
    compress(&analyze(&p).interactions()).with_universe(p.options())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::options::opts;
    use proptest::prelude::*;

    fn io(sets: &[&[&str]]) -> InteractionSet {
        sets.iter().map(|s| opts(s)).collect()
    }

    fn enabled(cc: &CompressedSet) -> Vec<OptionSet> {
        cc.configurations.iter().map(|c| c.enabled().clone()).collect()
    }

    #[test]
    fn short_example_yields_four() {
        let i = io(&[&["A"], &["A", "B"], &["A", "C"]]);
        let cc = compress(&i);
        assert_eq!(enabled(&cc), vec![opts(&[]), opts(&["B", "C"]), opts(&["A"]), opts(&["A", "B", "C"])]);
        assert!(verify_coverage(&cc, &i));
    }

    #[test]
    fn singleton_and_empty() {
        assert_eq!(enabled(&compress(&io(&[&["A"]]))), vec![opts(&[]), opts(&["A"])]);
        assert_eq!(enabled(&compress(&InteractionSet::new())), vec![opts(&[])]);
        assert_eq!(compress(&io(&[&["A", "B", "C"]])).len(), 8);
    }

    #[test]
    fn disjoint_blocks_zip() {
        let i = io(&[&["A", "B"], &["C", "D"]]);
        let cc = compress(&i);
        assert_eq!(enabled(&cc), vec![opts(&[]), opts(&["B", "D"]), opts(&["A", "C"]), opts(&["A", "B", "C", "D"])]);
        assert!(verify_coverage(&cc, &i));
    }

    #[test]
    fn coverage_check_detects_gaps() {
        let cc = CompressedSet {
            options: opts(&["A", "B"]),
            configurations: vec![Configuration::all_disabled(), Configuration::parse_list("A")],
            covered: InteractionSet::new(),
        };
        assert!(!verify_coverage(&cc, &io(&[&["A", "B"]])));
        assert!(verify_coverage(&cc, &io(&[&["A"]])));
    }

    #[test]
    fn full_example_yields_eight() {
        let cc = compress_full_example();
        assert_eq!(cc.len(), 8);
        assert_eq!(cc.options.len(), 10);
        assert!(cc.configurations.iter().all(|c| !c.is_enabled("J")));
    }

    #[test]
    fn csv_has_one_column_per_option() {
        let cc = compress(&io(&[&["A"]]));
        assert_eq!(cc.to_csv(), "A\nfalse\ntrue\n");
    }

    fn random_io() -> impl Strategy<Value = InteractionSet> {
        let names = ["A", "B", "C", "D", "E", "F", "G", "H", "I", "J"];
        proptest::collection::vec(proptest::collection::btree_set(0usize..10, 1..=4), 1..6)
            .prop_map(move |sets| sets.into_iter().map(|s| s.into_iter().map(|i| names[i]).collect()).collect())
    }

    proptest! {
        #[test]
        fn always_covers_and_respects_bounds(i in random_io()) {
            let cc = compress(&i);
            prop_assert!(verify_coverage(&cc, &i));
            let max = i.iter().map(|s| s.len()).max().unwrap_or(0);
            prop_assert!(cc.len() >= 1 << max);
            let upper: usize = maximal(&i).iter().map(|s| 1usize << s.len()).sum();
            prop_assert!(cc.len() <= upper.max(1));
            prop_assert_eq!(compress(&i), cc);
        }
    }
}
