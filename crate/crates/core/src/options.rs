//! Option sets and configurations.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A set of option names, ordered lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OptionSet(BTreeSet<String>);

impl OptionSet {
    pub const fn new() -> Self {
        OptionSet(BTreeSet::new())
    }

    pub fn singleton(name: impl Into<String>) -> Self {
        let mut s = OptionSet::new();
        s.insert(name);
        s
    }

    pub fn insert(&mut self, name: impl Into<String>) -> bool {
        self.0.insert(name.into())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &str> + ExactSizeIterator + '_ {
        self.0.iter().map(String::as_str)
    }

    pub fn union(&self, other: &OptionSet) -> OptionSet {
        OptionSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &OptionSet) -> OptionSet {
        OptionSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &OptionSet) -> OptionSet {
        OptionSet(self.0.difference(&other.0).cloned().collect())
    }

    /// Adds every member of `other`; returns whether anything was new.
    pub fn extend_from(&mut self, other: &OptionSet) -> bool {
        let before = self.0.len();
        self.0.extend(other.0.iter().cloned());
        self.0.len() != before
    }

    pub fn is_subset(&self, other: &OptionSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_strict_subset(&self, other: &OptionSet) -> bool {
        self.0.len() < other.0.len() && self.0.is_subset(&other.0)
    }

    /// All 2^n subsets, in binary-counter order where the first (smallest)
    /// name is the most significant bit: for `{A,B}` this yields
    /// `{}, {B}, {A}, {A,B}`.
    pub fn subsets(&self) -> Vec<OptionSet> {
        let names: Vec<&String> = self.0.iter().collect();
        let n = names.len();
        assert!(n < 31, "refusing to enumerate 2^{n} subsets");
        (0u32..(1 << n))
            .map(|mask| {
                OptionSet(
                    names
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << (n - 1 - i)) != 0)
                        .map(|(_, s)| (*s).clone())
                        .collect(),
                )
            })
            .collect()
    }

    /// Ordering used for rendering model terms: by size, then lexicographic.
    pub fn degree_cmp(&self, other: &OptionSet) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.cmp(other))
    }
}

impl fmt::Display for OptionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, o) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            f.write_str(o)?;
        }
        write!(f, "}}")
    }
}

impl<S: Into<String>> FromIterator<S> for OptionSet {
    fn from_iter<T: IntoIterator<Item = S>>(iter: T) -> Self {
        OptionSet(iter.into_iter().map(Into::into).collect())
    }
}

impl<'a> IntoIterator for &'a OptionSet {
    type Item = &'a String;
    type IntoIter = std::collections::btree_set::Iter<'a, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A total assignment of booleans to a program's options: listed options are
/// enabled, every other option is disabled.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration {
    enabled: OptionSet,
}

impl Configuration {
    pub fn new(enabled: OptionSet) -> Self {
        Configuration { enabled }
    }

    pub fn all_disabled() -> Self {
        Configuration::default()
    }

    pub fn enabled(&self) -> &OptionSet {
        &self.enabled
    }

    pub fn is_enabled(&self, option: &str) -> bool {
        self.enabled.contains(option)
    }

    /// The enabled options among `options`.
    pub fn project(&self, options: &OptionSet) -> OptionSet {
        self.enabled.intersection(options)
    }

    /// Parses `A,B,C` (empty string means all disabled).
    pub fn parse_list(list: &str) -> Self {
        Configuration::new(list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect())
    }

    /// Every configuration over `options` in binary-counter order.
    pub fn enumerate(options: &OptionSet) -> Vec<Configuration> {
        options.subsets().into_iter().map(Configuration::new).collect()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.enabled.fmt(f)
    }
}

impl<S: Into<String>> FromIterator<S> for Configuration {
    fn from_iter<T: IntoIterator<Item = S>>(iter: T) -> Self {
        Configuration::new(iter.into_iter().collect())
    }
}

/// Shorthand used throughout the tests: `opts(&["A", "C"])`.
pub fn opts(names: &[&str]) -> OptionSet {
    names.iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_in_counter_order_with_first_name_most_significant() {
        let s = opts(&["A", "B"]);
        let subs = s.subsets();
        assert_eq!(subs, vec![opts(&[]), opts(&["B"]), opts(&["A"]), opts(&["A", "B"])]);
        assert_eq!(OptionSet::new().subsets(), vec![OptionSet::new()]);
    }

    #[test]
    fn degree_order_puts_smaller_sets_first() {
        let mut v = vec![opts(&["A", "B"]), opts(&["B"]), opts(&[]), opts(&["A"])];
        v.sort_by(|a, b| a.degree_cmp(b));
        assert_eq!(v, vec![opts(&[]), opts(&["A"]), opts(&["B"]), opts(&["A", "B"])]);
    }

    #[test]
    fn configuration_projection() {
        let c = Configuration::parse_list("A, C,D");
        assert_eq!(c.project(&opts(&["A", "B", "C"])), opts(&["A", "C"]));
        assert!(Configuration::parse_list("").enabled().is_empty());
    }
}
