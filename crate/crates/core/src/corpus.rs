//! Bundled example programs.

use crate::lang::{parse, Program};

pub const RUNNING_EXAMPLE: &str = include_str!("../corpus/running-example.ccl");
pub const RUNNING_EXAMPLE_SHORT: &str = include_str!("../corpus/running-example-short.ccl");
pub const ORTHOGONAL: &str = include_str!("../corpus/orthogonal.ccl");
pub const DEEP_LOOP: &str = include_str!("../corpus/deep-loop.ccl");
pub const IRRELEVANT: &str = include_str!("../corpus/irrelevant.ccl");
pub const DATAFLOW: &str = include_str!("../corpus/dataflow.ccl");
pub const CALLS: &str = include_str!("../corpus/calls.ccl");

/// `(file name, source)` for every bundled program.
pub const ALL: &[(&str, &str)] = &[
    ("running-example.ccl", RUNNING_EXAMPLE),
    ("running-example-short.ccl", RUNNING_EXAMPLE_SHORT),
    ("orthogonal.ccl", ORTHOGONAL),
    ("deep-loop.ccl", DEEP_LOOP),
    ("irrelevant.ccl", IRRELEVANT),
    ("dataflow.ccl", DATAFLOW),
    ("calls.ccl", CALLS),
];

fn load(src: &str) -> Program {
    parse(src).expect("bundled program parses")
}

pub fn running_example() -> Program {
    load(RUNNING_EXAMPLE)
}

pub fn running_example_short() -> Program {
    load(RUNNING_EXAMPLE_SHORT)
}

pub fn orthogonal() -> Program {
    load(ORTHOGONAL)
}

pub fn deep_loop() -> Program {
    load(DEEP_LOOP)
}

pub fn irrelevant() -> Program {
    load(IRRELEVANT)
}

pub fn dataflow() -> Program {
    load(DATAFLOW)
}

pub fn calls() -> Program {
    load(CALLS)
}

/// Every bundled program, parsed.
pub fn programs() -> Vec<(&'static str, Program)> {
    ALL.iter().map(|(name, src)| (*name, load(src))).collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_bundled_programs_parse() {
        let ps = super::programs();
        assert_eq!(ps.len(), 7);
        let full = super::running_example();
        assert_eq!(full.options().len(), 10);
        let names: Vec<&str> = full.functions().map(|f| f.name.as_str()).collect();
        assert_eq!(names, vec!["foo", "main"]);
    }
}
