use std::collections::BTreeMap;

use ccrush_core::corpus;
use ccrush_core::exec::{end_to_end, run};
use ccrush_core::model::{classify_regions, Category};
use ccrush_core::pipeline::{analyze_regions, run_pipeline, PipelineOptions};
use ccrush_core::{opts, Configuration, Millis, OptionSet};

fn ms(n: i64) -> Millis {
    Millis::from_integer(n)
}

#[test]
fn short_example_global_model() {
    let p = corpus::running_example_short();
    let r = run_pipeline(&p, PipelineOptions::default()).unwrap();
    assert_eq!(r.global.render_seconds(), "1 + 3A + 3AB + 3AC");
    let r1 = r.regions.by_name("R1").unwrap();
    let l1 = r.locals.iter().find(|m| m.scope.to_string() == r1.id.0).unwrap();
    assert_eq!(l1.render_seconds(), "3A + 3AC");
}

#[test]
fn full_example_global_model() {
    let p = corpus::running_example();
    let r = run_pipeline(&p, PipelineOptions::default()).unwrap();
    let expected = [
        (opts(&[]), 1000),
        (opts(&["A"]), 3100),
        (opts(&["B"]), 200),
        (opts(&["C"]), 300),
        (opts(&["D"]), 400),
        (opts(&["E"]), 500),
        (opts(&["F"]), 600),
        (opts(&["G"]), 700),
        (opts(&["H"]), 800),
        (opts(&["I"]), 900),
        (opts(&["A", "B"]), 3000),
        (opts(&["A", "C"]), 3000),
        (opts(&["D", "E", "F"]), 5000),
    ];
    let got: BTreeMap<OptionSet, Millis> = r.global.terms().into_iter().map(|t| (t.options, t.ms)).collect();
    let want: BTreeMap<OptionSet, Millis> = expected.into_iter().map(|(o, n)| (o, ms(n))).collect();
    assert_eq!(got, want);
    assert_eq!(r.compressed.len(), 8);
}

#[test]
fn global_models_are_exact_on_the_corpus() {
    for (name, p) in corpus::programs() {
        for optimize in [false, true] {
            let r = run_pipeline(&p, PipelineOptions { optimize, ..Default::default() }).unwrap();
            for c in Configuration::enumerate(p.options()) {
                assert_eq!(r.global.predict(&c), end_to_end(&p, &c).unwrap(), "{name} {c} optimize={optimize}");
            }
        }
    }
}

#[test]
fn optimization_does_not_change_the_global_model() {
    for (name, p) in corpus::programs() {
        let a = run_pipeline(&p, PipelineOptions { optimize: false, ..Default::default() }).unwrap();
        let b = run_pipeline(&p, PipelineOptions::default()).unwrap();
        assert_eq!(a.global, b.global, "{name}");
        assert!(b.regions.len() <= a.regions.len(), "{name}");
    }
}

#[test]
fn short_example_classification() {
    let p = corpus::running_example_short();
    let r = run_pipeline(&p, PipelineOptions::default()).unwrap();
    let report = classify_regions(&r.locals, &r.performance);
    let by_name = |n: &str| report.iter().find(|e| e.name == n).unwrap();
    assert_eq!(by_name("base").category, Category::NotInfluencedNonNegligible);
    assert_eq!(by_name("R1").category, Category::Influenced);
    assert_eq!((by_name("R1").min_degree, by_name("R1").max_degree), (Some(1), Some(2)));
    assert_eq!((by_name("R2").min_degree, by_name("R2").max_degree), (Some(2), Some(2)));
}

fn events(p: &ccrush_core::lang::Program, optimize: bool, config: &str) -> usize {
    let (_, _, regions) = analyze_regions(p, optimize).unwrap();
    run(p, &Configuration::parse_list(config), &regions).unwrap().trace.events.len()
}

#[test]
fn full_example_event_counts() {
    let p = corpus::running_example();
    assert_eq!(events(&p, false, "A,B,C"), 28);
    assert_eq!(events(&p, true, "A,B,C"), 24);
}

#[test]
fn deep_loop_events_shrink_by_two_orders() {
    let p = corpus::deep_loop();
    let plain = events(&p, false, "A,B");
    let optimized = events(&p, true, "A,B");
    assert!(plain >= 100 * optimized, "{plain} vs {optimized}");
}
