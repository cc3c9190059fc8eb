//! Properties of the bundled class grammars under both semantics.

use num_bigint::BigInt;
use num_traits::One;
use splitenum::classes::{enumerate_class, ClassName, Variant};
use splitenum::grammar::{evaluate, evaluate_by_sweeps, evaluate_by_sweeps_with, Semantics};

fn systems() -> Vec<(String, &'static splitenum::grammar::RuleSystem)> {
    ClassName::ALL
        .iter()
        .flat_map(|c| {
            let d = c.definition();
            [(format!("{c} rooted"), &d.rooted), (format!("{c} unrooted"), &d.unrooted)]
        })
        .collect()
}

#[test]
fn degree_engine_matches_whole_system_sweeps() {
    for (name, sys) in systems() {
        for sem in [Semantics::Unlabeled, Semantics::Labeled] {
            let fast = evaluate(sys, sem, 16).unwrap();
            let slow = evaluate_by_sweeps(sys, sem, 16).unwrap();
            assert_eq!(fast, slow, "{name} {sem:?}");
        }
    }
}

#[test]
fn truncation_consistency() {
    for (name, sys) in systems() {
        for sem in [Semantics::Unlabeled, Semantics::Labeled] {
            let long = evaluate(sys, sem, 40).unwrap();
            for n in [1, 7, 20] {
                let short = evaluate(sys, sem, n).unwrap();
                for (rule, s) in &short {
                    assert_eq!(s, &long[rule].truncate(n), "{name} {sem:?} {rule} N = {n}");
                }
            }
            let swept = evaluate_by_sweeps(sys, sem, 10).unwrap();
            for (rule, s) in &swept {
                assert_eq!(s, &long[rule].truncate(10), "{name} {sem:?} {rule}");
            }
        }
    }
}

#[test]
fn sweeps_are_monotone_and_bounded() {
    for (name, sys) in systems() {
        let n = 12;
        let mut prev: Option<std::collections::BTreeMap<String, splitenum::series::Series>> = None;
        let (_, sweeps) = evaluate_by_sweeps_with(sys, Semantics::Unlabeled, n, |_, cur| {
            if let Some(p) = &prev {
                for (k, s) in cur {
                    for d in 0..=n {
                        assert!(s.coeff(d) >= p[k].coeff(d), "{name} {k} degree {d}");
                    }
                }
            }
            prev = Some(cur.clone());
        })
        .unwrap();
        assert!(sweeps <= n + 2, "{name}: {sweeps} sweeps");
    }
}

#[test]
fn labeled_counts_bounded_by_unlabeled() {
    for c in ClassName::ALL {
        for rooted in [true, false] {
            let lab = enumerate_class(c, Variant::new(true, rooted), 7).unwrap();
            let unl = enumerate_class(c, Variant::new(false, rooted), 7).unwrap();
            let mut fact = BigInt::one();
            for n in 1..=7usize {
                fact *= n;
                assert!(lab.coeff(n) <= &(&fact * unl.coeff(n)), "{c} rooted={rooted} n = {n}");
            }
        }
    }
}

#[test]
fn rooted_labeled_divisibility_to_one_hundred() {
    for c in ClassName::ALL {
        let rooted = enumerate_class(c, Variant::LabeledRooted, 100).unwrap();
        let unrooted = enumerate_class(c, Variant::LabeledUnrooted, 100).unwrap();
        for n in 1..=100usize {
            assert_eq!(rooted.coeff(n), &(unrooted.coeff(n) * n), "{c} n = {n}");
        }
    }
}
