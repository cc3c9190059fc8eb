//! Acceptance suite: one pass/fail line per criterion, exit status 1 if any
//! criterion fails. Runs without the libtest harness so that the lines are
//! always printed.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use splitenum::classes::{enumerate_class, ClassName, Variant};
use splitenum::glt::{check_lemma_suite, generate_trees, TreePolicy, MIN_GENERATED_LEAVES};
use splitenum::graphs::{canonical_mask, GraphClass};
use splitenum::oracle::{count_labeled, count_unlabeled, member_canonical_set, MAX_ORACLE_VERTICES};
use splitenum_cli::fixtures::{first_divergence, Fixtures};
use splitenum_cli::output::Scientific;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn predicate(class: ClassName) -> GraphClass {
    class.definition().predicate.parse().expect("bundled predicate names are valid")
}

/// Every bundled prefix is reproduced exactly, each in under 5 s.
fn sequences(fixtures: &Fixtures) -> Outcome {
    let limit = Duration::from_secs(5);
    let mut slowest = Duration::ZERO;
    for e in &fixtures.sequences {
        let (series, t) = timed(|| enumerate_class(e.class, e.variant, e.values.len()));
        let series = series.map_err(|err| format!("{} {}: {err}", e.class, e.variant))?;
        if let Some(d) = first_divergence(&e.values, &series) {
            return Err(format!(
                "{} {} [{}]: n = {} expected {} got {}",
                e.class, e.variant, e.source, d.n, d.expected, d.got
            ));
        }
        if t > limit {
            return Err(format!("{} {} took {}", e.class, e.variant, secs(t)));
        }
        slowest = slowest.max(t);
    }
    Ok(format!("{} sequences, slowest {}", fixtures.sequences.len(), secs(slowest)))
}

/// Three-significant-digit renderings at the fixture sizes, each class in
/// under 10 s.
fn magnitudes(fixtures: &Fixtures) -> Outcome {
    let limit = Duration::from_secs(10);
    let mut shown = Vec::new();
    for m in &fixtures.magnitudes {
        let (series, t) = timed(|| enumerate_class(m.class, m.variant, m.n));
        let series = series.map_err(|e| format!("{}: {e}", m.class))?;
        let got = Scientific::new(series.coeff(m.n));
        if !m.matches(&got) {
            return Err(format!("{} n = {}: expected {} got {got}", m.class, m.n, m.rendered()));
        }
        if t > limit {
            return Err(format!("{} took {}", m.class, secs(t)));
        }
        shown.push(format!("{} {got}", m.class));
    }
    if shown.len() != ClassName::ALL.len() {
        return Err(format!("expected one magnitude per class, found {}", shown.len()));
    }
    Ok(shown.join(", "))
}

/// Brute-force labeled and unlabeled counts equal the grammar for n <= 7.
fn oracle() -> Outcome {
    let limit = Duration::from_secs(300);
    let n_max = MAX_ORACLE_VERTICES;
    let (result, t) = timed(|| -> Outcome {
        for class in ClassName::ALL {
            let lu = enumerate_class(class, Variant::LabeledUnrooted, n_max).map_err(|e| e.to_string())?;
            let uu = enumerate_class(class, Variant::UnlabeledUnrooted, n_max).map_err(|e| e.to_string())?;
            for n in 1..=n_max {
                let labeled = BigInt::from(count_labeled(predicate(class), n).map_err(|e| e.to_string())?);
                let unlabeled = BigInt::from(count_unlabeled(predicate(class), n).map_err(|e| e.to_string())?);
                if &labeled != lu.coeff(n) || &unlabeled != uu.coeff(n) {
                    return Err(format!(
                        "{class} n = {n}: oracle {labeled}/{unlabeled}, grammar {}/{}",
                        lu.coeff(n),
                        uu.coeff(n)
                    ));
                }
            }
        }
        Ok(String::new())
    });
    result?;
    if t > limit {
        return Err(format!("took {}", secs(t)));
    }
    Ok(format!("5 classes, n <= {n_max}, {}", secs(t)))
}

/// Generated trees are distinct and their accessibility graphs are exactly
/// the class members, up to isomorphism.
fn tree_bijection() -> Outcome {
    let mut checked = 0;
    let pairs = ClassName::ALL
        .map(|c| (TreePolicy::from(c), predicate(c)))
        .into_iter()
        .chain([(TreePolicy::DistanceHereditary, GraphClass::DistanceHereditary)]);
    for (policy, class) in pairs {
        for n in MIN_GENERATED_LEAVES..=MAX_ORACLE_VERTICES {
            let trees = generate_trees(n, policy).map_err(|e| e.to_string())?;
            let mut encodings = BTreeSet::new();
            let mut forms = BTreeSet::new();
            for t in &trees {
                if !t.is_reduced() || !encodings.insert(t.canonical_encoding()) {
                    return Err(format!("{policy} n = {n}: repeated or unreduced tree"));
                }
                let g = t.accessibility_graph().map_err(|e| e.to_string())?;
                if !forms.insert(canonical_mask(&g).map_err(|e| e.to_string())?) {
                    return Err(format!("{policy} n = {n}: two trees give isomorphic graphs"));
                }
            }
            let members = member_canonical_set(class, n).map_err(|e| e.to_string())?;
            if forms != members {
                return Err(format!("{policy} n = {n}: {} tree graphs vs {} members", forms.len(), members.len()));
            }
            checked += trees.len();
        }
    }
    Ok(format!("{checked} trees over 6 policies, 3 <= n <= {MAX_ORACLE_VERTICES}"))
}

/// Forbidden-pattern equivalences and alternated-path lemmas on every
/// reduced tree with at most 6 leaves.
fn lemmas() -> Outcome {
    let mut trees = 0;
    for n in MIN_GENERATED_LEAVES..=6 {
        let r = check_lemma_suite(n).map_err(|e| e.to_string())?;
        if let Some(f) = r.failures.first() {
            return Err(format!("{} counterexamples at n = {n}, first: {f}", r.failures.len()));
        }
        trees += r.trees;
    }
    Ok(format!("{trees} trees, 0 counterexamples"))
}

/// 500 terms of every class in every variant, each in under 60 s.
fn scale() -> Outcome {
    let (limit, terms) = (Duration::from_secs(60), 500);
    let mut slowest = (Duration::ZERO, String::new());
    for class in ClassName::ALL {
        for variant in Variant::ALL {
            let (series, t) = timed(|| enumerate_class(class, variant, terms));
            let series = series.map_err(|e| format!("{class} {variant}: {e}"))?;
            if series.trunc_degree() < terms {
                return Err(format!("{class} {variant}: only {} terms", series.trunc_degree()));
            }
            if t > limit {
                return Err(format!("{class} {variant} took {}", secs(t)));
            }
            if t > slowest.0 {
                slowest = (t, format!("{class} {variant}"));
            }
        }
    }
    Ok(format!("{terms} terms x 20, slowest {} {}", slowest.1, secs(slowest.0)))
}

/// Rooting divisibility, truncation consistency and class nesting.
fn consistency() -> Outcome {
    for class in ClassName::ALL {
        let lr = enumerate_class(class, Variant::LabeledRooted, 100).map_err(|e| e.to_string())?;
        let lu = enumerate_class(class, Variant::LabeledUnrooted, 100).map_err(|e| e.to_string())?;
        for n in 1..=100 {
            let quotient = lr.coeff(n) / BigInt::from(n);
            if !(lr.coeff(n) % BigInt::from(n)).is_zero() || &quotient != lu.coeff(n) {
                return Err(format!("{class} n = {n}: labeled rooted {} vs unrooted {}", lr.coeff(n), lu.coeff(n)));
            }
        }
        for variant in Variant::ALL {
            let long = enumerate_class(class, variant, 90).map_err(|e| e.to_string())?;
            for short in [1, 17, 45] {
                let s = enumerate_class(class, variant, short).map_err(|e| e.to_string())?;
                if s != long.truncate(short) {
                    return Err(format!("{class} {variant}: truncation at {short} disagrees"));
                }
            }
        }
    }
    let chain = [ClassName::Cactus3, ClassName::Cactus23, ClassName::Block, ClassName::Ptolemaic];
    let counts = chain
        .map(|c| enumerate_class(c, Variant::UnlabeledUnrooted, 50).map_err(|e| e.to_string()))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    for n in 1..=50 {
        for (i, w) in counts.windows(2).enumerate() {
            if w[0].coeff(n) > w[1].coeff(n) {
                return Err(format!("n = {n}: {} exceeds {}", chain[i], chain[i + 1]));
            }
        }
    }
    Ok("divisibility n <= 100, truncation, nesting n <= 50".into())
}

fn main() {
    let fixtures = Fixtures::bundled();
    let criteria: [Criterion; 7] = [
        ("1 sequence reproduction", Box::new(|| sequences(&fixtures))),
        ("2 magnitude table", Box::new(|| magnitudes(&fixtures))),
        ("3 oracle equivalence", Box::new(oracle)),
        ("4 tree bijection", Box::new(tree_bijection)),
        ("5 lemma suites", Box::new(lemmas)),
        ("6 scale", Box::new(scale)),
        ("7 consistency", Box::new(consistency)),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let (outcome, t) = timed(check);
        match outcome {
            Ok(detail) => println!("criterion {name}: pass ({detail}) [{}]", secs(t)),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail}) [{}]", secs(t));
            }
        }
    }
    println!("acceptance: {} of 7 criteria pass", 7 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
