//! Brute-force class counts over all adjacency masks, and the harness that
//! compares them with grammar enumeration and tree generation.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::classes::{enumerate, ClassDefinition, ClassError, Variant};
use crate::glt::{generate_trees, GltError, TreePolicy};
use crate::graphs::{
    apply_pair_map, canonical_mask, for_each_permutation, is_member, permuted_pair_indices, Graph, GraphClass,
    GraphError,
};

pub const MAX_ORACLE_VERTICES: usize = 7;
const DEFAULT_SHARDS: usize = 64;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle supports 1..={max} vertices, got {n}")]
    Size { n: usize, max: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Tree(#[from] GltError),
}

fn check_size(n: usize) -> Result<(), OracleError> {
    if (1..=MAX_ORACLE_VERTICES).contains(&n) {
        Ok(())
    } else {
        Err(OracleError::Size { n, max: MAX_ORACLE_VERTICES })
    }
}

fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Labeled connected graphs on `n` vertices accepted by `pred`, with the
/// mask space split into `shards` contiguous ranges counted in parallel.
pub fn count_labeled_with(n: usize, shards: usize, pred: impl Fn(&Graph) -> bool + Sync) -> Result<u64, OracleError> {
    check_size(n)?;
    let total = 1u64 << pair_count(n);
    let shards = (shards.max(1) as u64).min(total);
    let count = (0..shards)
        .into_par_iter()
        .map(|s| {
            let (lo, hi) = (total * s / shards, total * (s + 1) / shards);
            (lo..hi)
                .filter(|&m| {
                    let g = Graph::from_upper_mask(n, m);
                    g.is_connected() && pred(&g)
                })
                .count() as u64
        })
        .sum();
    Ok(count)
}

/// Labeled members of `class` on vertex set `0..n`.
pub fn count_labeled(class: GraphClass, n: usize) -> Result<u64, OracleError> {
    count_labeled_with(n, DEFAULT_SHARDS, |g| is_member(g, class).expect("connected input"))
}

/// Isomorphism classes of members, found by marking whole orbits of masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitCount {
    /// Minimal mask of each member class.
    pub members: BTreeSet<u64>,
    /// Sum of orbit sizes; equals the labeled count.
    pub labeled: u64,
}

pub fn count_orbits(class: GraphClass, n: usize) -> Result<OrbitCount, OracleError> {
    check_size(n)?;
    let pairs = pair_count(n);
    let mut maps = Vec::new();
    for_each_permutation(n, |p| maps.push(permuted_pair_indices(n, p)));
    let total = 1usize << pairs;
    let mut seen = vec![0u64; total.div_ceil(64)];
    let mut members = BTreeSet::new();
    let mut labeled = 0u64;
    let mut orbit = Vec::new();
    for m in 0..total as u64 {
        if seen[m as usize / 64] >> (m % 64) & 1 == 1 {
            continue;
        }
        orbit.clear();
        for map in &maps {
            let image = apply_pair_map(m, map);
            let (w, b) = (image as usize / 64, image % 64);
            if seen[w] >> b & 1 == 0 {
                seen[w] |= 1 << b;
                orbit.push(image);
            }
        }
        let g = Graph::from_upper_mask(n, m);
        if g.is_connected() && is_member(&g, class)? {
            members.insert(*orbit.iter().min().expect("orbit contains m"));
            labeled += orbit.len() as u64;
        }
    }
    Ok(OrbitCount { members, labeled })
}

/// Unlabeled members of `class` on `n` vertices.
pub fn count_unlabeled(class: GraphClass, n: usize) -> Result<u64, OracleError> {
    Ok(count_orbits(class, n)?.members.len() as u64)
}

/// Minimal masks of the member classes (the form used by
/// [`crate::graphs::canonical_mask`]).
pub fn member_canonical_set(class: GraphClass, n: usize) -> Result<BTreeSet<u64>, OracleError> {
    Ok(count_orbits(class, n)?.members)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheckRow {
    pub n: usize,
    pub oracle_labeled: u64,
    pub grammar_labeled: Option<u64>,
    pub oracle_unlabeled: u64,
    pub grammar_unlabeled: Option<u64>,
    /// Trees generated for `n >= 3`.
    pub treegen_unlabeled: Option<u64>,
    /// Tree accessibility graphs equal the oracle member set, without repeats.
    pub treegen_matches: Option<bool>,
    pub error: Option<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheckReport {
    pub class: String,
    pub rows: Vec<CrossCheckRow>,
}

impl CrossCheckReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialise")
    }
}

impl fmt::Display for CrossCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
        writeln!(
            f,
            "{:<10} {:>3} {:>10} {:>10} {:>10} {:>10} {:>10}  verdict",
            "class", "n", "oracle-L", "grammar-L", "oracle-U", "grammar-U", "trees-U"
        )?;
        for r in &self.rows {
            let trees = match (r.treegen_unlabeled, r.treegen_matches) {
                (Some(t), Some(false)) => format!("{t}!"),
                (t, _) => opt(t),
            };
            writeln!(
                f,
                "{:<10} {:>3} {:>10} {:>10} {:>10} {:>10} {:>10}  {}{}",
                self.class,
                r.n,
                r.oracle_labeled,
                opt(r.grammar_labeled),
                r.oracle_unlabeled,
                opt(r.grammar_unlabeled),
                trees,
                if r.pass { "pass" } else { "FAIL" },
                r.error.as_ref().map_or(String::new(), |e| format!(" ({e})")),
            )?;
        }
        Ok(())
    }
}

/// Compares oracle, grammar and tree-generation counts for sizes `1..=n_max`.
/// Failures become rows with a failing verdict.
pub fn cross_check(class: &ClassDefinition, n_max: usize) -> Result<CrossCheckReport, OracleError> {
    let n_max = n_max.min(MAX_ORACLE_VERTICES);
    let predicate: GraphClass = class.predicate.parse()?;
    let policy = TreePolicy::from(class.name);
    let grammar = |v| enumerate(class, v, n_max).map_err(|e| e.to_string());
    let (labeled, unlabeled) = (grammar(Variant::LabeledUnrooted), grammar(Variant::UnlabeledUnrooted));
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let orbits = count_orbits(predicate, n)?;
        let oracle_labeled = count_labeled(predicate, n)?;
        let mut error = labeled.as_ref().err().or(unlabeled.as_ref().err()).cloned();
        let pick = |s: &Result<crate::series::Series, String>| s.as_ref().ok().and_then(|s| s.coeff(n).to_u64());
        let (grammar_labeled, grammar_unlabeled) = (pick(&labeled), pick(&unlabeled));
        let (mut treegen_unlabeled, mut treegen_matches) = (None, None);
        if n >= 3 {
            let trees = generate_trees(n, policy)?;
            let mut forms = BTreeSet::new();
            let mut distinct = true;
            for t in &trees {
                distinct &= forms.insert(canonical_mask(&t.accessibility_graph()?)?);
            }
            treegen_unlabeled = Some(trees.len() as u64);
            treegen_matches = Some(distinct && forms == orbits.members);
        }
        if orbits.labeled != oracle_labeled {
            error.get_or_insert_with(|| format!("orbit total {} differs from mask count", orbits.labeled));
        }
        let oracle_unlabeled = orbits.members.len() as u64;
        let pass = error.is_none()
            && grammar_labeled == Some(oracle_labeled)
            && grammar_unlabeled == Some(oracle_unlabeled)
            && treegen_unlabeled.is_none_or(|t| t == oracle_unlabeled)
            && treegen_matches.unwrap_or(true);
        rows.push(CrossCheckRow {
            n,
            oracle_labeled,
            grammar_labeled,
            oracle_unlabeled,
            grammar_unlabeled,
            treegen_unlabeled,
            treegen_matches,
            error,
            pass,
        });
    }
    Ok(CrossCheckReport { class: class.name.to_string(), rows })
}
