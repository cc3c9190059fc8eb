//! Systems of mutually recursive combinatorial classes.
//!
//! A [`RuleSystem`] maps rule names to [`GrammarExpr`] bodies built from atoms,
//! disjoint unions, products, sets and sequences, and carries an entry
//! expression: a signed sum of rule names. Unrooted classes use the entry to
//! express the dissymmetry combination (trees rooted at a node, plus trees
//! rooted at an undirected edge, minus trees rooted at a directed edge).
//!
//! Systems are evaluated to counting series under labeled semantics
//! (exponential generating functions, reported as counts `n! [z^n]`) or
//! unlabeled semantics (ordinary generating functions, sets through the
//! Pólya/Euler transforms).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{exact_div, RationalSeries, Series, SeriesError};

/// A decomposable construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum GrammarExpr {
    /// A leaf of the tree: one vertex, size 1.
    Atom,
    /// The distinguished root leaf. Counts exactly like [`GrammarExpr::Atom`].
    RootedAtom,
    Ref {
        rule: String,
    },
    Union {
        terms: Vec<GrammarExpr>,
    },
    Product {
        factors: Vec<GrammarExpr>,
    },
    SetAtLeast {
        of: Box<GrammarExpr>,
        k: usize,
    },
    SetExact {
        of: Box<GrammarExpr>,
        k: usize,
    },
    SeqAtLeast {
        of: Box<GrammarExpr>,
        k: usize,
    },
}

impl GrammarExpr {
    pub fn atom() -> Self {
        GrammarExpr::Atom
    }

    pub fn rooted_atom() -> Self {
        GrammarExpr::RootedAtom
    }

    pub fn r(rule: &str) -> Self {
        GrammarExpr::Ref { rule: rule.to_string() }
    }

    pub fn union(terms: Vec<GrammarExpr>) -> Self {
        GrammarExpr::Union { terms }
    }

    pub fn product(factors: Vec<GrammarExpr>) -> Self {
        GrammarExpr::Product { factors }
    }

    pub fn set_at_least(of: GrammarExpr, k: usize) -> Self {
        GrammarExpr::SetAtLeast { of: Box::new(of), k }
    }

    pub fn set_exact(of: GrammarExpr, k: usize) -> Self {
        GrammarExpr::SetExact { of: Box::new(of), k }
    }

    pub fn seq_at_least(of: GrammarExpr, k: usize) -> Self {
        GrammarExpr::SeqAtLeast { of: Box::new(of), k }
    }

    fn visit_refs<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            GrammarExpr::Atom | GrammarExpr::RootedAtom => {}
            GrammarExpr::Ref { rule } => f(rule),
            GrammarExpr::Union { terms: xs } | GrammarExpr::Product { factors: xs } => {
                xs.iter().for_each(|x| x.visit_refs(f))
            }
            GrammarExpr::SetAtLeast { of, .. }
            | GrammarExpr::SetExact { of, .. }
            | GrammarExpr::SeqAtLeast { of, .. } => of.visit_refs(f),
        }
    }

    /// Number of expression nodes, used as a size measure for listings.
    pub fn node_count(&self) -> usize {
        1 + match self {
            GrammarExpr::Atom | GrammarExpr::RootedAtom | GrammarExpr::Ref { .. } => 0,
            GrammarExpr::Union { terms: xs } | GrammarExpr::Product { factors: xs } => {
                xs.iter().map(GrammarExpr::node_count).sum()
            }
            GrammarExpr::SetAtLeast { of, .. }
            | GrammarExpr::SetExact { of, .. }
            | GrammarExpr::SeqAtLeast { of, .. } => of.node_count(),
        }
    }
}

impl fmt::Display for GrammarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, xs: &[GrammarExpr], sep: &str) -> fmt::Result {
            write!(f, "(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, "{sep}")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")
        }
        match self {
            GrammarExpr::Atom => write!(f, "Z"),
            GrammarExpr::RootedAtom => write!(f, "Z*"),
            GrammarExpr::Ref { rule } => write!(f, "{rule}"),
            GrammarExpr::Union { terms } => join(f, terms, " + "),
            GrammarExpr::Product { factors } => join(f, factors, " x "),
            GrammarExpr::SetAtLeast { of, k } => write!(f, "Set>={k}{{{of}}}"),
            GrammarExpr::SetExact { of, k } => write!(f, "Set={k}{{{of}}}"),
            GrammarExpr::SeqAtLeast { of, k } => write!(f, "Seq>={k}{{{of}}}"),
        }
    }
}

/// One signed term of an entry combination.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryTerm {
    pub rule: String,
    /// `+1` or `-1`.
    pub coeff: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Entry {
    pub terms: Vec<EntryTerm>,
}

impl Entry {
    pub fn single(rule: &str) -> Self {
        Entry { terms: vec![EntryTerm { rule: rule.to_string(), coeff: 1 }] }
    }

    pub fn signed(terms: &[(&str, i32)]) -> Self {
        Entry { terms: terms.iter().map(|&(rule, coeff)| EntryTerm { rule: rule.to_string(), coeff }).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSystem {
    pub rules: BTreeMap<String, GrammarExpr>,
    pub entry: Entry,
}

impl RuleSystem {
    pub fn new(rules: impl IntoIterator<Item = (&'static str, GrammarExpr)>, entry: Entry) -> Self {
        RuleSystem { rules: rules.into_iter().map(|(k, v)| (k.to_string(), v)).collect(), entry }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("rule systems always serialise")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semantics {
    Labeled,
    Unlabeled,
}

/// A problem found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    UnknownRule {
        in_rule: String,
        target: String,
    },
    UnknownEntryRule {
        rule: String,
    },
    BadEntryCoefficient {
        rule: String,
        coeff: i32,
    },
    EmptyEntry,
    /// The rule admits an object of size 0.
    ZeroSizeObject {
        rule: String,
    },
    /// A set or sequence is taken over a class containing size-0 objects.
    EmptyObjectsInCollection {
        rule: String,
    },
    /// Coefficient `n` of these rules depends on coefficient `n` of themselves.
    Cycle {
        rules: Vec<String>,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::UnknownRule { in_rule, target } => {
                write!(f, "rule {in_rule} refers to unknown rule {target}")
            }
            Diagnostic::UnknownEntryRule { rule } => write!(f, "entry refers to unknown rule {rule}"),
            Diagnostic::BadEntryCoefficient { rule, coeff } => {
                write!(f, "entry coefficient {coeff} on {rule} is not +1 or -1")
            }
            Diagnostic::EmptyEntry => write!(f, "entry combination is empty"),
            Diagnostic::ZeroSizeObject { rule } => write!(f, "rule {rule} admits an object of size 0"),
            Diagnostic::EmptyObjectsInCollection { rule } => {
                write!(f, "rule {rule} takes a set or sequence over objects of size 0")
            }
            Diagnostic::Cycle { rules } => {
                write!(f, "ill-founded cycle with no size increase: {}", rules.join(" -> "))
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("invalid rule system: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("fixed-point iteration did not converge (degree {degree}, {sweeps} sweeps)")]
    IllFounded { degree: usize, sweeps: usize },
    #[error("rule {rule} has negative coefficient {value} at degree {degree}")]
    NegativeCoefficient { rule: String, degree: usize, value: BigInt },
    #[error("entry combination is negative ({value}) at degree {degree}: the dissymmetry encoding is wrong")]
    DissymmetryViolation { degree: usize, value: BigInt },
    #[error("rule {0} is not present")]
    MissingRule(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Minimum size of an object, `None` for an empty class.
type Valuation = Option<usize>;

fn expr_valuation(expr: &GrammarExpr, rules: &BTreeMap<String, Valuation>) -> Valuation {
    match expr {
        GrammarExpr::Atom | GrammarExpr::RootedAtom => Some(1),
        GrammarExpr::Ref { rule } => rules.get(rule).copied().flatten(),
        GrammarExpr::Union { terms } => terms.iter().filter_map(|t| expr_valuation(t, rules)).min(),
        GrammarExpr::Product { factors } => {
            factors.iter().map(|t| expr_valuation(t, rules)).try_fold(0usize, |acc, v| v.map(|v| acc + v))
        }
        GrammarExpr::SetAtLeast { of, k } | GrammarExpr::SeqAtLeast { of, k } | GrammarExpr::SetExact { of, k } => {
            if *k == 0 {
                Some(0)
            } else {
                expr_valuation(of, rules).map(|v| v * k)
            }
        }
    }
}

fn rule_valuations(system: &RuleSystem) -> BTreeMap<String, Valuation> {
    let mut vals: BTreeMap<String, Valuation> = system.rules.keys().map(|k| (k.clone(), None)).collect();
    loop {
        let mut changed = false;
        for (name, body) in &system.rules {
            let v = expr_valuation(body, &vals);
            if v != vals[name] {
                vals.insert(name.clone(), v);
                changed = true;
            }
        }
        if !changed {
            return vals;
        }
    }
}

/// Rules whose coefficient of degree `n` is needed for coefficient `n` of `expr`.
fn same_degree_deps(expr: &GrammarExpr, vals: &BTreeMap<String, Valuation>, out: &mut BTreeSet<String>) {
    match expr {
        GrammarExpr::Atom | GrammarExpr::RootedAtom => {}
        GrammarExpr::Ref { rule } => {
            out.insert(rule.clone());
        }
        GrammarExpr::Union { terms } => terms.iter().for_each(|t| same_degree_deps(t, vals, out)),
        GrammarExpr::Product { factors } => {
            let fv: Vec<Valuation> = factors.iter().map(|f| expr_valuation(f, vals)).collect();
            if fv.iter().any(Option::is_none) {
                return;
            }
            for (i, f) in factors.iter().enumerate() {
                let others_empty_ok = fv.iter().enumerate().all(|(j, v)| j == i || *v == Some(0));
                if others_empty_ok {
                    same_degree_deps(f, vals, out);
                }
            }
        }
        GrammarExpr::SetAtLeast { of, k } | GrammarExpr::SeqAtLeast { of, k } => {
            if *k <= 1 {
                same_degree_deps(of, vals, out);
            }
        }
        GrammarExpr::SetExact { of, k } => {
            if *k == 1 {
                same_degree_deps(of, vals, out);
            }
        }
    }
}

fn collections_over_empty(expr: &GrammarExpr, vals: &BTreeMap<String, Valuation>) -> bool {
    match expr {
        GrammarExpr::Atom | GrammarExpr::RootedAtom | GrammarExpr::Ref { .. } => false,
        GrammarExpr::Union { terms: xs } | GrammarExpr::Product { factors: xs } => {
            xs.iter().any(|x| collections_over_empty(x, vals))
        }
        GrammarExpr::SetAtLeast { of, .. } | GrammarExpr::SetExact { of, .. } | GrammarExpr::SeqAtLeast { of, .. } => {
            expr_valuation(of, vals) == Some(0) || collections_over_empty(of, vals)
        }
    }
}

/// Strongly connected components of a directed graph given as adjacency
/// lists, in an order where every component comes after the components it
/// points to.
pub(crate) fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct State<'a> {
        adj: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(s: &mut State<'_>, v: usize) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for &w in &s.adj[v] {
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                _ => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = s.stack.pop().expect("tarjan stack");
                s.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            s.out.push(comp);
        }
    }
    let n = adj.len();
    let mut s = State {
        adj,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.out
}

/// Checks that every reference resolves, every rule has positive valuation,
/// and every dependency cycle passes through a size-increasing construction.
/// An empty result means the system can be evaluated.
pub fn validate(system: &RuleSystem) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for (name, body) in &system.rules {
        let mut unknown = Vec::new();
        body.visit_refs(&mut |r| {
            if !system.rules.contains_key(r) {
                unknown.push(r.to_string());
            }
        });
        for target in unknown {
            diags.push(Diagnostic::UnknownRule { in_rule: name.clone(), target });
        }
    }
    if system.entry.terms.is_empty() {
        diags.push(Diagnostic::EmptyEntry);
    }
    for term in &system.entry.terms {
        if !system.rules.contains_key(&term.rule) {
            diags.push(Diagnostic::UnknownEntryRule { rule: term.rule.clone() });
        }
        if term.coeff != 1 && term.coeff != -1 {
            diags.push(Diagnostic::BadEntryCoefficient { rule: term.rule.clone(), coeff: term.coeff });
        }
    }
    if !diags.is_empty() {
        return diags;
    }

    let vals = rule_valuations(system);
    for (name, body) in &system.rules {
        if vals[name] == Some(0) {
            diags.push(Diagnostic::ZeroSizeObject { rule: name.clone() });
        }
        if collections_over_empty(body, &vals) {
            diags.push(Diagnostic::EmptyObjectsInCollection { rule: name.clone() });
        }
    }

    let names: Vec<&String> = system.rules.keys().collect();
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let adj: Vec<Vec<usize>> = names
        .iter()
        .map(|n| {
            let mut deps = BTreeSet::new();
            same_degree_deps(&system.rules[*n], &vals, &mut deps);
            deps.iter().map(|d| index[d.as_str()]).collect()
        })
        .collect();
    for comp in tarjan_scc(&adj) {
        let cyclic = comp.len() > 1 || adj[comp[0]].contains(&comp[0]);
        if cyclic {
            let mut rules: Vec<String> = comp.iter().map(|&i| names[i].clone()).collect();
            rules.sort();
            diags.push(Diagnostic::Cycle { rules });
        }
    }
    diags
}

/// Signed sum of rule series; the result must be coefficientwise non-negative.
pub fn combine_entry(values: &BTreeMap<String, Series>, entry: &Entry) -> Result<Series, GrammarError> {
    let mut total: Option<Series> = None;
    for term in &entry.terms {
        let s = values.get(&term.rule).ok_or_else(|| GrammarError::MissingRule(term.rule.clone()))?;
        let signed = if term.coeff < 0 { s.scale(&BigInt::from(-1)) } else { s.clone() };
        total = Some(match total {
            None => signed,
            Some(t) => t.add(&signed)?,
        });
    }
    let total = total.ok_or(GrammarError::Invalid(vec![Diagnostic::EmptyEntry]))?;
    if let Some((degree, value)) = total.first_negative() {
        return Err(GrammarError::DissymmetryViolation { degree, value: value.clone() });
    }
    Ok(total)
}

fn check_nonnegative(values: &BTreeMap<String, Series>) -> Result<(), GrammarError> {
    for (rule, s) in values {
        if let Some((degree, value)) = s.first_negative() {
            return Err(GrammarError::NegativeCoefficient { rule: rule.clone(), degree, value: value.clone() });
        }
    }
    Ok(())
}

/// Least fixed point of the system truncated at degree `n`, one series per
/// rule. Labeled results are counts (`n!` times the EGF coefficient).
///
/// Coefficients are produced degree by degree: at each degree the rules are
/// recomputed, in dependency order, until none of them changes.
pub fn evaluate(system: &RuleSystem, semantics: Semantics, n: usize) -> Result<BTreeMap<String, Series>, GrammarError> {
    let diags = validate(system);
    if !diags.is_empty() {
        return Err(GrammarError::Invalid(diags));
    }
    let mut engine = Engine::build(system, semantics);
    engine.run(n)?;
    let values = engine.rule_series(n);
    check_nonnegative(&values)?;
    Ok(values)
}

/// Evaluates the system and combines the entry.
pub fn evaluate_entry(system: &RuleSystem, semantics: Semantics, n: usize) -> Result<Series, GrammarError> {
    let values = evaluate(system, semantics, n)?;
    combine_entry(&values, &system.entry)
}

/// Whole-system fixed-point iteration on truncated series.
///
/// All rule series start at zero; every sweep recomputes every rule from the
/// previous sweep's values with the operations of [`crate::series`], until a
/// sweep changes nothing. `observer` sees the counts after each sweep.
pub fn evaluate_by_sweeps_with(
    system: &RuleSystem,
    semantics: Semantics,
    n: usize,
    mut observer: impl FnMut(usize, &BTreeMap<String, Series>),
) -> Result<(BTreeMap<String, Series>, usize), GrammarError> {
    let diags = validate(system);
    if !diags.is_empty() {
        return Err(GrammarError::Invalid(diags));
    }
    // Same-degree dependency chains delay convergence by one sweep per link.
    let vals = rule_valuations(system);
    let depth = same_degree_depth(system, &vals);
    let max_sweeps = (n + 2) * (depth + 1);

    let values = match semantics {
        Semantics::Unlabeled => {
            let mut current: BTreeMap<String, Series> =
                system.rules.keys().map(|k| (k.clone(), Series::zero(n))).collect();
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                let next = system
                    .rules
                    .iter()
                    .map(|(k, body)| Ok((k.clone(), eval_unlabeled(body, &current, n)?)))
                    .collect::<Result<BTreeMap<_, _>, GrammarError>>()?;
                observer(sweeps, &next);
                if next == current {
                    break (current, sweeps);
                }
                if sweeps > max_sweeps {
                    return Err(GrammarError::IllFounded { degree: n, sweeps });
                }
                current = next;
            }
        }
        Semantics::Labeled => {
            let mut current: BTreeMap<String, RationalSeries> =
                system.rules.keys().map(|k| (k.clone(), RationalSeries::zero(n))).collect();
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                let next = system
                    .rules
                    .iter()
                    .map(|(k, body)| Ok((k.clone(), eval_labeled(body, &current, n)?)))
                    .collect::<Result<BTreeMap<_, _>, GrammarError>>()?;
                let counts = to_counts(&next)?;
                observer(sweeps, &counts);
                if next == current {
                    break (counts, sweeps);
                }
                if sweeps > max_sweeps {
                    return Err(GrammarError::IllFounded { degree: n, sweeps });
                }
                current = next;
            }
        }
    };
    check_nonnegative(&values.0)?;
    Ok(values)
}

fn to_counts(egfs: &BTreeMap<String, RationalSeries>) -> Result<BTreeMap<String, Series>, GrammarError> {
    egfs.iter().map(|(k, s)| Ok((k.clone(), s.egf_to_counts()?))).collect()
}

/// Shortcut for [`evaluate_by_sweeps_with`] without an observer.
pub fn evaluate_by_sweeps(
    system: &RuleSystem,
    semantics: Semantics,
    n: usize,
) -> Result<BTreeMap<String, Series>, GrammarError> {
    evaluate_by_sweeps_with(system, semantics, n, |_, _| {}).map(|(v, _)| v)
}

fn same_degree_depth(system: &RuleSystem, vals: &BTreeMap<String, Valuation>) -> usize {
    fn depth_of(rule: &str, deps: &BTreeMap<String, BTreeSet<String>>, memo: &mut BTreeMap<String, usize>) -> usize {
        if let Some(&d) = memo.get(rule) {
            return d;
        }
        memo.insert(rule.to_string(), 0);
        let d = deps[rule].iter().map(|r| 1 + depth_of(r, deps, memo)).max().unwrap_or(0);
        memo.insert(rule.to_string(), d);
        d
    }
    let deps: BTreeMap<String, BTreeSet<String>> = system
        .rules
        .iter()
        .map(|(k, body)| {
            let mut out = BTreeSet::new();
            same_degree_deps(body, vals, &mut out);
            (k.clone(), out)
        })
        .collect();
    let mut memo = BTreeMap::new();
    system.rules.keys().map(|k| depth_of(k, &deps, &mut memo)).max().unwrap_or(0)
}

fn eval_unlabeled(expr: &GrammarExpr, env: &BTreeMap<String, Series>, n: usize) -> Result<Series, GrammarError> {
    Ok(match expr {
        GrammarExpr::Atom | GrammarExpr::RootedAtom => Series::atom(n),
        GrammarExpr::Ref { rule } => env[rule].clone(),
        GrammarExpr::Union { terms } => {
            let mut acc = Series::zero(n);
            for t in terms {
                acc = acc.add(&eval_unlabeled(t, env, n)?)?;
            }
            acc
        }
        GrammarExpr::Product { factors } => {
            let mut acc = Series::one(n);
            for f in factors {
                acc = acc.mul(&eval_unlabeled(f, env, n)?)?;
            }
            acc
        }
        GrammarExpr::SetAtLeast { of, k } => eval_unlabeled(of, env, n)?.mset_atleast(*k)?,
        GrammarExpr::SetExact { of, k } => eval_unlabeled(of, env, n)?.mset_exact(*k)?,
        GrammarExpr::SeqAtLeast { of, k } => eval_unlabeled(of, env, n)?.seq_atleast(*k)?,
    })
}

fn eval_labeled(
    expr: &GrammarExpr,
    env: &BTreeMap<String, RationalSeries>,
    n: usize,
) -> Result<RationalSeries, GrammarError> {
    Ok(match expr {
        GrammarExpr::Atom | GrammarExpr::RootedAtom => RationalSeries::atom(n),
        GrammarExpr::Ref { rule } => env[rule].clone(),
        GrammarExpr::Union { terms } => {
            let mut acc = RationalSeries::zero(n);
            for t in terms {
                acc = acc.add(&eval_labeled(t, env, n)?)?;
            }
            acc
        }
        GrammarExpr::Product { factors } => {
            let mut acc = RationalSeries::one(n);
            for f in factors {
                acc = acc.mul(&eval_labeled(f, env, n)?)?;
            }
            acc
        }
        GrammarExpr::SetAtLeast { of, k } => eval_labeled(of, env, n)?.labeled_set(*k, None)?,
        GrammarExpr::SetExact { of, k } => eval_labeled(of, env, n)?.labeled_set(0, Some(*k))?,
        GrammarExpr::SeqAtLeast { of, k } => eval_labeled(of, env, n)?.seq_atleast(*k)?,
    })
}

type NodeId = usize;

#[derive(Debug, Clone)]
enum Op {
    One,
    Atom,
    Alias(NodeId),
    Sum(Vec<NodeId>),
    Prod(NodeId, NodeId),
    /// All multisets, including the empty one.
    Mset(NodeId),
    /// Multisets of exactly `k >= 2` elements; `lower[j]` is the node for `j` elements.
    SetExact {
        base: NodeId,
        k: usize,
        lower: Vec<NodeId>,
    },
    /// `mset - sum(lower)`.
    SetAtLeast {
        mset: NodeId,
        lower: Vec<NodeId>,
    },
    /// `1 / (1 - base)`.
    SeqInv(NodeId),
}

#[derive(Debug)]
struct Node {
    op: Op,
    val: Valuation,
    coeffs: Vec<BigInt>,
    /// Unlabeled multisets: divisor sums `c_m = sum_{d|m} d base[d]`.
    aux: Vec<BigInt>,
}

/// Degree-by-degree evaluator over a hash-consed expression graph.
struct Engine {
    semantics: Semantics,
    nodes: Vec<Node>,
    memo: HashMap<GrammarExpr, NodeId>,
    rule_nodes: BTreeMap<String, NodeId>,
    order: Vec<Vec<NodeId>>,
    cyclic: Vec<bool>,
    /// Binomial rows `C(d, .)` and `C(d - 1, .)` for the degree in progress.
    binom: Vec<BigInt>,
    binom_prev: Vec<BigInt>,
}

impl Engine {
    fn build(system: &RuleSystem, semantics: Semantics) -> Self {
        let mut e = Engine {
            semantics,
            nodes: Vec::new(),
            memo: HashMap::new(),
            rule_nodes: BTreeMap::new(),
            order: Vec::new(),
            cyclic: Vec::new(),
            binom: Vec::new(),
            binom_prev: Vec::new(),
        };
        for name in system.rules.keys() {
            let id = e.push(Op::Alias(usize::MAX));
            e.rule_nodes.insert(name.clone(), id);
        }
        for (name, body) in &system.rules {
            let target = e.lower(body);
            let id = e.rule_nodes[name];
            e.nodes[id].op = Op::Alias(target);
        }
        e.compute_valuations();
        e.compute_order();
        e
    }

    fn push(&mut self, op: Op) -> NodeId {
        self.nodes.push(Node { op, val: None, coeffs: Vec::new(), aux: Vec::new() });
        self.nodes.len() - 1
    }

    fn lower(&mut self, expr: &GrammarExpr) -> NodeId {
        if let GrammarExpr::Ref { rule } = expr {
            return self.rule_nodes[rule];
        }
        if let Some(&id) = self.memo.get(expr) {
            return id;
        }
        let id = match expr {
            GrammarExpr::Atom | GrammarExpr::RootedAtom => self.push(Op::Atom),
            GrammarExpr::Ref { .. } => unreachable!(),
            GrammarExpr::Union { terms } => {
                let ids: Vec<NodeId> = terms.iter().map(|t| self.lower(t)).collect();
                if ids.len() == 1 {
                    ids[0]
                } else {
                    self.push(Op::Sum(ids))
                }
            }
            GrammarExpr::Product { factors } => {
                let ids: Vec<NodeId> = factors.iter().map(|t| self.lower(t)).collect();
                let mut it = ids.into_iter();
                match it.next() {
                    None => self.push(Op::One),
                    Some(first) => it.fold(first, |acc, f| self.push(Op::Prod(acc, f))),
                }
            }
            GrammarExpr::SetExact { of, k } => {
                let base = self.lower(of);
                self.set_exact_node(base, *k)
            }
            GrammarExpr::SetAtLeast { of, k } => {
                let base = self.lower(of);
                let mset = self.push(Op::Mset(base));
                if *k == 0 {
                    mset
                } else {
                    let lower = (0..*k).map(|j| self.set_exact_node(base, j)).collect();
                    self.push(Op::SetAtLeast { mset, lower })
                }
            }
            GrammarExpr::SeqAtLeast { of, k } => {
                let base = self.lower(of);
                let inv = self.push(Op::SeqInv(base));
                (0..*k).fold(inv, |acc, _| self.push(Op::Prod(base, acc)))
            }
        };
        self.memo.insert(expr.clone(), id);
        id
    }

    fn set_exact_node(&mut self, base: NodeId, k: usize) -> NodeId {
        match k {
            0 => self.push(Op::One),
            1 => base,
            _ => {
                let lower = (0..k).map(|j| self.set_exact_node(base, j)).collect();
                self.push(Op::SetExact { base, k, lower })
            }
        }
    }

    fn node_valuation(&self, id: NodeId) -> Valuation {
        let v = |i: NodeId| self.nodes[i].val;
        match &self.nodes[id].op {
            Op::One | Op::Mset(_) | Op::SeqInv(_) => Some(0),
            Op::Atom => Some(1),
            Op::Alias(t) => v(*t),
            Op::Sum(xs) => xs.iter().filter_map(|&x| v(x)).min(),
            Op::Prod(a, b) => Some(v(*a)? + v(*b)?),
            Op::SetExact { base, k, .. } => v(*base).map(|b| b * k),
            // lower has k entries, h_0..h_{k-1}
            Op::SetAtLeast { lower, mset } => {
                let base = match &self.nodes[*mset].op {
                    Op::Mset(b) => *b,
                    _ => unreachable!("SetAtLeast always wraps a multiset node"),
                };
                v(base).map(|b| b * lower.len())
            }
        }
    }

    fn compute_valuations(&mut self) {
        loop {
            let mut changed = false;
            for id in 0..self.nodes.len() {
                let v = self.node_valuation(id);
                if v != self.nodes[id].val {
                    self.nodes[id].val = v;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn deps(&self, id: NodeId) -> Vec<NodeId> {
        let val = |i: NodeId| self.nodes[i].val;
        match &self.nodes[id].op {
            Op::One | Op::Atom | Op::SetExact { .. } => vec![],
            Op::Alias(t) => vec![*t],
            Op::Sum(xs) => xs.clone(),
            Op::Prod(a, b) => {
                let mut d = Vec::new();
                if val(*a).is_some() && val(*b) == Some(0) {
                    d.push(*a);
                }
                if val(*b).is_some() && val(*a) == Some(0) {
                    d.push(*b);
                }
                d
            }
            Op::Mset(b) | Op::SeqInv(b) => vec![*b],
            Op::SetAtLeast { mset, lower } => {
                let mut d = vec![*mset];
                d.extend(lower);
                d
            }
        }
    }

    fn compute_order(&mut self) {
        let adj: Vec<Vec<NodeId>> = (0..self.nodes.len()).map(|i| self.deps(i)).collect();
        self.order = tarjan_scc(&adj);
        self.cyclic = self.order.iter().map(|c| c.len() > 1 || adj[c[0]].contains(&c[0])).collect();
    }

    fn run(&mut self, n: usize) -> Result<(), GrammarError> {
        for deg in 0..=n {
            self.advance_binomials(deg);
            for node in &mut self.nodes {
                node.coeffs.push(BigInt::zero());
                node.aux.push(BigInt::zero());
            }
            for ci in 0..self.order.len() {
                if !self.cyclic[ci] {
                    let id = self.order[ci][0];
                    self.nodes[id].coeffs[deg] = self.coefficient(id, deg);
                    continue;
                }
                let comp = self.order[ci].clone();
                let max_passes = comp.len() + 2;
                let mut passes = 0;
                loop {
                    passes += 1;
                    let mut changed = false;
                    for &id in &comp {
                        let c = self.coefficient(id, deg);
                        if c != self.nodes[id].coeffs[deg] {
                            self.nodes[id].coeffs[deg] = c;
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                    if passes > max_passes {
                        return Err(GrammarError::IllFounded { degree: deg, sweeps: passes });
                    }
                }
            }
        }
        Ok(())
    }

    fn advance_binomials(&mut self, deg: usize) {
        if self.semantics != Semantics::Labeled {
            return;
        }
        let mut next = vec![BigInt::one(); deg + 1];
        for k in 1..deg {
            next[k] = &self.binom[k - 1] + &self.binom[k];
        }
        self.binom_prev = std::mem::replace(&mut self.binom, next);
    }

    /// Product-like convolution `sum_m w(deg, m) a[m] b[deg - m]` over
    /// `m in lo..=hi`, where `w` is 1 (unlabeled) or `C(deg, m)` (labeled).
    fn convolve(&self, a: NodeId, b: NodeId, deg: usize, lo: usize, hi: usize) -> BigInt {
        let ca = &self.nodes[a].coeffs;
        let cb = &self.nodes[b].coeffs;
        let mut acc = BigInt::zero();
        for m in lo..=hi {
            let (x, y) = (&ca[m], &cb[deg - m]);
            if x.is_zero() || y.is_zero() {
                continue;
            }
            match self.semantics {
                Semantics::Unlabeled => acc += x * y,
                Semantics::Labeled => acc += &self.binom[m] * x * y,
            }
        }
        acc
    }

    fn coefficient(&mut self, id: NodeId, deg: usize) -> BigInt {
        let labeled = self.semantics == Semantics::Labeled;
        let op = self.nodes[id].op.clone();
        match op {
            Op::One => BigInt::from((deg == 0) as u8),
            Op::Atom => BigInt::from((deg == 1) as u8),
            Op::Alias(t) => self.nodes[t].coeffs[deg].clone(),
            Op::Sum(xs) => xs.iter().map(|&x| &self.nodes[x].coeffs[deg]).sum(),
            Op::Prod(a, b) => {
                let (Some(va), Some(vb)) = (self.nodes[a].val, self.nodes[b].val) else {
                    return BigInt::zero();
                };
                if va + vb > deg {
                    return BigInt::zero();
                }
                self.convolve(a, b, deg, va, deg - vb)
            }
            Op::Mset(base) => {
                if deg == 0 {
                    return BigInt::one();
                }
                let cb = &self.nodes[base].coeffs;
                let cm = &self.nodes[id].coeffs;
                if labeled {
                    let mut acc = BigInt::zero();
                    for m in 1..=deg {
                        if !cb[m].is_zero() && !cm[deg - m].is_zero() {
                            acc += &self.binom_prev[m - 1] * &cb[m] * &cm[deg - m];
                        }
                    }
                    acc
                } else {
                    let mut c_deg = BigInt::zero();
                    for d in 1..=deg {
                        if deg.is_multiple_of(d) && !cb[d].is_zero() {
                            c_deg += &cb[d] * d;
                        }
                    }
                    let aux = &self.nodes[id].aux;
                    let mut acc = &c_deg * &cm[0];
                    for m in 1..deg {
                        if !aux[m].is_zero() && !cm[deg - m].is_zero() {
                            acc += &aux[m] * &cm[deg - m];
                        }
                    }
                    self.nodes[id].aux[deg] = c_deg;
                    exact_div(acc, &BigInt::from(deg), deg).expect("Euler transform is integral")
                }
            }
            Op::SetExact { base, k, lower } => {
                let cb = &self.nodes[base].coeffs;
                let mut acc = BigInt::zero();
                if labeled {
                    let prev = &self.nodes[lower[k - 1]].coeffs;
                    for m in 1..deg {
                        if !cb[m].is_zero() && !prev[deg - m].is_zero() {
                            acc += &self.binom[m] * &cb[m] * &prev[deg - m];
                        }
                    }
                } else {
                    for i in 1..=k {
                        let h = &self.nodes[lower[k - i]].coeffs;
                        let mut m = i;
                        while m <= deg {
                            let a = &cb[m / i];
                            if !a.is_zero() && !h[deg - m].is_zero() {
                                acc += a * &h[deg - m];
                            }
                            m += i;
                        }
                    }
                }
                exact_div(acc, &BigInt::from(k), deg).expect("symmetric-group cycle index is integral")
            }
            Op::SetAtLeast { mset, lower } => {
                let mut acc = self.nodes[mset].coeffs[deg].clone();
                for l in lower {
                    acc -= &self.nodes[l].coeffs[deg];
                }
                acc
            }
            Op::SeqInv(base) => {
                if deg == 0 {
                    return BigInt::one();
                }
                let cb = &self.nodes[base].coeffs;
                let cs = &self.nodes[id].coeffs;
                let mut acc = BigInt::zero();
                for m in 1..=deg {
                    if !cb[m].is_zero() && !cs[deg - m].is_zero() {
                        if labeled {
                            acc += &self.binom[m] * &cb[m] * &cs[deg - m];
                        } else {
                            acc += &cb[m] * &cs[deg - m];
                        }
                    }
                }
                acc
            }
        }
    }

    fn rule_series(&self, n: usize) -> BTreeMap<String, Series> {
        self.rule_nodes
            .iter()
            .map(|(name, &id)| (name.clone(), Series::from_coeffs(self.nodes[id].coeffs.clone(), n)))
            .collect()
    }
}
