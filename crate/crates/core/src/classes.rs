//! The bundled graph classes: rooted and unrooted grammars on clique-star
//! trees, small-size corrections, size filters and the four enumeration
//! variants.
//!
//! Grammars are data: each class ships as a JSON [`ClassDefinition`] under
//! `data/v1/`. The grammars only describe trees with at least one internal
//! node, so the one-vertex and one-edge graphs are added as base cases.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{evaluate_entry, GrammarError, RuleSystem, Semantics};
use crate::series::Series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassName {
    Block,
    Ptolemaic,
    Cactus23,
    Cactus3,
    Cactus4,
}

impl ClassName {
    pub const ALL: [ClassName; 5] =
        [ClassName::Block, ClassName::Ptolemaic, ClassName::Cactus23, ClassName::Cactus3, ClassName::Cactus4];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassName::Block => "block",
            ClassName::Ptolemaic => "ptolemaic",
            ClassName::Cactus23 => "cactus23",
            ClassName::Cactus3 => "cactus3",
            ClassName::Cactus4 => "cactus4",
        }
    }

    fn data(self) -> &'static str {
        match self {
            ClassName::Block => include_str!("../data/v1/block.json"),
            ClassName::Ptolemaic => include_str!("../data/v1/ptolemaic.json"),
            ClassName::Cactus23 => include_str!("../data/v1/cactus23.json"),
            ClassName::Cactus3 => include_str!("../data/v1/cactus3.json"),
            ClassName::Cactus4 => include_str!("../data/v1/cactus4.json"),
        }
    }

    /// The bundled definition, parsed once.
    pub fn definition(self) -> &'static ClassDefinition {
        static DEFS: OnceLock<Vec<ClassDefinition>> = OnceLock::new();
        let defs = DEFS.get_or_init(|| {
            ClassName::ALL
                .iter()
                .map(|c| ClassDefinition::from_json(c.data()).expect("bundled class data is valid"))
                .collect()
        });
        &defs[ClassName::ALL.iter().position(|&c| c == self).expect("listed class")]
    }
}

impl fmt::Display for ClassName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for ClassName {
    type Err = ClassError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClassName::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| ClassError::UnknownClass(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "labeled-rooted")]
    LabeledRooted,
    #[serde(rename = "labeled-unrooted")]
    LabeledUnrooted,
    #[serde(rename = "unlabeled-rooted")]
    UnlabeledRooted,
    #[serde(rename = "unlabeled-unrooted")]
    UnlabeledUnrooted,
}

impl Variant {
    pub const ALL: [Variant; 4] =
        [Variant::LabeledRooted, Variant::LabeledUnrooted, Variant::UnlabeledRooted, Variant::UnlabeledUnrooted];

    pub fn new(labeled: bool, rooted: bool) -> Self {
        match (labeled, rooted) {
            (true, true) => Variant::LabeledRooted,
            (true, false) => Variant::LabeledUnrooted,
            (false, true) => Variant::UnlabeledRooted,
            (false, false) => Variant::UnlabeledUnrooted,
        }
    }

    pub fn labeled(self) -> bool {
        matches!(self, Variant::LabeledRooted | Variant::LabeledUnrooted)
    }

    pub fn rooted(self) -> bool {
        matches!(self, Variant::LabeledRooted | Variant::UnlabeledRooted)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::LabeledRooted => "labeled-rooted",
            Variant::LabeledUnrooted => "labeled-unrooted",
            Variant::UnlabeledRooted => "unlabeled-rooted",
            Variant::UnlabeledUnrooted => "unlabeled-unrooted",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = ClassError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL.into_iter().find(|v| v.as_str() == s).ok_or_else(|| ClassError::UnknownVariant(s.to_string()))
    }
}

/// Sizes `n` with `n % modulus == residue` may be nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeFilter {
    pub modulus: usize,
    pub residue: usize,
}

impl SizeFilter {
    pub fn admits(&self, n: usize) -> bool {
        n % self.modulus == self.residue
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseCase {
    pub variant: Variant,
    pub n: usize,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDefinition {
    pub name: ClassName,
    pub title: String,
    /// Membership predicate in [`crate::graphs`].
    pub predicate: String,
    /// Sequence identifiers per variant, where they exist.
    pub oeis: BTreeMap<Variant, String>,
    pub size_filter: SizeFilter,
    pub base_cases: Vec<BaseCase>,
    pub rooted: RuleSystem,
    pub unrooted: RuleSystem,
}

impl ClassDefinition {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("class definitions always serialise")
    }
}

#[derive(Debug, Error)]
pub enum ClassError {
    #[error("unknown class {0:?}; expected one of block, ptolemaic, cactus23, cactus3, cactus4")]
    UnknownClass(String),
    #[error(
        "unknown variant {0:?}; expected labeled-rooted, labeled-unrooted, unlabeled-rooted or unlabeled-unrooted"
    )]
    UnknownVariant(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("labeled rooted count {value} at n = {n} is not divisible by n")]
    NotDivisible { n: usize, value: BigInt },
    #[error("grammar produces {value} at base size n = {n} ({variant})")]
    BaseCaseConflict { variant: Variant, n: usize, value: BigInt },
    #[error("grammar produces {value} at size n = {n}, which the size filter excludes")]
    SizeFilterViolated { n: usize, value: BigInt },
}

/// Counts of class members of sizes `0..=n` (size 0 is always 0).
pub fn enumerate(class: &ClassDefinition, variant: Variant, n: usize) -> Result<Series, ClassError> {
    if variant == Variant::LabeledUnrooted {
        let rooted = enumerate(class, Variant::LabeledRooted, n)?;
        let mut out = Series::zero(n);
        for k in 1..=n {
            let (q, r) = rooted.coeff(k).div_rem(&BigInt::from(k));
            if !r.is_zero() {
                return Err(ClassError::NotDivisible { n: k, value: rooted.coeff(k).clone() });
            }
            out.set_coeff(k, q);
        }
        for base in class.base_cases.iter().filter(|b| b.variant == variant && b.n <= n) {
            if out.coeff(base.n) != &BigInt::from(base.count) {
                return Err(ClassError::BaseCaseConflict { variant, n: base.n, value: out.coeff(base.n).clone() });
            }
        }
        return Ok(out);
    }
    let system = if variant.rooted() { &class.rooted } else { &class.unrooted };
    let semantics = if variant.labeled() { Semantics::Labeled } else { Semantics::Unlabeled };
    let mut values = evaluate_entry(system, semantics, n)?;
    for base in class.base_cases.iter().filter(|b| b.variant == variant && b.n <= n) {
        let current = values.coeff(base.n);
        if !current.is_zero() {
            return Err(ClassError::BaseCaseConflict { variant, n: base.n, value: current.clone() });
        }
        values.set_coeff(base.n, BigInt::from(base.count));
    }
    for k in 0..=n {
        if !class.size_filter.admits(k) && !values.coeff(k).is_zero() {
            return Err(ClassError::SizeFilterViolated { n: k, value: values.coeff(k).clone() });
        }
    }
    Ok(values)
}

/// Shortcut for [`enumerate`] on a bundled class.
pub fn enumerate_class(class: ClassName, variant: Variant, n: usize) -> Result<Series, ClassError> {
    enumerate(class.definition(), variant, n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassInfo {
    pub name: ClassName,
    pub title: String,
    pub rooted_rules: usize,
    pub unrooted_rules: usize,
    /// Total expression nodes over both systems.
    pub grammar_size: usize,
    pub oeis: BTreeMap<Variant, String>,
}

pub fn list_classes() -> Vec<ClassInfo> {
    ClassName::ALL
        .iter()
        .map(|&c| {
            let d = c.definition();
            let size = |s: &RuleSystem| s.rules.values().map(|e| e.node_count()).sum::<usize>();
            ClassInfo {
                name: c,
                title: d.title.clone(),
                rooted_rules: d.rooted.rules.len(),
                unrooted_rules: d.unrooted.rules.len(),
                grammar_size: size(&d.rooted) + size(&d.unrooted),
                oeis: d.oeis.clone(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{validate, GrammarExpr};

    fn ints(s: &Series) -> Vec<i64> {
        s.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect()
    }

    fn prefix(class: ClassName, variant: Variant, n: usize) -> Vec<i64> {
        ints(&enumerate_class(class, variant, n).unwrap())[1..].to_vec()
    }

    #[test]
    fn bundled_definitions_are_valid() {
        for c in ClassName::ALL {
            let d = c.definition();
            assert_eq!(d.name, c);
            assert_eq!(validate(&d.rooted), vec![], "{c} rooted");
            assert_eq!(validate(&d.unrooted), vec![], "{c} unrooted");
            let again = ClassDefinition::from_json(&d.to_json()).unwrap();
            assert_eq!(&again, d);
        }
    }

    #[test]
    fn table_prefixes() {
        use ClassName::*;
        use Variant::*;
        assert_eq!(prefix(Block, UnlabeledUnrooted, 8), [1, 1, 2, 4, 9, 22, 59, 165]);
        assert_eq!(prefix(Ptolemaic, LabeledUnrooted, 6), [1, 1, 4, 35, 481, 9042]);
        assert_eq!(prefix(Cactus3, UnlabeledUnrooted, 9), [0, 0, 1, 0, 1, 0, 2, 0, 4]);
        assert_eq!(prefix(Cactus4, LabeledUnrooted, 10), [0, 0, 0, 3, 0, 0, 630, 0, 0, 756000]);
        assert_eq!(prefix(Cactus23, UnlabeledUnrooted, 8), [1, 1, 2, 3, 7, 16, 41, 106]);
        assert_eq!(prefix(Block, LabeledRooted, 5), [1, 2, 12, 116, 1555]);
        assert_eq!(prefix(Block, UnlabeledRooted, 6), [1, 1, 3, 8, 25, 77]);
        assert_eq!(prefix(Ptolemaic, LabeledRooted, 5), [1, 2, 12, 140, 2405]);
        assert_eq!(prefix(Cactus4, UnlabeledUnrooted, 13), [0, 0, 0, 1, 0, 0, 1, 0, 0, 3, 0, 0, 7]);
        assert_eq!(prefix(Cactus3, UnlabeledRooted, 7), [0, 0, 1, 0, 2, 0, 5]);
    }

    #[test]
    fn metadata() {
        let info = list_classes();
        let by_name = |c: ClassName| info.iter().find(|i| i.name == c).unwrap();
        let ids: Vec<&str> = by_name(ClassName::Block).oeis.values().map(String::as_str).collect();
        assert_eq!(ids, ["A035051", "A030019", "A007563", "A035053"]);
        assert!(by_name(ClassName::Ptolemaic).oeis.is_empty());
        let ids: Vec<&str> = by_name(ClassName::Cactus3).oeis.values().map(String::as_str).collect();
        assert_eq!(ids, ["A034940", "A034941", "A003080", "A003081"]);
        assert!(info.iter().all(|i| i.grammar_size > 0));
    }

    #[test]
    fn names_parse() {
        for c in ClassName::ALL {
            assert_eq!(c.as_str().parse::<ClassName>().unwrap(), c);
        }
        for v in Variant::ALL {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
            assert_eq!(Variant::new(v.labeled(), v.rooted()), v);
        }
        assert!("trees".parse::<ClassName>().is_err());
        assert!("rooted".parse::<Variant>().is_err());
    }

    #[test]
    fn labeled_dissymmetry_matches_rooted_quotient() {
        // The unrooted system evaluated with labeled semantics must agree with
        // the rooted count divided by n, beyond the base cases.
        for c in ClassName::ALL {
            let d = c.definition();
            let n = 14;
            let via_entry = evaluate_entry(&d.unrooted, Semantics::Labeled, n).unwrap();
            let via_root = enumerate(d, Variant::LabeledUnrooted, n).unwrap();
            for k in 3..=n {
                assert_eq!(via_entry.coeff(k), via_root.coeff(k), "{c} n = {k}");
            }
        }
    }

    #[test]
    fn rooted_dominates_unrooted() {
        for c in ClassName::ALL {
            let n = 30;
            let r = enumerate_class(c, Variant::UnlabeledRooted, n).unwrap();
            let u = enumerate_class(c, Variant::UnlabeledUnrooted, n).unwrap();
            let lr = enumerate_class(c, Variant::LabeledRooted, n).unwrap();
            let lu = enumerate_class(c, Variant::LabeledUnrooted, n).unwrap();
            for k in 0..=n {
                assert!(r.coeff(k) >= u.coeff(k), "{c} n = {k}");
                assert_eq!(lr.coeff(k), &(lu.coeff(k) * k), "{c} n = {k}");
            }
        }
    }

    #[test]
    fn nesting() {
        let n = 40;
        let get = |c| enumerate_class(c, Variant::UnlabeledUnrooted, n).unwrap();
        let (c3, c23, b, p) =
            (get(ClassName::Cactus3), get(ClassName::Cactus23), get(ClassName::Block), get(ClassName::Ptolemaic));
        for k in 0..=n {
            assert!(c3.coeff(k) <= c23.coeff(k));
            assert!(c23.coeff(k) <= b.coeff(k));
            assert!(b.coeff(k) <= p.coeff(k));
        }
    }

    #[test]
    fn size_filters_hold_without_masking() {
        for c in ClassName::ALL {
            let d = c.definition();
            for v in Variant::ALL {
                let s = enumerate(d, v, 30).unwrap();
                for k in 0..=30 {
                    if !d.size_filter.admits(k) {
                        assert!(s.coeff(k).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn corrupted_size_filter_is_reported() {
        let mut d = ClassName::Cactus3.definition().clone();
        d.size_filter = SizeFilter { modulus: 2, residue: 0 };
        assert!(matches!(
            enumerate(&d, Variant::UnlabeledUnrooted, 5),
            Err(ClassError::SizeFilterViolated { n: 3, .. })
        ));
    }

    #[test]
    fn base_case_conflict_is_reported() {
        let mut d = ClassName::Block.definition().clone();
        d.base_cases.push(BaseCase { variant: Variant::UnlabeledUnrooted, n: 3, count: 1 });
        assert!(matches!(enumerate(&d, Variant::UnlabeledUnrooted, 5), Err(ClassError::BaseCaseConflict { n: 3, .. })));
    }

    #[test]
    fn wrong_dissymmetry_sign_is_reported() {
        let mut d = ClassName::Block.definition().clone();
        for t in &mut d.unrooted.entry.terms {
            if t.rule == "T_K" {
                t.coeff = -1;
            }
        }
        assert!(matches!(
            enumerate(&d, Variant::UnlabeledUnrooted, 6),
            Err(ClassError::Grammar(GrammarError::DissymmetryViolation { .. }))
        ));
    }

    #[test]
    fn three_cactus_cliques_have_degree_three() {
        // Set>=2 in place of Set=2 lets clique nodes grow and breaks the table.
        let mut d = ClassName::Cactus3.definition().clone();
        let k = d.unrooted.rules.get_mut("K").unwrap();
        if let GrammarExpr::SetExact { of, .. } = k.clone() {
            *k = GrammarExpr::SetAtLeast { of, k: 2 };
        }
        let got = enumerate(&d, Variant::UnlabeledUnrooted, 9);
        assert!(match got {
            Ok(s) => ints(&s)[1..] != [0, 0, 1, 0, 1, 0, 2, 0, 4],
            Err(_) => true,
        });
    }
}
