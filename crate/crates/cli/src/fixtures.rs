//! Bundled expected values, each tagged with the table or OEIS entry it was
//! transcribed from.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use splitenum::classes::{ClassName, Variant};
use splitenum::series::Series;
use thiserror::Error;

use crate::output::Scientific;

/// The fixture file shipped with the binary.
pub const BUNDLED: &str = include_str!("../data/expected_sequences.json");

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("invalid fixture file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{class} {variant}: value {value:?} is not a non-negative integer")]
    BadValue { class: ClassName, variant: Variant, value: String },
}

/// A sequence prefix indexed from `n = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedSequence {
    pub class: ClassName,
    pub variant: Variant,
    pub source: String,
    pub values: Vec<BigInt>,
}

/// A three-significant-digit count at a single size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedMagnitude {
    pub class: ClassName,
    pub variant: Variant,
    pub n: usize,
    pub mantissa: String,
    pub exponent: u32,
    pub source: String,
}

impl ExpectedMagnitude {
    pub fn matches(&self, s: &Scientific) -> bool {
        s.mantissa == self.mantissa && s.exponent == self.exponent
    }

    pub fn rendered(&self) -> String {
        format!("{}×10^{}", self.mantissa, self.exponent)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Fixtures {
    pub sequences: Vec<ExpectedSequence>,
    pub magnitudes: Vec<ExpectedMagnitude>,
}

#[derive(Deserialize)]
struct RawSequence {
    class: ClassName,
    variant: Variant,
    source: String,
    values: Vec<String>,
}

#[derive(Deserialize)]
struct RawFixtures {
    sequences: Vec<RawSequence>,
    #[serde(default)]
    magnitudes: Vec<ExpectedMagnitude>,
}

impl Fixtures {
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED).expect("bundled fixtures are valid")
    }

    /// Values are decimal strings so that no precision is lost in transit.
    pub fn from_json(text: &str) -> Result<Self, FixtureError> {
        let raw: RawFixtures = serde_json::from_str(text)?;
        let sequences = raw
            .sequences
            .into_iter()
            .map(|s| {
                let values = s
                    .values
                    .iter()
                    .map(|v| match v.parse::<BigInt>() {
                        Ok(x) if v.bytes().all(|b| b.is_ascii_digit()) => Ok(x),
                        _ => Err(FixtureError::BadValue { class: s.class, variant: s.variant, value: v.clone() }),
                    })
                    .collect::<Result<_, _>>()?;
                Ok(ExpectedSequence { class: s.class, variant: s.variant, source: s.source, values })
            })
            .collect::<Result<_, FixtureError>>()?;
        Ok(Fixtures { sequences, magnitudes: raw.magnitudes })
    }

    pub fn sequences_for(&self, class: ClassName) -> impl Iterator<Item = &ExpectedSequence> {
        self.sequences.iter().filter(move |s| s.class == class)
    }

    pub fn magnitudes_for(&self, class: ClassName) -> impl Iterator<Item = &ExpectedMagnitude> {
        self.magnitudes.iter().filter(move |m| m.class == class)
    }
}

/// First size at which a computed series disagrees with an expected prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub n: usize,
    pub expected: String,
    pub got: String,
}

/// `series` must be truncated at degree `expected.len()` or higher.
pub fn first_divergence(expected: &[BigInt], series: &Series) -> Option<Divergence> {
    expected.iter().enumerate().find_map(|(i, e)| {
        let got = series.coeff(i + 1);
        (got != e).then(|| Divergence { n: i + 1, expected: e.to_string(), got: got.to_string() })
    })
}
