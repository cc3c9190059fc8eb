//! Sequence export formats and scientific rendering.

use std::fmt;
use std::io::{self, Write};

use clap::ValueEnum;
use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;
use splitenum::classes::{ClassName, Variant};
use splitenum::series::Series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// `n,value` rows under a header.
    Csv,
    /// One object with the values as decimal strings.
    Json,
    /// `n a(n)` lines, no header.
    Bfile,
}

#[derive(Serialize)]
struct JsonSequence {
    class: ClassName,
    variant: Variant,
    offset: usize,
    values: Vec<String>,
}

/// Writes `a(1), ..., a(terms)` from `series`, which must be truncated at
/// degree `terms` or higher. Nothing is written when `terms == 0`.
pub fn write_sequence(
    out: &mut dyn Write,
    class: ClassName,
    variant: Variant,
    series: &Series,
    terms: usize,
    format: Format,
) -> io::Result<()> {
    if terms == 0 {
        return Ok(());
    }
    let values = (1..=terms).map(|n| (n, series.coeff(n)));
    match format {
        Format::Bfile => {
            for (n, a) in values {
                writeln!(out, "{n} {a}")?;
            }
        }
        Format::Csv => {
            writeln!(out, "n,value")?;
            for (n, a) in values {
                writeln!(out, "{n},{a}")?;
            }
        }
        Format::Json => {
            let doc = JsonSequence { class, variant, offset: 1, values: values.map(|(_, a)| a.to_string()).collect() };
            serde_json::to_writer(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Parses b-file text: `n a(n)` per line; blank lines and `#` comments are
/// skipped.
pub fn parse_bfile(text: &str) -> Result<Vec<(usize, BigInt)>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            let mut parts = l.split_whitespace();
            let (Some(n), Some(a), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(format!("line {}: expected two fields", i + 1));
            };
            let n = n.parse().map_err(|e| format!("line {}: index {n:?}: {e}", i + 1))?;
            let a = a.parse().map_err(|e| format!("line {}: value {a:?}: {e}", i + 1))?;
            Ok((n, a))
        })
        .collect()
}

/// A non-negative integer rounded half-even to three significant digits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Scientific {
    /// `d.dd`
    pub mantissa: String,
    pub exponent: u32,
}

impl Scientific {
    /// Panics on negative input; counts are never negative.
    pub fn new(x: &BigInt) -> Self {
        assert!(!x.is_negative(), "scientific rendering of a negative count");
        let digits = x.to_string();
        let exponent = digits.len() as u32 - 1;
        if digits.len() <= 3 {
            let padded = format!("{digits:0<3}");
            return Scientific { mantissa: format!("{}.{}", &padded[..1], &padded[1..]), exponent };
        }
        let (head, tail) = digits.split_at(3);
        let mut kept: u32 = head.parse().expect("three decimal digits");
        let first = tail.as_bytes()[0];
        let rest_zero = tail.bytes().skip(1).all(|b| b == b'0');
        let round_up = first > b'5' || (first == b'5' && (!rest_zero || kept % 2 == 1));
        let mut exponent = exponent;
        if round_up {
            kept += 1;
            if kept == 1000 {
                kept = 100;
                exponent += 1;
            }
        }
        let kept = kept.to_string();
        Scientific { mantissa: format!("{}.{}", &kept[..1], &kept[1..]), exponent }
    }
}

impl fmt::Display for Scientific {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}×10^{}", self.mantissa, self.exponent)
    }
}
