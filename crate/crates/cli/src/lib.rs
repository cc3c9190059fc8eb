//! Command-line front end: sequence export, fixture verification, the
//! large-size magnitude table and tree generation.
//!
//! Exit codes are a stable contract: [`EXIT_SUCCESS`], [`EXIT_FAILURE`] for
//! failed verification (and internal errors), [`EXIT_USAGE`] for bad
//! arguments.

pub mod fixtures;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use splitenum::classes::{enumerate_class, list_classes, ClassName, Variant};
use splitenum::glt::{check_lemma_suite, generate_trees, LemmaReport, TreeJson, TreePolicy};
use splitenum::oracle::{cross_check, CrossCheckReport, MAX_ORACLE_VERTICES};

use fixtures::{first_divergence, Divergence, Fixtures};
use output::{write_sequence, Format, Scientific};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Name of the environment variable that sets the worker count.
pub const THREADS_ENV: &str = "SPLITENUM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "splitenum", version, about = "Exact enumeration of split-decomposable graph classes")]
pub struct Cli {
    /// Worker threads for parallel oracle counting (default: all cores).
    #[arg(long, global = true, env = THREADS_ENV, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the first terms of a counting sequence.
    Enumerate {
        #[arg(long, value_parser = parse_class)]
        class: ClassName,
        #[arg(long, value_parser = parse_variant)]
        variant: Variant,
        #[arg(long)]
        terms: usize,
        #[arg(long, value_enum, default_value_t = Format::Bfile)]
        format: Format,
    },
    /// Check a class against the bundled fixtures and the brute-force oracle.
    Verify {
        #[arg(long, value_parser = parse_class)]
        class: ClassName,
        /// Largest size for the oracle cross-check (capped at 7; 0 skips it).
        #[arg(long, default_value_t = MAX_ORACLE_VERTICES)]
        n_max: usize,
        /// Alternative fixture file.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Unlabeled unrooted counts of every class at one size.
    Magnitude {
        #[arg(long, default_value_t = 73, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Generate the reduced clique-star trees of a class.
    Trees {
        /// A class name, or `distance_hereditary` for every reduced tree.
        #[arg(long, value_parser = parse_policy)]
        class: TreePolicy,
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..=8))]
        leaves: u64,
        #[arg(long, value_enum, default_value_t = Emit::Count)]
        emit: Emit,
        /// Also run the forbidden-pattern and alternated-path checks on
        /// every reduced tree with this many leaves.
        #[arg(long)]
        check_lemmas: bool,
    },
    /// List the bundled classes.
    Classes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Json,
    Count,
}

fn parse_class(s: &str) -> Result<ClassName, String> {
    s.parse().map_err(|e: splitenum::classes::ClassError| e.to_string())
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: splitenum::classes::ClassError| e.to_string())
}

fn parse_policy(s: &str) -> Result<TreePolicy, String> {
    s.parse().map_err(|e| format!("{e}; expected one of {}", TreePolicy::ALL.map(|p| p.as_str()).join(", ")))
}

/// Reasons a command stops early. Each maps to one exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Check(String),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Internal(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.into())
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
                return EXIT_USAGE;
            }
            let _ = out.write_all(rendered.as_bytes());
            return EXIT_SUCCESS;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        builder = builder.num_threads(t.into());
    }
    let result = match builder.build() {
        Ok(pool) => pool.install(|| execute(cli.command, out)),
        Err(e) => Err(Failure::Internal(e.into())),
    };
    let _ = out.flush();
    match result {
        Ok(()) => EXIT_SUCCESS,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Check(msg)) => {
            let _ = writeln!(err, "verification failed: {msg}");
            EXIT_FAILURE
        }
        Err(Failure::Internal(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_FAILURE
        }
    }
}

fn execute(command: Command, out: &mut (dyn Write + Send)) -> Result<(), Failure> {
    match command {
        Command::Enumerate { class, variant, terms, format } => {
            let series = enumerate_class(class, variant, terms).context("enumeration failed")?;
            write_sequence(out, class, variant, &series, terms, format)?;
            Ok(())
        }
        Command::Verify { class, n_max, fixtures, format } => {
            let fixtures = match fixtures {
                None => Fixtures::bundled(),
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
                    Fixtures::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
                }
            };
            let report = verify(class, n_max, &fixtures)?;
            match format {
                ReportFormat::Text => write!(out, "{report}")?,
                ReportFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report).context("report")?)?,
            }
            match report.first_failure() {
                Some(msg) => Err(Failure::Check(msg)),
                None => Ok(()),
            }
        }
        Command::Magnitude { n } => {
            let rows = magnitudes(n as usize)?;
            let width = rows.iter().map(|r| r.exact.len()).max().unwrap_or(0);
            for r in rows {
                writeln!(out, "{:<10} {:>4}  {:<14} {:>width$}", r.class, r.n, r.approx.to_string(), r.exact)?;
            }
            Ok(())
        }
        Command::Trees { class, leaves, emit, check_lemmas } => {
            let leaves = leaves as usize;
            let trees = generate_trees(leaves, class).map_err(|e| Failure::Usage(e.to_string()))?;
            let lemmas = check_lemmas.then(|| check_lemma_suite(leaves)).transpose().context("lemma suite")?;
            match emit {
                Emit::Count => {
                    writeln!(out, "{}", trees.len())?;
                    if let Some(r) = &lemmas {
                        writeln!(
                            out,
                            "lemmas: {} trees with {} leaves, {} failures",
                            r.trees,
                            r.leaves,
                            r.failures.len()
                        )?;
                        for f in &r.failures {
                            writeln!(out, "  {f}")?;
                        }
                    }
                }
                Emit::Json => {
                    let doc = TreesJson {
                        class,
                        leaves,
                        count: trees.len(),
                        trees: trees.iter().map(|t| t.to_json_value()).collect(),
                        lemmas: lemmas.clone(),
                    };
                    writeln!(out, "{}", serde_json::to_string_pretty(&doc).context("trees")?)?;
                }
            }
            match lemmas {
                Some(r) if !r.failures.is_empty() => {
                    Err(Failure::Check(format!("{} lemma counterexamples, first: {}", r.failures.len(), r.failures[0])))
                }
                _ => Ok(()),
            }
        }
        Command::Classes => {
            for c in list_classes() {
                let oeis: Vec<_> = c.oeis.iter().map(|(v, id)| format!("{v}={id}")).collect();
                writeln!(
                    out,
                    "{:<10} {:<28} rules {}+{}  size {:>3}  {}",
                    c.name.as_str(),
                    c.title,
                    c.rooted_rules,
                    c.unrooted_rules,
                    c.grammar_size,
                    oeis.join(" ")
                )?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct TreesJson {
    class: TreePolicy,
    leaves: usize,
    count: usize,
    trees: Vec<TreeJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lemmas: Option<LemmaReport>,
}

/// One row of the magnitude table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MagnitudeRow {
    pub class: ClassName,
    pub n: usize,
    pub exact: String,
    pub approx: Scientific,
}

/// Unlabeled unrooted counts of every class at size `n`.
pub fn magnitudes(n: usize) -> anyhow::Result<Vec<MagnitudeRow>> {
    ClassName::ALL
        .into_iter()
        .map(|class| {
            let s = enumerate_class(class, Variant::UnlabeledUnrooted, n)?;
            let x = s.coeff(n);
            Ok(MagnitudeRow { class, n, exact: x.to_string(), approx: Scientific::new(x) })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceCheck {
    pub variant: Variant,
    pub source: String,
    pub terms: usize,
    /// Computed values, as decimal strings.
    pub values: Vec<String>,
    pub divergence: Option<Divergence>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MagnitudeCheck {
    pub n: usize,
    pub source: String,
    pub expected: String,
    pub got: String,
    pub pass: bool,
}

/// Everything `verify` compared for one class.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub class: ClassName,
    pub sequences: Vec<SequenceCheck>,
    /// Variants with no fixture; each is a failure.
    pub missing: Vec<Variant>,
    pub magnitudes: Vec<MagnitudeCheck>,
    pub cross_check: Option<CrossCheckReport>,
    pub pass: bool,
}

impl VerifyReport {
    /// Diagnostic for the first failed comparison, in report order.
    pub fn first_failure(&self) -> Option<String> {
        let class = self.class;
        if let Some(v) = self.missing.first() {
            return Some(format!("{class} {v}: no fixture"));
        }
        if let Some((s, d)) = self.sequences.iter().find_map(|s| s.divergence.as_ref().map(|d| (s, d))) {
            return Some(format!(
                "{class} {}: first divergence at n = {}: expected {}, got {}",
                s.variant, d.n, d.expected, d.got
            ));
        }
        if let Some(m) = self.magnitudes.iter().find(|m| !m.pass) {
            return Some(format!("{class} magnitude at n = {}: expected {}, got {}", m.n, m.expected, m.got));
        }
        let row = self.cross_check.as_ref()?.rows.iter().find(|r| !r.pass)?;
        Some(format!(
            "{class} oracle cross-check at n = {}: oracle {}/{} labeled/unlabeled, grammar {}/{}{}",
            row.n,
            row.oracle_labeled,
            row.oracle_unlabeled,
            row.grammar_labeled.map_or("-".into(), |v| v.to_string()),
            row.grammar_unlabeled.map_or("-".into(), |v| v.to_string()),
            row.error.as_ref().map_or(String::new(), |e| format!(" ({e})")),
        ))
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
        for s in &self.sequences {
            write!(
                f,
                "{} {} {:<18} {:>3} terms [{}]",
                verdict(s.divergence.is_none()),
                self.class,
                s.variant,
                s.terms,
                s.source
            )?;
            match &s.divergence {
                None => writeln!(f, ": {}", s.values.join(", "))?,
                Some(d) => writeln!(f, ": n = {} expected {} got {}", d.n, d.expected, d.got)?,
            }
        }
        for v in &self.missing {
            writeln!(f, "FAIL {} {v}: no fixture", self.class)?;
        }
        for m in &self.magnitudes {
            writeln!(
                f,
                "{} {} magnitude n = {}: expected {} got {} [{}]",
                verdict(m.pass),
                self.class,
                m.n,
                m.expected,
                m.got,
                m.source
            )?;
        }
        if let Some(c) = &self.cross_check {
            write!(f, "{c}")?;
        }
        writeln!(f, "{} {}", verdict(self.pass), self.class)
    }
}

/// Compares all four variants of `class` with the fixtures, checks any
/// magnitude fixtures, and cross-checks against the oracle up to
/// `min(n_max, 7)`.
pub fn verify(class: ClassName, n_max: usize, fixtures: &Fixtures) -> anyhow::Result<VerifyReport> {
    let mut sequences = Vec::new();
    let mut missing = Vec::new();
    for variant in Variant::ALL {
        let expected: Vec<_> = fixtures.sequences_for(class).filter(|s| s.variant == variant).collect();
        if expected.is_empty() {
            missing.push(variant);
        }
        for e in expected {
            let series = enumerate_class(class, variant, e.values.len())?;
            sequences.push(SequenceCheck {
                variant,
                source: e.source.clone(),
                terms: e.values.len(),
                values: (1..=e.values.len()).map(|n| series.coeff(n).to_string()).collect(),
                divergence: first_divergence(&e.values, &series),
            });
        }
    }
    let mut magnitudes = Vec::new();
    for m in fixtures.magnitudes_for(class) {
        let s = enumerate_class(class, m.variant, m.n)?;
        let got = Scientific::new(s.coeff(m.n));
        magnitudes.push(MagnitudeCheck {
            n: m.n,
            source: m.source.clone(),
            expected: m.rendered(),
            pass: m.matches(&got),
            got: got.to_string(),
        });
    }
    let cross_check = match n_max.min(MAX_ORACLE_VERTICES) {
        0 => None,
        k => Some(cross_check(class.definition(), k)?),
    };
    let pass = missing.is_empty()
        && sequences.iter().all(|s| s.divergence.is_none())
        && magnitudes.iter().all(|m| m.pass)
        && cross_check.as_ref().is_none_or(|c| c.pass());
    Ok(VerifyReport { class, sequences, missing, magnitudes, cross_check, pass })
}
