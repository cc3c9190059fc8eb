//! Runs the built binary and checks its output and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

use num_bigint::BigInt;
use splitenum::classes::{enumerate_class, ClassName, Variant};
use splitenum::glt::{GraphLabeledTree, TreeJson};
use splitenum_cli::fixtures::BUNDLED;
use splitenum_cli::output::parse_bfile;

fn splitenum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splitenum"))
        .args(args)
        .env_remove("SPLITENUM_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn values(o: &Output) -> Vec<String> {
    stdout(o).lines().map(|l| l.split(' ').nth(1).unwrap().to_string()).collect()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("splitenum-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn enumerate_block_unlabeled_unrooted() {
    let o = splitenum(&["enumerate", "--class", "block", "--variant", "unlabeled-unrooted", "--terms", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(values(&o), ["1", "1", "2", "4", "9", "22", "59", "165"]);
    assert!(stdout(&o).starts_with("1 1\n2 1\n"));
}

#[test]
fn enumerate_cactus4_keeps_zero_terms() {
    let o = splitenum(&["enumerate", "--class", "cactus4", "--variant", "unlabeled-unrooted", "--terms", "13"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(values(&o), ["0", "0", "0", "1", "0", "0", "1", "0", "0", "3", "0", "0", "7"]);
}

#[test]
fn enumerate_zero_terms_is_empty() {
    for format in ["bfile", "csv", "json"] {
        let o = splitenum(&[
            "enumerate",
            "--class",
            "block",
            "--variant",
            "labeled-rooted",
            "--terms",
            "0",
            "--format",
            format,
        ]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty(), "{format}");
    }
}

#[test]
fn enumerate_bfile_round_trips() {
    for (class, variant) in
        [(ClassName::Ptolemaic, Variant::LabeledRooted), (ClassName::Cactus3, Variant::UnlabeledUnrooted)]
    {
        let o = splitenum(&["enumerate", "--class", class.as_str(), "--variant", variant.as_str(), "--terms", "60"]);
        let parsed = parse_bfile(&stdout(&o)).unwrap();
        let series = enumerate_class(class, variant, 60).unwrap();
        let expected: Vec<(usize, BigInt)> = (1..=60).map(|n| (n, series.coeff(n).clone())).collect();
        assert_eq!(parsed, expected);
    }
}

#[test]
fn enumerate_json_and_csv() {
    let o = splitenum(&[
        "enumerate",
        "--class",
        "cactus23",
        "--variant",
        "labeled-unrooted",
        "--terms",
        "5",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["values"], serde_json::json!(["1", "1", "4", "28", "290"]));
    assert_eq!(v["offset"], 1);
    let o = splitenum(&[
        "enumerate",
        "--class",
        "cactus23",
        "--variant",
        "labeled-unrooted",
        "--terms",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(stdout(&o), "n,value\n1,1\n2,1\n");
}

#[test]
fn unknown_names_are_usage_errors() {
    let o = splitenum(&["enumerate", "--class", "cactus5", "--variant", "labeled-rooted", "--terms", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown class"));
    let o = splitenum(&["enumerate", "--class", "block", "--variant", "rooted", "--terms", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = splitenum(&["enumerate", "--class", "block", "--variant", "labeled-rooted"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_ptolemaic_passes() {
    let o = splitenum(&["verify", "--class", "ptolemaic"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("pass ptolemaic labeled-rooted"));
    assert!(out.contains(": 1, 2, 12, 140, 2405, 54252, "));
    assert!(out.lines().last().unwrap() == "pass ptolemaic");
}

#[test]
fn verify_cactus3_passes_with_parity_zeros() {
    let o = splitenum(&["verify", "--class", "cactus3", "--n-max", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains(": 0, 0, 1, 0, 2, 0, 5, 0, 13"));
}

#[test]
fn verify_corrupted_fixture_exits_one() {
    let corrupted = BUNDLED.replacen("\"1555\"", "\"1556\"", 1);
    assert_ne!(corrupted, BUNDLED);
    let path = temp_file("corrupted.json", &corrupted);
    let o = splitenum(&["verify", "--class", "block", "--n-max", "0", "--fixtures", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("block labeled-rooted: first divergence at n = 5: expected 1556, got 1555"),
        "{}",
        stderr(&o)
    );
    assert!(stdout(&o).contains("FAIL block labeled-rooted"));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn verify_unreadable_fixture_is_usage_error() {
    let path = temp_file("broken.json", "{ not json");
    let o = splitenum(&["verify", "--class", "block", "--fixtures", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_file(path).unwrap();
    let o = splitenum(&["verify", "--class", "block", "--fixtures", "/nonexistent/fixtures.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_json_report() {
    let o = splitenum(&["verify", "--class", "cactus4", "--n-max", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["sequences"].as_array().unwrap().len(), 4);
    assert_eq!(v["cross_check"]["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn magnitude_table() {
    let o = splitenum(&["magnitude", "--n", "73"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for (class, approx) in [
        ("ptolemaic", "3.78×10^50"),
        ("block", "1.44×10^40"),
        ("cactus23", "1.55×10^38"),
        ("cactus3", "9.13×10^16"),
        ("cactus4", "5.73×10^14"),
    ] {
        let line = out.lines().find(|l| l.starts_with(class) && l[class.len()..].starts_with(' ')).unwrap();
        assert!(line.contains(approx), "{line}");
    }
}

#[test]
fn trees_counts() {
    for (class, leaves, count) in [("block", "4", "4"), ("cactus3", "5", "1"), ("ptolemaic", "6", "47")] {
        let o = splitenum(&["trees", "--class", class, "--leaves", leaves, "--emit", "count"]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).trim(), count);
    }
}

#[test]
fn trees_out_of_range_is_usage_error() {
    for leaves in ["2", "9"] {
        let o = splitenum(&["trees", "--class", "block", "--leaves", leaves]);
        assert_eq!(o.status.code(), Some(2));
    }
}

#[test]
fn trees_json_parses_back() {
    let o = splitenum(&["trees", "--class", "cactus23", "--leaves", "5", "--emit", "json", "--check-lemmas"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["count"], 7);
    assert_eq!(v["lemmas"]["failures"].as_array().unwrap().len(), 0);
    let trees: Vec<TreeJson> = serde_json::from_value(v["trees"].clone()).unwrap();
    assert_eq!(trees.len(), 7);
    for t in &trees {
        let tree = GraphLabeledTree::from_json_value(t).unwrap();
        assert!(tree.is_reduced());
        assert_eq!(tree.leaf_count(), 5);
    }
}

#[test]
fn trees_lemma_check_reports() {
    let o = splitenum(&["trees", "--class", "distance_hereditary", "--leaves", "5", "--check-lemmas"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 failures"));
}

#[test]
fn thread_count_from_environment() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_splitenum"))
            .args(["verify", "--class", "block", "--n-max", "5"])
            .env("SPLITENUM_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, run("3").stdout);
    assert_eq!(run("0").status.code(), Some(2));
    assert_eq!(run("many").status.code(), Some(2));
}

#[test]
fn classes_lists_all() {
    let o = splitenum(&["classes"]);
    let out = stdout(&o);
    for c in ClassName::ALL {
        assert!(out.lines().any(|l| l.starts_with(c.as_str())), "{c}");
    }
    assert!(out.contains("A035053"));
}
