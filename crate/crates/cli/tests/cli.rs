use std::process::Command;

use dilates::{IntSet, Verdict};
use dilates_cli::{dispatch, ApReport, CheckReport, ProbeReport, SearchReport, SumReport};

fn run(args: &str) -> dilates_cli::Outcome {
    dispatch(std::iter::once("dilates").chain(args.split_whitespace()))
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(Result::unwrap).collect()
}

#[test]
fn sum_example() {
    let out = run("sum --set 0,1,3 --coeffs 2,3 --json");
    assert_eq!(out.code, 0, "{}", out.stderr);
    let report: SumReport = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report.command, "sum");
    assert_eq!(report.results.size, 8);
    assert_eq!(report.results.elements, vec![0, 2, 3, 5, 6, 9, 11, 15]);
}

#[test]
fn check_example_exits_zero() {
    let out = run("check --set 0,1,2 --k 3 --json");
    assert_eq!(out.code, 0, "{}", out.stderr);
    let report: CheckReport = serde_json::from_str(&out.stdout).unwrap();
    assert!(!report.results.normalized);
    assert!(report.results.reports.iter().all(|r| r.verdict != Verdict::Fails));
    assert!(report.results.reports.iter().any(|r| r.verdict == Verdict::Holds));
}

#[test]
fn check_normalizes_and_reports_map() {
    let out = run("check --set 5,7,11 --k 3 --json");
    assert_eq!(out.code, 0, "{}", out.stderr);
    let report: CheckReport = serde_json::from_str(&out.stdout).unwrap();
    assert!(report.results.normalized);
    assert_eq!(report.results.canonical_set, IntSet::new(vec![0, 1, 3]).unwrap());
    let back = report.results.affine_map.invert(&report.results.canonical_set).unwrap();
    assert_eq!(back.into_vec(), vec![5, 7, 11]);
}

#[test]
fn search_example() {
    let out = run("search --coeffs 2,3 --n 3 --range 12 --json");
    assert_eq!(out.code, 0, "{}", out.stderr);
    let report: SearchReport = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report.results.minimum, 8);
    assert!(report.results.witnesses.contains(&IntSet::new(vec![0, 1, 3]).unwrap()));
}

#[test]
fn ap_mismatch_exits_one() {
    let out = run("ap --n 3 --k 5 --json");
    assert_eq!(out.code, 1);
    let report: ApReport = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report.results.value, 11);
    assert_eq!(report.results.report.lhs, 9);
    assert_eq!(report.results.report.verdict, Verdict::Fails);

    assert_eq!(run("ap --n 10 --k 3").code, 0);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        "",
        "sum --set 0,1",
        "sum --set 0,1,1 --coeffs 2,3",
        "sum --set 0,x --coeffs 2,3",
        "check --set 0,1,2 --k 4",
        "search --coeffs 2,4 --n 3 --range 5",
        "search --coeffs 2,3 --n 5 --range 2",
        "sum --set 0,1 --coeffs 2,3 --json --csv",
    ] {
        let out = run(args);
        assert_eq!(out.code, 2, "`{args}` gave {} / {}", out.code, out.stderr);
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(run("--help").code, 0);
}

#[test]
fn overflow_exits_three() {
    let out = run("sum --set 0,4611686018427387904 --coeffs 2,3");
    assert_eq!(out.code, 3, "{}", out.stderr);
    let out = run("sum --set -4611686018427387905,0 --coeffs 2,3");
    assert_eq!(out.code, 3, "{}", out.stderr);
}

#[test]
fn negative_values_parse() {
    let out = run("sum --set -3,0,2 --coeffs -1,2 --json");
    assert_eq!(out.code, 0, "{}", out.stderr);
    let report: SumReport = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report.params.set, vec![-3, 0, 2]);
}

#[test]
fn json_payload_has_only_envelope_keys() {
    for args in [
        "sum --set 0,1,3 --coeffs 2,3 --json",
        "check --set 0,1,2 --k 3 --json",
        "search --coeffs 2,3 --n 3 --range 8 --json",
        "probe --coeffs 2,3 --n-from 2 --n-to 3 --range 8 --json",
        "ap --n 5 --k 3 --json",
    ] {
        let value: serde_json::Value = serde_json::from_str(&run(args).stdout).unwrap();
        let keys: Vec<&str> = value.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 3, "{args}: {keys:?}");
        for k in ["command", "params", "results"] {
            assert!(keys.contains(&k), "{args}: {keys:?}");
        }
    }
}

#[test]
fn check_csv_matches_json() {
    let json: CheckReport = serde_json::from_str(&run("check --set 0,2,3,7 --k 5 --json").stdout).unwrap();
    let rows = csv_rows(&run("check --set 0,2,3,7 --k 5 --csv").stdout);
    assert_eq!(rows.len(), json.results.reports.len());
    for (row, r) in rows.iter().zip(&json.results.reports) {
        assert_eq!(&row[0], r.statement_id.as_str());
        assert_eq!(row[2].parse::<i64>().unwrap(), r.lhs);
        assert_eq!(row[3].parse::<i64>().unwrap(), r.rhs);
        assert_eq!(row[4].parse::<i64>().unwrap(), r.slack);
        assert_eq!(&row[5], r.verdict.as_str());
    }
}

#[test]
fn probe_csv_matches_json() {
    let args = "probe --coeffs 2,3 --n-from 2 --n-to 4 --range 12";
    let json: ProbeReport = serde_json::from_str(&run(&format!("{args} --json")).stdout).unwrap();
    let rows = csv_rows(&run(&format!("{args} --csv")).stdout);
    assert_eq!(rows.len(), 3);
    for (row, r) in rows.iter().zip(&json.results) {
        assert_eq!(row[0].parse::<usize>().unwrap(), r.n);
        assert_eq!(row[1].parse::<usize>().unwrap(), r.minimum);
        assert_eq!(row[2].parse::<i64>().unwrap(), r.deficiency);
    }
    let table: Vec<(usize, usize, i64)> = json.results.iter().map(|r| (r.n, r.minimum, r.deficiency)).collect();
    assert_eq!(&table[..2], &[(2, 4, 6), (3, 8, 7)]);
}

#[test]
fn thread_count_does_not_change_search_payload() {
    let one = run("search --coeffs 2,3 --n 4 --range 12 --json --threads 1");
    let four = run("search --coeffs 2,3 --n 4 --range 12 --json --threads 4");
    let one: serde_json::Value = serde_json::from_str(&one.stdout).unwrap();
    let four: serde_json::Value = serde_json::from_str(&four.stdout).unwrap();
    assert_eq!(one["results"], four["results"]);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_dilates");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&["sum", "--set", "0,1,3", "--coeffs", "2,3"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains('8'));
    assert_eq!(status(&["ap", "--n", "3", "--k", "5"]).status.code(), Some(1));
    assert_eq!(status(&["sum", "--set", "0,0", "--coeffs", "2"]).status.code(), Some(2));
    assert_eq!(
        status(&["sum", "--set", "0,4611686018427387904", "--coeffs", "2,3"]).status.code(),
        Some(3)
    );
}
