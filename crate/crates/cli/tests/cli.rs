use std::fs;
use std::process::{Command, Output};

use qhom_core::homology::HomologyResult;
use qhom_core::VerificationReport;

fn qhomology(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhomology")).args(args).env_remove("QHOM_CACHE").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn table_row(text: &str, i: i64) -> Vec<String> {
    let line = text.lines().find(|l| l.split_whitespace().next() == Some(&i.to_string())).unwrap();
    line.split_whitespace().skip(1).map(str::to_string).collect()
}

#[test]
fn betti_table_highlights_middle_indices() {
    let out = qhomology(&["betti", "-q", "2", "-p", "7", "-n", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(table_row(&text, 1), ["0", "0", "[19]", "0", "0"]);
    assert_eq!(table_row(&text, 2), ["0", "0", "[19]", "0", "0"]);

    let text = stdout(&qhomology(&["betti", "-q", "3", "-p", "2", "-n", "2"]));
    assert_eq!(table_row(&text, 1), ["0", "[2]", "0"]);

    let text = stdout(&qhomology(&["betti", "-q", "2", "-p", "3", "-n", "3"]));
    assert_eq!(table_row(&text, 1), ["0", "0", "0", "0"]);
}

#[test]
fn engine_and_closed_form_tables_agree() {
    for args in [["-q", "2", "-p", "7", "-n", "4"], ["-q", "3", "-p", "5", "-n", "3"], ["-q", "4", "-p", "5", "-n", "3"]] {
        let closed = qhomology(&[&["betti", "--csv"], &args[..]].concat());
        let engine = qhomology(&[&["betti", "--csv", "--engine"], &args[..]].concat());
        assert!(engine.status.success());
        assert_eq!(stdout(&closed), stdout(&engine), "{args:?}");
    }
}

#[test]
fn homology_basis_and_json_round_trip() {
    let out = qhomology(&["homology", "-q", "3", "-p", "2", "-n", "2", "-k", "1", "-i", "1", "--basis", "--json"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let result: HomologyResult = serde_json::from_str(&text).unwrap();
    assert_eq!(result.betti, 2);
    assert_eq!(result.basis.as_ref().map(Vec::len), Some(2));
    assert_eq!(serde_json::to_string_pretty(&result).unwrap().trim(), text.trim());

    let out = qhomology(&["homology", "-q", "3", "-p", "2", "-n", "2", "-k", "0", "-i", "1", "--basis", "--json"]);
    assert!(out.status.success());
    let result: HomologyResult = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!((result.betti, result.is_middle, result.basis), (0, false, Some(vec![])));
}

#[test]
fn verification_commands() {
    let out = qhomology(&["verify", "all", "-q", "2", "-p", "7", "--nmax", "4"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert_eq!(stdout(&out).lines().filter(|l| l.contains(" PASS ")).count(), 11);

    let out = qhomology(&["verify", "duality", "-q", "3", "-p", "2", "--nmax", "4", "--json"]);
    assert!(out.status.success());
    let reports: Vec<VerificationReport> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(reports.len(), 1);
    assert!(reports[0].is_pass() && reports[0].passed > 0);

    let out = qhomology(&["verify", "q1-limit", "-p", "2", "--nmax", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("middle-index at i=1 k=1 n=2 p=2 q=1"));
}

#[test]
fn corrupted_cache_is_an_integrity_error() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["homology", "-q", "2", "-p", "3", "-n", "3", "-k", "2", "-i", "1", "--cache", cache];
    let first = qhomology(&args);
    assert!(first.status.success());
    let file = dir.path().join("boundary_q2_n3_k2_p3.qhm");
    let text = fs::read_to_string(&file).unwrap();
    assert!(text.starts_with("qhom-matrix v1\n2 3 2 3 7 7\n"));
    assert_eq!(stdout(&qhomology(&args)), stdout(&first));

    fs::write(&file, text.replacen("0 0 1", "0 0 2", 1)).unwrap();
    let out = qhomology(&args);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("checksum mismatch"));
}

#[test]
fn cache_flag_overrides_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let run = |extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_qhomology"))
            .args(["homology", "-q", "2", "-p", "5", "-n", "2", "-k", "1", "-i", "1"])
            .args(extra)
            .env("QHOM_CACHE", env_dir.path())
            .output()
            .unwrap()
    };
    assert!(run(&[]).status.success());
    assert!(fs::read_dir(env_dir.path()).unwrap().count() > 0);
    assert!(run(&["--cache", flag_dir.path().to_str().unwrap()]).status.success());
    assert!(fs::read_dir(flag_dir.path()).unwrap().count() > 0);
}

#[test]
fn poset_command() {
    let out = qhomology(&["poset", "--boolean", "4", "-p", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("nilpotency exponent of d over GF(3): 3"));
    assert_eq!(table_row(&text, 1), ["0", "0", "1", "0", "0"]);

    // mod 2 the Boolean lattice is exact
    let text = stdout(&qhomology(&["poset", "--boolean", "4", "-p", "2"]));
    assert_eq!(table_row(&text, 1), ["0", "0", "0", "0", "0"]);

    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("chain.txt");
    fs::write(&chain, "poset chain2\nelements 2\nrank 0 0\nrank 1 1\ncover 1 0\n").unwrap();
    let text = stdout(&qhomology(&["poset", chain.to_str().unwrap(), "-p", "3", "-m", "3"]));
    assert_eq!(table_row(&text, 1), ["1", "0"]);
    assert_eq!(table_row(&text, 2), ["0", "1"]);

    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "").unwrap();
    let out = qhomology(&["poset", empty.to_str().unwrap(), "-p", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn character_and_rank() {
    let out = qhomology(&["character", "-q", "2", "-p", "7", "-n", "3", "-k", "1", "-i", "1", "--matrix", "1,0,0;0,1,0;0,0,1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("fixed subspaces by level: 1 7 7 1"));
    assert!(text.contains("trace on H_{1,1} mod 7: 5"));

    let out = qhomology(&["rank", "-q", "2", "-p", "3", "-n", "4", "-k", "2", "-i", "1", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["incidence_rank"], 14);
    assert_eq!(v["source_size"], 35);
}

#[test]
fn exit_codes_for_bad_input() {
    assert_eq!(qhomology(&["betti", "-q", "4", "-p", "2", "-n", "3"]).status.code(), Some(3));
    assert_eq!(qhomology(&["betti", "-q", "2", "-p", "4", "-n", "3"]).status.code(), Some(3));
    assert_eq!(qhomology(&["betti", "-q", "2", "-p", "3"]).status.code(), Some(3));
    assert_eq!(qhomology(&["verify", "nonsense"]).status.code(), Some(3));
    assert_eq!(qhomology(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(qhomology(&["betti", "-q", "2", "-p", "3", "-n", "12", "--cap", "100"]).status.code(), Some(3));
    assert_eq!(qhomology(&["--help"]).status.code(), Some(0));
    let out = qhomology(&["character", "-q", "2", "-p", "3", "-n", "2", "-k", "1", "-i", "1", "--matrix", "1,1;1,1"]);
    assert_eq!(out.status.code(), Some(3));
}
