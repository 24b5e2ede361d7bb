use std::fs::{self, File};
use std::io::BufReader;
use std::path::Path;
use std::process::{Command, Output};

use kmer_pinv::io::{read_matrix_csv, read_matrix_json, read_matrix_market, read_system_json};
use kmer_pinv::pinv::{materialize_h, materialize_w};
use kmer_pinv::spectra::{build_incidence, build_system};
use kmer_pinv::AlphabetProfile;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kmer-pinv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn prof(b: &[u32]) -> AlphabetProfile {
    AlphabetProfile::new(b.to_vec()).unwrap()
}

fn open(p: &Path) -> BufReader<File> {
    BufReader::new(File::open(p).unwrap())
}

#[test]
fn build_writes_all_four_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["build", "--B", "3,2", "--k", "1", "--emit", "A,W,H,spectrum", "--out-dir", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let p = prof(&[3, 2]);

    let a = read_matrix_market(open(&dir.path().join("A.mtx"))).unwrap();
    assert_eq!(a, build_incidence(&p, 1).unwrap());
    let s = read_system_json(open(&dir.path().join("spectrum.json"))).unwrap();
    assert_eq!(s, build_system(&p, 1).unwrap());
    let w = read_matrix_csv(open(&dir.path().join("W.csv"))).unwrap();
    assert_eq!(w.matrix, materialize_w(&p, 1).unwrap());
    assert_eq!(w.col_labels, ["0g", "1g", "2g", "g0", "g1"]);
    let h = read_matrix_csv(open(&dir.path().join("H.csv"))).unwrap();
    assert_eq!(h.matrix, materialize_h(&p, 1).unwrap());
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn build_single_position_is_identity_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["build", "--B", "2", "--k", "1", "--emit", "A", "--out-dir", out]);
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("A.mtx")).unwrap();
    let body: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(body, ["2 2 2", "1 1", "2 2"]);
}

#[test]
fn build_json_and_float_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&[
        "build", "--B", "4,4,4", "--k", "2", "--emit", "W", "--dense-format", "json", "--out-dir", out,
        "--threads", "2",
    ]);
    assert!(o.status.success());
    let w = read_matrix_json(open(&dir.path().join("W.json"))).unwrap();
    assert_eq!((w.matrix.rows(), w.matrix.cols()), (64, 48));
    assert_eq!(w.matrix, materialize_w(&prof(&[4, 4, 4]), 2).unwrap());

    let o = run(&[
        "build", "--B", "3,2", "--k", "1", "--emit", "H", "--format", "float", "--precision", "4", "--out-dir",
        out,
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("H.csv")).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "00,0.6667,0.3333,0.1667,-0.1667,0.1667,-0.1667");
}

#[test]
fn verify_passes_and_reports_json() {
    for (b, k) in [("3,2", "1"), ("2,2,3", "2")] {
        let o = run(&["verify", "--B", b, "--k", k]);
        assert!(o.status.success(), "{b} {k}: {}", stdout(&o));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["pass"], true);
        let checks = v["checks"].as_array().unwrap();
        assert!(checks.len() >= 15);
        assert!(checks.iter().all(|c| c["pass"] == true && c["first_failure"].is_null()));
    }
}

#[test]
fn verify_detects_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = run(&[
        "verify", "--B", "3,2", "--k", "1", "--inject-corruption", "--report", report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["pass"], false);
    let failing: Vec<_> = v["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).collect();
    assert!(!failing.is_empty());
    assert!(failing[0]["first_failure"]["row"].is_u64());
}

#[test]
fn entry_prints_w_and_h_values() {
    let o = run(&["entry", "--B", "3,2", "--k", "1", "--u", "00", "--v", "g1"]);
    assert_eq!(stdout(&o).trim(), "-1/15");
    let o = run(&["entry", "--B", "3,2", "--k", "1", "--u", "00", "--w", "01"]);
    assert_eq!(stdout(&o).trim(), "1/3");
    let o = run(&["entry", "--B", "3,2", "--k", "1", "--u", "21", "--v", "g0"]);
    assert_eq!(stdout(&o).trim(), "-1/15");
}

#[test]
fn exit_codes_for_bad_input() {
    assert_eq!(run(&["entry", "--B", "3,2", "--k", "1", "--u", "00", "--v", "gg"]).status.code(), Some(2));
    assert_eq!(run(&["entry", "--B", "3,2", "--k", "1", "--u", "30", "--w", "00"]).status.code(), Some(2));
    assert_eq!(run(&["build", "--B", "3,1", "--k", "1"]).status.code(), Some(2));
    assert_eq!(run(&["build", "--B", "3,2", "--k", "3"]).status.code(), Some(2));
    assert_eq!(run(&["build", "--B", "3,2", "--k", "1", "--emit", "Q"]).status.code(), Some(2));
    assert_eq!(
        run(&["build", "--B", "20,20,20,20,20", "--k", "2", "--cap", "1000"]).status.code(),
        Some(3)
    );
    assert_eq!(run(&["verify", "--B", "4,4,4,4", "--k", "2", "--cap", "100"]).status.code(), Some(3));
}

#[test]
fn estimate_matches_projector() {
    let dir = tempfile::tempdir().unwrap();
    let seqs = dir.path().join("seqs.tsv");
    fs::write(&seqs, "one\t21\n").unwrap();
    let out = dir.path().join("est.tsv");
    let o = run(&[
        "estimate", "--B", "3,2", "--k", "1", "--sequences", seqs.to_str().unwrap(), "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let est: Vec<&str> = text.lines().skip(1).map(|l| l.split('\t').nth(2).unwrap()).collect();
    // column 21 of H = (-1, 1, -1, 1, 2, 4) / 6
    assert_eq!(est, ["-1/6", "1/6", "-1/6", "1/6", "1/3", "2/3"]);
}

#[test]
fn estimate_with_class_map_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let seqs = dir.path().join("seqs.tsv");
    let map = dir.path().join("map.json");
    fs::write(&map, r#"{"alphabet_sizes": [3, 2], "period": 2}"#).unwrap();
    fs::write(&seqs, "a\t210100\n").unwrap();
    let o = run(&[
        "estimate", "--B", "3,2", "--k", "2", "--sequences", seqs.to_str().unwrap(), "--map",
        map.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    // k = l: the estimate reproduces the counts of windows 21, 01, 00
    assert!(lines.contains(&"21\t1\t1/1".to_string()));
    assert!(lines.contains(&"01\t1\t1/1".to_string()));
    assert!(lines.contains(&"00\t1\t1/1".to_string()));

    fs::write(&seqs, "a\t2220\n").unwrap();
    let o = run(&["estimate", "--B", "3,2", "--k", "1", "--sequences", seqs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    fs::write(&map, r#"{"alphabet_sizes": [3]}"#).unwrap();
    fs::write(&seqs, "a\t2120\n").unwrap();
    let o = run(&[
        "estimate", "--B", "3,2", "--k", "1", "--sequences", seqs.to_str().unwrap(), "--map",
        map.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}
