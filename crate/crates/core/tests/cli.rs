use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use varmap::corpus::Corpus;

fn varmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_varmap")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = varmap(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for e in fs::read_dir(from).unwrap() {
        let e = e.unwrap();
        if e.file_type().unwrap().is_dir() {
            copy_dir(&e.path(), &to.join(e.file_name()));
        } else {
            fs::copy(e.path(), to.join(e.file_name())).unwrap();
        }
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn unknown_flag_fails_with_usage_error() {
    let out = varmap(&["gen", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");
}

#[test]
fn missing_input_is_reported_as_json() {
    let out = varmap(&["map", "--buggy", "/nonexistent/a.c", "--correct", "/nonexistent/b.c", "--model", "/nonexistent/m"]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"]["message"].as_str().unwrap().contains("/nonexistent"));
}

#[test]
fn pipeline_runs_and_repeats_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    for id in ["ipa01", "ipa05"] {
        copy_dir(&Corpus::bundled_dir().join(id), &corpus.join(id));
    }
    let (d1, d2) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    for d in [&d1, &d2] {
        ok(&["gen", "--corpus", s(&corpus), "--out", s(d), "--seed", "3"]);
    }
    assert_eq!(fs::read(&d1).unwrap(), fs::read(&d2).unwrap());
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(format!("{}.manifest.json", s(&d1))).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 3);

    let (m1, m2) = (dir.path().join("a.ckpt"), dir.path().join("b.ckpt"));
    for m in [&m1, &m2] {
        ok(&["train", "--data", s(&d1), "--out", s(m), "--epochs", "2", "--hidden", "8", "--max-pairs", "60"]);
    }
    assert_eq!(fs::read(&m1).unwrap(), fs::read(&m2).unwrap());

    let (r1, r2) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for r in [&r1, &r2] {
        ok(&["eval-map", "--data", s(&d1), "--model", s(&m1), "--out", s(r), "--threads", "2"]);
    }
    assert_eq!(fs::read(&r1).unwrap(), fs::read(&r2).unwrap());
    let report: serde_json::Value = serde_json::from_slice(&fs::read(&r1).unwrap()).unwrap();
    assert!(report["overall"]["pairs"].as_u64().unwrap() > 0);

    let correct = Corpus::bundled_dir().join("ipa05/train/v1.c");
    let buggy = dir.path().join("buggy.c");
    fs::write(&buggy, fs::read_to_string(&correct).unwrap().replace("i <= n", "i < n")).unwrap();
    let mapped: serde_json::Value = serde_json::from_str(&ok(&["map", "--buggy", s(&buggy), "--correct", s(&correct), "--model", s(&m1)])).unwrap();
    assert_eq!(mapped["mapping"].as_object().unwrap().len(), 2);
    let row = mapped["probabilities"]["n"].as_object().unwrap();
    assert!((row.values().map(|v| v.as_f64().unwrap()).sum::<f64>() - 1.0).abs() < 1e-9);

    let suite = Corpus::bundled_dir().join("ipa05/suite");
    let fixed = dir.path().join("fixed.c");
    let debug = dir.path().join("debug");
    let outcome: serde_json::Value = serde_json::from_str(&ok(&[
        "repair", "--buggy", s(&buggy), "--correct", s(&correct), "--suite", s(&suite), "--method", "uniform",
        "--out", s(&fixed), "--debug-dir", s(&debug), "--budget", "30",
    ]))
    .unwrap();
    assert_eq!(outcome["status"], "fixed");
    assert!(fs::read_to_string(&fixed).unwrap().contains("i <= n"));
    assert!(fs::read_dir(&debug).unwrap().count() >= 1);
}
