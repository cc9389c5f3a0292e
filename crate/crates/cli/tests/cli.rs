//! End-to-end tests of the command-line interface: file round trips,
//! classification output, exit codes, and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_liftchar")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .env_remove("LIFTCHAR_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("liftchar-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const C_FILE: &str = r#"{"kind":"row_contraction","dim":1,"d":2,
  "matrices":[[[[1.0,0.0]]],[[[0.0,0.0]]]]}"#;
const A_FILE: &str = r#"{"kind":"row_contraction","dim":1,"d":2,
  "matrices":[[[[0.0,0.0]]],[[[0.0,0.0]]]]}"#;
const GAMMA_FILE: &str = r#"{"kind":"matrix","rows":1,"cols":1,"matrix":[[[1.0,0.0]]]}"#;
const BAD_TUPLE: &str = r#"{"kind":"row_contraction","dim":1,"d":2,
  "matrices":[[[[0.8,0.0]]],[[[0.8,0.0]]]]}"#;

#[test]
fn lift_charfn_equiv_pipeline() {
    let dir = workdir("pipeline");
    write(&dir, "c.json", C_FILE);
    write(&dir, "a.json", A_FILE);
    write(&dir, "gamma.json", GAMMA_FILE);

    let out = run_in(&dir, &["lift", "c.json", "a.json", "gamma.json"]);
    assert!(out.status.success(), "lift failed: {}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("coisometric: yes"));
    assert!(text.contains("subisometric: yes"));
    assert!(text.contains("reduced: yes"));
    assert!(dir.join("lifting.json").exists());

    let out = run_in(&dir, &["validate", "lifting.json"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("coisometric lifting: yes"));

    let out = run_in(&dir, &["charfn", "lifting.json", "--depth", "4"]);
    assert!(out.status.success(), "charfn failed: {}", stdout(&out));
    assert!(stdout(&out).contains("inner: yes"));
    assert!(dir.join("symbol.json").exists());

    let out = run_in(&dir, &["equiv", "symbol.json", "symbol.json"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("equivalent: yes"));

    // a genuinely deformed lifting gives an inequivalent symbol
    write(
        &dir,
        "gamma_half.json",
        r#"{"kind":"matrix","rows":1,"cols":1,"matrix":[[[0.5,0.0]]]}"#,
    );
    let out = run_in(
        &dir,
        &[
            "lift",
            "c.json",
            "a.json",
            "gamma_half.json",
            "--out",
            "lifting2.json",
        ],
    );
    assert!(out.status.success());
    let out = run_in(
        &dir,
        &[
            "charfn",
            "lifting2.json",
            "--depth",
            "4",
            "--out",
            "symbol2.json",
        ],
    );
    assert!(out.status.success());
    assert!(stdout(&out).contains("inner: no"));
    let out = run_in(&dir, &["equiv", "symbol.json", "symbol2.json"]);
    assert!(
        out.status.success(),
        "non-strict equiv reports without failing"
    );
    assert!(stdout(&out).contains("equivalent: no"));
    let out = run_in(&dir, &["--strict", "equiv", "symbol.json", "symbol2.json"]);
    assert_eq!(out.status.code(), Some(3), "strict mode flags the verdict");

    // self-composition has mismatched defect dimensions here and must fail
    let out = run_in(&dir, &["compose", "symbol.json", "symbol.json"]);
    assert!(!out.status.success(), "dimension mismatch must fail");

    // two-step pipeline: lift the assembled tuple again and compose the
    // two characteristic functions
    write(
        &dir,
        "e.json",
        r#"{"kind":"row_contraction","dim":2,"d":2,
  "matrices":[[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]],
              [[[0.0,0.0],[0.0,0.0]],[[1.0,0.0],[0.0,0.0]]]]}"#,
    );
    write(&dir, "a2.json", A_FILE);
    write(
        &dir,
        "gamma2.json",
        r#"{"kind":"matrix","rows":2,"cols":1,"matrix":[[[1.0,0.0]],[[0.0,0.0]]]}"#,
    );
    let out = run_in(
        &dir,
        &[
            "lift",
            "e.json",
            "a2.json",
            "gamma2.json",
            "--out",
            "lifting3.json",
        ],
    );
    assert!(out.status.success(), "second lift failed: {}", stdout(&out));
    let out = run_in(
        &dir,
        &[
            "charfn",
            "lifting3.json",
            "--depth",
            "4",
            "--out",
            "symbol3.json",
        ],
    );
    assert!(out.status.success(), "{}", stdout(&out));
    let out = run_in(&dir, &["compose", "symbol.json", "symbol3.json"]);
    assert!(out.status.success(), "compose failed: {}", stdout(&out));
    assert!(dir.join("composed.json").exists());
    let out = run_in(&dir, &["validate", "composed.json"]);
    assert!(out.status.success());
}

#[test]
fn validate_reports_and_exit_codes() {
    let dir = workdir("validate");
    write(&dir, "c.json", C_FILE);
    let out = run_in(&dir, &["validate", "c.json"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("row contraction: yes"));
    assert!(text.contains("coisometric: yes"));
    assert!(text.contains("D_C rank 1"));

    write(&dir, "bad.json", BAD_TUPLE);
    let out = run_in(&dir, &["validate", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("row contraction: no"));
    assert!(stdout(&out).contains("1.28"));

    write(
        &dir,
        "empty.json",
        r#"{"kind":"row_contraction","dim":1,"d":0,"matrices":[]}"#,
    );
    let out = run_in(&dir, &["validate", "empty.json"]);
    assert_eq!(out.status.code(), Some(1));

    write(&dir, "garbage.json", "{ this is not json");
    let out = run_in(&dir, &["validate", "garbage.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn fixedpoints_and_kappa() {
    let dir = workdir("kappa");
    write(&dir, "c.json", C_FILE);
    write(&dir, "a.json", A_FILE);
    write(&dir, "gamma.json", GAMMA_FILE);
    let out = run_in(&dir, &["lift", "c.json", "a.json", "gamma.json"]);
    assert!(out.status.success());

    // the lifted tuple as a Kraus family: 1-dimensional fixed-point set
    write(
        &dir,
        "kraus.json",
        r#"{"kind":"row_contraction","dim":2,"d":2,
  "matrices":[[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]],
              [[[0.0,0.0],[0.0,0.0]],[[1.0,0.0],[0.0,0.0]]]]}"#,
    );
    let out = run_in(&dir, &["fixedpoints", "kraus.json"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("fixed-point dimension: 1"));
    assert!(text.contains("ergodic: yes"));

    // kappa inverse rebuilds the identity preimage from the 1-dim corner
    write(
        &dir,
        "x.json",
        r#"{"kind":"state","dim":1,"matrix":[[[1.0,0.0]]]}"#,
    );
    let out = run_in(&dir, &["kappa", "lifting.json", "x.json", "--inverse"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let written = std::fs::read_to_string(dir.join("kappa.json")).unwrap();
    assert!(written.contains("\"dim\": 2"));

    // forward compression of the full identity
    write(
        &dir,
        "big.json",
        r#"{"kind":"state","dim":2,"matrix":[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]}"#,
    );
    let out = run_in(
        &dir,
        &["kappa", "lifting.json", "big.json", "--out", "corner.json"],
    );
    assert!(out.status.success(), "{}", stdout(&out));
    let written = std::fs::read_to_string(dir.join("corner.json")).unwrap();
    assert!(written.contains("\"dim\": 1"));
}

#[test]
fn selftest_behaviour() {
    let dir = workdir("selftest");
    let out = run_in(&dir, &["selftest", "--trials", "2", "--seed", "11"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("[PASS]"));

    // no-op pass with zero trials
    let out = run_in(&dir, &["selftest", "--trials", "0"]);
    assert!(out.status.success());

    // the injected fault must surface as a failure and a nonzero exit
    let out = run_in(
        &dir,
        &[
            "selftest",
            "--trials",
            "1",
            "--inject-fault",
            "--seed",
            "11",
        ],
    );
    assert!(!out.status.success());
    assert!(stdout(&out).contains("[FAIL] injected-fault"));

    // determinism: identical output for a fixed seed
    let a = run_in(&dir, &["selftest", "--trials", "3", "--seed", "5"]);
    let b = run_in(&dir, &["selftest", "--trials", "3", "--seed", "5"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn config_file_defaults() {
    let dir = workdir("config");
    write(&dir, "c.json", C_FILE);
    write(&dir, "a.json", A_FILE);
    write(&dir, "gamma.json", GAMMA_FILE);
    let out = run_in(&dir, &["lift", "c.json", "a.json", "gamma.json"]);
    assert!(out.status.success());

    write(&dir, "defaults.json", r#"{"fock_depth": 3}"#);
    let out = Command::new(bin())
        .args(["charfn", "lifting.json"])
        .current_dir(&dir)
        .env("LIFTCHAR_CONFIG", dir.join("defaults.json"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("depth 3"));

    write(&dir, "broken.json", r#"{"tol": -1.0}"#);
    let out = Command::new(bin())
        .args(["validate", "c.json"])
        .current_dir(&dir)
        .env("LIFTCHAR_CONFIG", dir.join("broken.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
