use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellswap")).args(args).output().expect("binary runs")
}

fn out_dir(dir: &Path) -> &str {
    dir.to_str().unwrap()
}

#[test]
fn manifest_rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let first = run(&["oracle-compare", "--ls", "2,4", "--states", "2", "--seed", "11", "--out", out_dir(&a)]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let manifest = a.join("oracle-compare.manifest.json");
    let text = fs::read_to_string(&manifest).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["schema_version"], "bellswap-output/1");
    assert_eq!(json["seed"], 11);
    assert_eq!(json["outputs"][0], "oracle_compare.csv");

    // the config wins over conflicting flags
    let second = run(&[
        "oracle-compare",
        "--ls",
        "6",
        "--seed",
        "3",
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        out_dir(&b),
    ]);
    assert_eq!(second.status.code(), Some(0));
    let csv = |d: &Path| fs::read(d.join("oracle_compare.csv")).unwrap();
    assert_eq!(csv(&a), csv(&b));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_dir(tmp.path());
    let ok = run(&["plucker-verify", "--matrices", "10", "--wavefunction-instances", "2", "--shape", "1x2", "--out", dir]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("PASS"));

    let fault = run(&["plucker-verify", "--matrices", "5", "--inject-sign-fault", "--out", dir]);
    assert_eq!(fault.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fault.stdout).contains("FAIL"));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("plucker-verify.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["passed"], false);

    assert_eq!(run(&["plucker-verify", "--shape", "3x2", "--out", dir]).status.code(), Some(2));
    assert_eq!(run(&["theorem-check", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(run(&["ee-sweep", "--backend", "oracle", "--ls", "10", "--out", dir]).status.code(), Some(2));
}

#[test]
fn entropy_is_printed_in_requested_units() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["ee-sweep", "--ls", "4,6", "--units", "log2", "--out", out_dir(tmp.path())]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("S(A_R) = 2.0000000000 log 2"), "{stdout}");
    assert!(stdout.contains("S(A_R) = 3.0000000000 log 2"), "{stdout}");
}
