use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tractor-sim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const ONE_LAP: &str = r#"{"trajectory": {"type": "figure_eight", "ax": 20, "ay": 10, "period": 60}, "duration": 60}"#;

#[test]
fn run_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(dir.path(), "scn.json", ONE_LAP);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());

    let out = bin(&["run", "--scenario", &scn, "--mode", "pd-t2fnn", "--out", a, "--seed", "5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("lap 1:"));
    let text = std::fs::read_to_string(a).unwrap();
    assert!(text.starts_with("# schema=1 mode=pd-t2fnn"));
    assert!(text.contains("seed_gps=5"));

    assert_eq!(code(&bin(&["run", "--scenario", &scn, "--mode", "pd", "--out", b, "--seed", "5"])), 0);
    let out = bin(&["compare", "--a", a, "--b", b]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("improvement ratio"), "{stdout}");
    assert!(stdout.contains("b (pd)"));
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(dir.path(), "scn.json", ONE_LAP);
    let paths: Vec<String> = ["1.csv", "2.csv"]
        .iter()
        .map(|n| dir.path().join(n).to_str().unwrap().to_owned())
        .collect();
    for p in &paths {
        assert_eq!(code(&bin(&["run", "--scenario", &scn, "--mode", "pd", "--out", p])), 0);
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
}

#[test]
fn bad_arguments_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(dir.path(), "scn.json", ONE_LAP);
    let out = dir.path().join("o.csv");
    let out = out.to_str().unwrap();
    assert_eq!(code(&bin(&[])), 1);
    assert_eq!(code(&bin(&["fly"])), 1);
    assert_eq!(code(&bin(&["run", "--scenario", &scn, "--mode", "lqr", "--out", out])), 1);
    assert_eq!(code(&bin(&["run", "--scenario", "/no/such/file.json", "--mode", "pd", "--out", out])), 1);
    let typo = write(dir.path(), "typo.json", r#"{"durration": 60}"#);
    assert_eq!(code(&bin(&["run", "--scenario", &typo, "--mode", "pd", "--out", out])), 1);
    let junk = write(dir.path(), "junk.csv", "not a trace\n");
    assert_eq!(code(&bin(&["compare", "--a", &junk, "--b", &junk])), 1);
    assert_eq!(code(&bin(&["--help"])), 0);
}

#[test]
fn misaligned_compare_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(dir.path(), "scn.json", ONE_LAP);
    let longer = write(
        dir.path(),
        "long.json",
        r#"{"trajectory": {"type": "figure_eight", "ax": 20, "ay": 10, "period": 60}, "duration": 70}"#,
    );
    let a = dir.path().join("a.csv").to_str().unwrap().to_owned();
    let b = dir.path().join("b.csv").to_str().unwrap().to_owned();
    assert_eq!(code(&bin(&["run", "--scenario", &scn, "--mode", "pd", "--out", &a])), 0);
    assert_eq!(code(&bin(&["run", "--scenario", &longer, "--mode", "pd", "--out", &b])), 0);
    let out = bin(&["compare", "--a", &a, "--b", &b]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not time-aligned"));
}

#[test]
fn divergence_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(
        dir.path(),
        "far.json",
        r#"{"trajectory": {"type": "figure_eight", "ax": 0.5, "ay": 0.5, "period": 20}, "duration": 20, "initial": {"left": 30}}"#,
    );
    let out = dir.path().join("o.csv");
    let res = bin(&["run", "--scenario", &scn, "--mode", "pd", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 2);
    assert!(String::from_utf8_lossy(&res.stderr).contains("diverged"));
}

#[test]
fn invariants_pass_then_fail_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", ONE_LAP);
    let out = bin(&["check-invariants", "--scenario", &good]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));

    // with τc = τn + τpd the learning error is no longer the PD output
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"trajectory": {"type": "figure_eight", "ax": 20, "ay": 10, "period": 60}, "duration": 60, "coupling": "pd_plus_network"}"#,
    );
    let out = bin(&["check-invariants", "--scenario", &bad]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL learning surface"));
}
