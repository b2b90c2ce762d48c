use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/../core/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn ceres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ceres")).args(args).env_remove("CERES_GAMMA_MAX").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn check_passes_on_fixtures() {
    for name in ["running.ceres", "conj.ceres", "disj.ceres", "first_order.ceres", "chi.ceres", "clause_schemata.ceres"]
    {
        let o = ceres(&["check", &fixture(name)]);
        assert!(o.status.success(), "{name}: {}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn parse_errors_are_positioned_and_fail() {
    let path = scratch("broken.ceres", "pred P\nproof a : P |- Q {\n  l1: axiom P |- P\n}\n");
    let o = ceres(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("broken.ceres:2:"), "{err}");
}

#[test]
fn failed_verification_gives_exit_one() {
    let path = scratch("bad_rule.ceres", "pred P\npred Q\nproof a : P |- Q {\n  l1: axiom P |- Q\n}\n");
    let o = ceres(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAILED"));
}

#[test]
fn reduced_clause_set_has_three_lines() {
    let o = ceres(&["clset", &fixture("running.ceres"), "--gamma", "2", "--reduce"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "clauses cl_2 {\n  P(x(1)) |- P(f(x(1)))\n  |- P(c)\n  P(f(f(c))) |-\n}\n");
}

#[test]
fn gamma_bound_comes_from_flag_or_environment() {
    let f = fixture("running.ceres");
    assert_eq!(ceres(&["clset", &f, "--gamma", "9"]).status.code(), Some(2));
    assert!(ceres(&["clset", &f, "--gamma", "9", "--gamma-max", "9"]).status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_ceres"))
        .args(["clset", &f, "--gamma", "9"])
        .env("CERES_GAMMA_MAX", "10")
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn interchange_documents_are_versioned() {
    let o = ceres(&["--format", "interchange", "refute", &fixture("running.ceres"), "--gamma", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["format_version"], 1);
    assert_eq!(v["kind"], "deduction");
    let again = ceres(&["--format", "interchange", "refute", &fixture("running.ceres"), "--gamma", "1"]);
    assert_eq!(stdout(&o), stdout(&again));
}

#[test]
fn acnf_output_checks_again() {
    let o = ceres(&["acnf", &fixture("running.ceres"), "--gamma-range", "0..2"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert_eq!(text.matches(": verified").count(), 3);
    let path = scratch("acnf.ceres", &text);
    let o = ceres(&["check", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches(": ok").count(), 3);
}

#[test]
fn first_order_acnf_and_automatic_refutation() {
    let o = ceres(&["acnf", &fixture("first_order.ceres")]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("2 atomic cuts"));
    let o = ceres(&["refute", &fixture("running.ceres"), "--gamma", "3", "--auto"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("derives |-"));
}

#[test]
fn translation_round_trip_through_files() {
    let o = ceres(&["translate", "to-lki", &fixture("conj.ceres")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lki = scratch("conj_lki.ceres", &stdout(&o));
    let o = ceres(&["translate", "from-lki", lki.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let schema = scratch("conj_back.ceres", &stdout(&o));
    let o = ceres(&["check", schema.to_str().unwrap(), "--gamma-max", "5"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn report_lists_every_parameter_value() {
    let o = ceres(&["report", &fixture("running.ceres"), "--gamma-max", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.contains(" yes ")).count(), 5);
    assert!(text.contains("size constant C = 2.600"));
}
