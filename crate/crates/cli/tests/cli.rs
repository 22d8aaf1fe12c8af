use std::fs;
use std::process::{Command, Output};

const PI: &str = "map 1 [1; 0 | 0; 1]";
const PI_TILDE: &str = "map -1 [1; 0 | 0; -1]";
const FIXTURE: &str = include_str!("../../core/fixtures/example_u2.witness");

fn jou(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jou")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn normalize_eliminates_w() {
    let o = jou(&["normalize", "x*w + y^2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "y^2 + y*z");
}

#[test]
fn normalize_over_a_prime_field() {
    let o = jou(&["--field", "Fp=5", "normalize", "6*x + 10*y"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "x");
}

#[test]
fn ideal_membership_and_its_absence() {
    let member = jou(&["ideal", "--target", "x*y + z", "--gens", "y,z"]);
    assert_eq!(code(&member), 0);
    assert!(stdout(&member).contains("c0 = x"), "{}", stdout(&member));

    let absent = jou(&["ideal", "--target", "1", "--gens", "y,z"]);
    assert_eq!(code(&absent), 0);
    assert_eq!(stdout(&absent).trim(), "NOT-IN-IDEAL");
}

#[test]
fn ideal_with_relation_reaches_the_relation() {
    let o = jou(&["ideal", "--target", "x^2 - x + y*z", "--gens", "y", "--with-relation"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("relation = 1"), "{}", stdout(&o));
}

#[test]
fn resultant_of_the_identity_pair_is_a_unit() {
    let o = jou(&["resultant", "--pair", "1; 0 | 0; 1", "--degree", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim().trim_start_matches('-'), "1");
}

#[test]
fn oplus_of_pi_with_itself_has_degree_two() {
    let o = jou(&["oplus", PI, PI]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("map 2 "), "{}", stdout(&o));
}

#[test]
fn act_by_identity_is_trivial() {
    let o = jou(&["act", "sl2 [1; 0 | 0; 1]", PI]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), PI);
}

#[test]
fn realize_pi_and_pi_tilde() {
    let o = jou(&["realize", PI]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("degree 1\n"), "{}", stdout(&o));
    let o = jou(&["realize", PI_TILDE, "--samples", "512"]);
    assert!(stdout(&o).starts_with("degree -1\n"), "{}", stdout(&o));
}

#[test]
fn decompose_then_verify_the_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.witness");
    let o = jou(&["decompose", PI_TILDE, "--witness-out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("n = -1\n"), "{}", stdout(&o));

    let ok = jou(&["verify-homotopy", path.to_str().unwrap(), "--from", PI_TILDE, "--to", PI_TILDE]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    assert_eq!(stdout(&ok).trim(), "valid");
}

#[test]
fn verify_rejects_the_wrong_endpoint() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u2.witness");
    fs::write(&path, FIXTURE).unwrap();
    let o = jou(&["verify-homotopy", path.to_str().unwrap(), "--from", PI, "--to", PI]);
    assert_eq!(code(&o), 1);
}

#[test]
fn maps_can_be_read_from_artifact_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pi.map");
    fs::write(&path, format!("jouanolou/v1 field=Q\n{PI}\n")).unwrap();
    let o = jou(&["oplus", path.to_str().unwrap(), PI]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("map 2 "));
}

#[test]
fn k1mw_reduces_words() {
    let o = jou(&["k1mw", "--word", "[2][3]"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("0[-1] + [6]"));
    assert!(lines.next().unwrap().starts_with("row ["));
}

#[test]
fn exit_codes_separate_math_from_usage() {
    // Not unimodular: well-formed but mathematically rejected.
    assert_eq!(code(&jou(&["sum", "row [x; y]", "row [x; y]"])), 1);
    // Malformed literal.
    assert_eq!(code(&jou(&["sum", "row [x; y", "row [x; y]"])), 2);
    assert_eq!(code(&jou(&["--field", "Fp=6", "normalize", "x"])), 2);
    assert_eq!(code(&jou(&["no-such-command"])), 2);
    assert_eq!(code(&jou(&["realize", "/nonexistent/map"])), 2);
}

#[test]
fn selftest_runs_a_filtered_criterion() {
    let o = jou(&["selftest", "--filter", "3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS [ 3] example-homotopy"));
}

#[test]
fn selftest_fails_on_a_corrupted_fixture() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("example_u2.witness"), FIXTURE.replacen("1/2", "1/3", 1)).unwrap();
    let o = jou(&["selftest", "--filter", "example-homotopy", "--fixtures", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("FAIL [ 3] example-homotopy"), "{}", stdout(&o));
}

#[test]
fn selftest_with_an_unknown_filter_is_a_usage_error() {
    assert_eq!(code(&jou(&["selftest", "--filter", "no-such-criterion"])), 2);
}
