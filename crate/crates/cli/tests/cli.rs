use std::process::{Command, Output};

const K1: &str = "1 -2 1 -2 -3 2 3 3 3";

fn tdga(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdga")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn unknot_dga() {
    let o = tdga(&["dga", "", "--strands", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "∂⁻c = U + λ + λμV + μ\n∂⁻e = 0\n");
    let o = tdga(&["specialize", "", "--strands", "1", "--spec", "doublehat"]);
    assert_eq!(stdout(&o), "∂̂̂c = λ + μ\n∂̂̂e = 0\n");
}

#[test]
fn k1_hat_count() {
    let o = tdga(&["aug", K1, "--spec", "hat", "--p", "3", "--lambda", "1", "--mu", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "5");
    let o = tdga(&["aug", K1, "--p", "3", "--lambda", "-1", "--mu", "1"]);
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn aug_json_and_table() {
    let o = tdga(&["aug", "-1", "--spec", "infinity", "--p", "3", "--lambda", "-1", "--mu", "1", "--U", "1", "--V", "-1", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["specialization"], "infinity");
    assert_eq!(v["assignments"]["V"], -1);
    assert!(v["count"].is_u64());
    let o = tdga(&["aug", "1", "--p", "3", "--all-units"]);
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn self_linking() {
    assert_eq!(stdout(&tdga(&["sl", "-1"])).trim(), "-3");
    assert_eq!(stdout(&tdga(&["sl", "1"])).trim(), "-1");
}

#[test]
fn check_passes() {
    let o = tdga(&["check", "1 -2"]);
    assert!(o.status.success());
    let o = tdga(&["check", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn json_dga_lists_generators() {
    let o = tdga(&["dga", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["strands"], 2);
    assert_eq!(v["generators"].as_array().unwrap().len(), 12);
}

#[test]
fn domain_errors_exit_1() {
    for args in [
        &["dga", "1 x"][..],
        &["infinity", "", "--strands", "2"],
        &["aug", "1", "--p", "4"],
        &["aug", "1", "--p", "3", "--U", "1"],
        &["sl", "", "--strands", "2"],
        &["bogus"],
    ] {
        let o = tdga(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn aug_needs_one_value_per_component() {
    let o = tdga(&["aug", "1", "--p", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--lambda"));
    let o = tdga(&["aug", "", "--strands", "2", "--p", "3", "--lambda", "1", "--mu", "1"]);
    assert_eq!(o.status.code(), Some(1));
}
