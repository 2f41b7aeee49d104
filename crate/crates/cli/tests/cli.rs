use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_preproj")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn fill_a3_passes() {
    let o = run(&["fill", "--quiver", &data("a3.q"), "--lambda", "-1", "--field", "Q", "--emit", "table"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().filter(|l| l.contains("relation")).all(|l| l.ends_with("PASS")));
    assert!(out.ends_with("relations PASS\n"));
}

#[test]
fn triangle_is_infeasible_over_q() {
    let o = run(&["feasible", "--quiver", &data("triangle.q"), "--lambda", "1", "--field", "Q", "--emit", "table"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).ends_with("INFEASIBLE\n"));
    let o = run(&["feasible", "--quiver", &data("triangle.q"), "--field", "Fp:2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "FEASIBLE");
    assert_eq!(v["schema"], "preproj/1");
}

#[test]
fn a3_correspondence_layout() {
    let o = run(&["tables", "--quiver", &data("a3.q"), "--emit", "table"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for row in [
        "b*·a* | g_b×g_a | f_b*f_a",
        "b·b*  | g_a×f_a | f_a*τ⁻g_a",
        "a·b   | f_a×f_b | τ⁻g_a*τ⁻g_b",
    ] {
        assert!(out.contains(row), "missing `{row}` in\n{out}");
    }
    assert!(out.contains("(6,3,1)"));
}

#[test]
fn verify_iso_on_d4() {
    let o = run(&["verify-iso", "--quiver", "1;2;3;4; a:2->1; b:3->1; c:4->1", "--field", "Fp:5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["reports"].as_array().unwrap().len(), 3);
}

#[test]
fn knit_dot_and_json() {
    let o = run(&["knit", "--quiver", &data("a3.q"), "--emit", "dot"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("digraph"));
    let o = run(&["knit", "--quiver", "1;2;3;4; a:2->1; b:3->1; c:4->1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn output_is_byte_identical() {
    let args = ["tables", "--quiver", "1;2;3;4; a:2->1; b:3->1; c:4->1"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn usage_errors_exit_with_2() {
    for args in [
        vec!["knit", "--quiver", "1;2; a:2->1; b:2->1"],
        vec!["fill", "--quiver", &data("triangle.q")],
        vec!["fill", "--quiver", "1;2; a:2->1", "--lambda", "0"],
        vec!["fill", "--quiver", "1;2; a:2->1", "--field", "Fp:4"],
        vec!["fill", "--quiver", "1;2; a:2->1", "--base-sink", "2"],
        vec!["tables", "--quiver", "1;2; a:2->1", "--emit", "dot"],
        vec!["bogus"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}
