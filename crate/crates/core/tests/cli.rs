use std::path::PathBuf;
use std::process::{Command, Output};

fn rn_topo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rn-topo"))
        .args(args)
        .env_remove("RN_TOPO_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

const SHIFT: &str = r#"{"type":"shift","k":2}"#;

#[test]
fn explore_succeeds() {
    let out = rn_topo(&["explore", "--system", SHIFT, "--point", r#"{"period":"10"}"#, "--depth", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["tasks"][0]["status"], "ok");
}

#[test]
fn example_plan_runs() {
    let plan = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/plans/showcase.json");
    let out = rn_topo(&["run", plan.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["tasks"].as_array().unwrap().len(), 11);
}

#[test]
fn stochastic_runs_are_reproducible() {
    let args = ["mtp", "--system", r#"{"type":"odometer","p":"1/3"}"#, "--samples", "500", "--seed", "7"];
    let strip = |mut v: serde_json::Value| {
        v.as_object_mut().unwrap().remove("wall_time_ms");
        for t in v["tasks"].as_array_mut().unwrap() {
            t.as_object_mut().unwrap().remove("wall_time_ms");
        }
        v
    };
    let a = strip(stdout_json(&rn_topo(&args)));
    let b = strip(stdout_json(&rn_topo(&args)));
    assert_eq!(a, b);
}

#[test]
fn task_failure_exits_1() {
    let out = rn_topo(&["tree", "/nonexistent/forest.tree"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("failed"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["bogus"],
        vec!["mtp", "--system", SHIFT],
        vec!["explore", "--system", SHIFT, "--point", r#"{"period":"0"}"#],
        vec!["explore", "--system", r#"{"type":"rotation"}"#, "--point", r#"{"period":"10"}"#],
        vec!["classify", "--system", SHIFT, "--point", "not json"],
        vec!["run", "/nonexistent/plan.json"],
    ] {
        let out = rn_topo(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
