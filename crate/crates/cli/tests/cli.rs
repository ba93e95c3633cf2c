use std::io::Write;
use std::process::{Command, Output, Stdio};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropmoduli")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn enumerate_base_case() {
    let o = run(&["enumerate", "-g", "1", "-n", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next().unwrap(), "dims: [1,2,2], total 5");
    let o = run(&["enumerate", "-g", "1", "-n", "2", "--pseudostable"]);
    assert_eq!(stdout(&o).lines().next().unwrap(), "dims: [1,1,1], total 3");
    let o = run(&["enumerate", "-g", "1", "-n", "2", "--weighted", "1/100"]);
    assert_eq!(stdout(&o).lines().next().unwrap(), "dims: [1,1,1], total 3");
}

#[test]
fn excluded_range_and_bad_usage_exit_two() {
    assert_eq!(run(&["enumerate", "-g", "1", "-n", "1"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "-g", "1"]).status.code(), Some(2));
    assert_eq!(run(&["pp", "eval", "-g", "1", "-n", "2", "--expr", "phi0 +"]).status.code(), Some(2));
    assert_eq!(run(&["map", "trop-t", "-g", "1", "-n", "2", "--point", "cone=banana;coords=1"]).status.code(), Some(2));
}

#[test]
fn map_point() {
    let o = run(&["map", "trop-t", "-g", "1", "-n", "2", "--point", "cone=loop+tail;coords=1,1"]);
    assert_eq!(stdout(&o), "ray rho0_ps, coord 13\n");
    let o = run(&["map", "trop-t", "-g", "1", "-n", "2", "--point", "cone=rho1;coords=1"]);
    assert_eq!(stdout(&o), "ray rho0_ps, coord 12\n");
    let o = run(&["map", "hassett", "-g", "1", "-n", "2", "--point", "cone=rho1;coords=1"]);
    assert_eq!(stdout(&o), "point_w\n");
}

#[test]
fn pp_and_integrate() {
    let o = run(&["pp", "eval", "-g", "1", "-n", "2", "--expr", "phi0^2 - Phi0 - 2*phi(banana)", "--pseudostable"]);
    assert_eq!(stdout(&o), "0\n");
    let o = run(&["pp", "eval", "-g", "1", "-n", "2", "--expr", "phi0*phi1", "--point", "cone=loop+tail;coords=2,3"]);
    assert_eq!(stdout(&o), "6\n");
    let o = run(&["integrate", "-g", "1", "-n", "2", "--expr", "phi0*phi1", "--times", "2"]);
    assert_eq!(stdout(&o), "1\n");
    let o = run(&["integrate", "-g", "1", "-n", "2", "--expr", "phi1^2"]);
    assert_eq!(stdout(&o), "-1/24\n");
    let o = run(&["integrate", "-g", "1", "-n", "2", "--expr", "phi0^2/6", "--pseudostable"]);
    assert_eq!(stdout(&o), "1\n");
}

#[test]
fn verify_exit_codes_and_json() {
    let o = run(&["verify", "-g", "1", "-n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[pass] contraction-coefficient: 24"));
    let o = run(&["verify", "-g", "2", "-n", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let entries = v["entries"].as_array().unwrap();
    assert!(entries.iter().any(|e| e["status"] == "skipped" && e["value"] == "skipped: genus>1"));
    assert!(entries.iter().all(|e| e["status"] != "fail"));
}

#[test]
fn deterministic_output() {
    let a = run(&["complex", "-g", "1", "-n", "3"]);
    let b = run(&["complex", "-g", "1", "-n", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn export_then_import_round_trips() {
    let complex: serde_json::Value = serde_json::from_str(&stdout(&run(&["export", "-g", "1", "-n", "3"]))).unwrap();
    for cone in complex["cones"].as_array().unwrap() {
        let graph = cone["graph"].to_string();
        let mut child = Command::new(env!("CARGO_BIN_EXE_tropmoduli"))
            .args(["canon", "--input", "-"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .unwrap();
        child.stdin.take().unwrap().write_all(graph.as_bytes()).unwrap();
        let out = String::from_utf8(child.wait_with_output().unwrap().stdout).unwrap();
        let back: serde_json::Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
        assert_eq!(back, cone["graph"]);
    }
    let dot = stdout(&run(&["export", "-g", "1", "-n", "2", "--cone", "banana", "--format", "dot"]));
    assert!(dot.starts_with("graph"));
}
