use std::fs;
use std::path::{Path, PathBuf};

use resetnet::format::{parse_net_file, serialize_net_file};
use resetnet_cli::{run, EXIT_EXHAUSTED, EXIT_INPUT, EXIT_NO, EXIT_YES};
use tempfile::TempDir;

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../nets")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

struct Output {
    code: i32,
    out: String,
    err: String,
}

fn cli(args: &[&str]) -> Output {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("resetnet").chain(args.iter().copied()), &mut out, &mut err);
    Output {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

/// Saves a verdict and checks that its witness replays on the same net.
fn assert_witness_checks(dir: &TempDir, net: &str, verdict: &str) {
    let run_file = write(dir, "run.txt", verdict);
    let o = cli(&["check-witness", net, "--run", run_file.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_YES, "{}", o.out);
    assert!(o.out.starts_with("VALID"));
}

#[test]
fn reach_two_branch_workflow() {
    let dir = TempDir::new().unwrap();
    let net = corpus("two_branch_workflow.net");
    let o = cli(&["reach", &net]);
    assert_eq!(o.code, EXIT_YES);
    let lines: Vec<&str> = o.out.lines().collect();
    assert_eq!(lines[0], "REACHABLE");
    assert_eq!(lines[1], "witness: t1 t1 t2");
    assert!(lines[2].starts_with("stats: states="));
    assert_witness_checks(&dir, &net, &o.out);
}

#[test]
fn cover_two_branch() {
    let dir = TempDir::new().unwrap();
    let net = corpus("two_branch.net");
    let o = cli(&["cover", &net]);
    assert_eq!(o.code, EXIT_YES);
    assert!(o.out.starts_with("COVERABLE\nwitness: "));
    assert_witness_checks(&dir, &net, &o.out);
}

#[test]
fn reach_rejects_non_workflow_nets() {
    let o = cli(&["reach", &corpus("two_branch.net")]);
    assert_eq!(o.code, EXIT_INPUT);
    assert_eq!(o.err.lines().count(), 1);
}

#[test]
fn compiled_formulas() {
    let dir = TempDir::new().unwrap();
    for (name, expected, label) in [
        ("false.qdimacs", EXIT_NO, "UNCOVERABLE"),
        ("true.qdimacs", EXIT_YES, "COVERABLE"),
    ] {
        let net = dir.path().join(format!("{name}.net"));
        let net = net.to_str().unwrap();
        assert_eq!(cli(&["compile-qbf", &corpus(name), "-o", net]).code, EXIT_YES);
        let o = cli(&["cover", net]);
        assert_eq!(o.code, expected, "{name}: {}", o.out);
        assert_eq!(o.out.lines().next(), Some(label));
        if expected == EXIT_YES {
            assert_witness_checks(&dir, net, &o.out);
        }
        let g = cli(&["goodness", net, "--marking", "h1=1"]);
        assert_eq!(g.code, EXIT_YES);
        assert!(g.out.starts_with("good: true"));
    }
}

#[test]
fn goodness_needs_a_compiled_net() {
    let o = cli(&["goodness", &corpus("two_branch.net"), "--marking", "i=1"]);
    assert_eq!(o.code, EXIT_INPUT);
}

#[test]
fn oracle_budget_runs_out() {
    let dir = TempDir::new().unwrap();
    // i never grows, but t3 makes the state space infinite
    let text = fs::read_to_string(corpus("two_branch.net")).unwrap().replace("target p2=1", "target i=3");
    let net = write(&dir, "n.net", &text);
    let o = cli(&["oracle", net.to_str().unwrap(), "--max-states", "50"]);
    assert_eq!(o.code, EXIT_EXHAUSTED);
    assert!(o.out.starts_with("EXHAUSTED\nstats: states="));

    let o = cli(&["oracle", &corpus("two_branch_workflow.net"), "--max-steps", "10"]);
    assert_eq!(o.code, EXIT_YES);
    assert_witness_checks(&dir, &corpus("two_branch_workflow.net"), &o.out);
}

#[test]
fn oracle_refutes_finite_instances() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(corpus("two_branch_workflow.net"))
        .unwrap()
        .replace("target f=1", "target p2=1");
    let net = write(&dir, "n.net", &text);
    let o = cli(&["oracle", net.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_NO);
    assert!(o.out.starts_with("UNREACHABLE"));
}

#[test]
fn simulate_concrete_and_abstract() {
    let o = cli(&["simulate", &corpus("two_branch_workflow.net"), "--fire", "t1,t1,t2"]);
    assert_eq!(o.code, EXIT_YES);
    assert_eq!(o.out.lines().last(), Some("t2 -> f=1"));

    let o = cli(&["simulate", &corpus("two_branch.net"), "--fire", "t3", "--abstract"]);
    assert_eq!(o.code, EXIT_YES);
    assert!(o.out.contains("p1=ω"));

    let o = cli(&["simulate", &corpus("two_branch_workflow.net"), "--fire", "t2"]);
    assert_eq!(o.code, EXIT_NO);
    let o = cli(&["simulate", &corpus("two_branch_workflow.net"), "--fire", "t9"]);
    assert_eq!(o.code, EXIT_INPUT);
}

#[test]
fn validate_reports_structure() {
    let o = cli(&["validate", &corpus("two_branch_workflow.net")]);
    assert_eq!(o.code, EXIT_YES);
    assert!(o.out.contains("workflow: true"));
    let o = cli(&["validate", &corpus("zero_test_loop.net")]);
    assert_eq!(o.code, EXIT_YES);
    assert!(o.out.contains("acyclic: false"));
    assert!(o.out.contains("cycle: a t a"));
}

#[test]
fn reductions_write_parseable_nets() {
    let dir = TempDir::new().unwrap();
    for (cmd, input) in [
        ("acyclify", "zero_test_loop.net"),
        ("deresets", "zero_test_loop.net"),
        ("to-unary", "two_branch.net"),
    ] {
        let o = cli(&[cmd, &corpus(input)]);
        assert_eq!(o.code, EXIT_YES, "{cmd}: {}", o.err);
        let doc = parse_net_file(&o.out).unwrap();
        assert_eq!(serialize_net_file(&doc), o.out);

        let path = dir.path().join(format!("{cmd}.net"));
        let o2 = cli(&[cmd, &corpus(input), "-o", path.to_str().unwrap()]);
        assert_eq!(o2.code, EXIT_YES);
        assert!(o2.out.is_empty());
        assert_eq!(fs::read_to_string(&path).unwrap(), o.out);
    }
    let o = cli(&["acyclify", &corpus("two_branch.net")]);
    assert_eq!(o.code, EXIT_INPUT, "cover objective is rejected");
}

#[test]
fn acyclified_net_keeps_the_verdict() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("a.net");
    assert_eq!(cli(&["acyclify", &corpus("zero_test_loop.net"), "-o", out.to_str().unwrap()]).code, EXIT_YES);
    let o = cli(&["oracle", out.to_str().unwrap(), "--max-steps", "6"]);
    assert_eq!(o.code, EXIT_YES);
    assert_eq!(o.out.lines().nth(1), Some("witness: t#sim t#con t#pro"));
}

#[test]
fn input_errors() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.net", "net x\nplace p\ntrans t\narc p -> t 0\n");
    let o = cli(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_INPUT);
    assert!(o.err.contains("line 4"), "{}", o.err);
    assert_eq!(o.err.lines().count(), 1);

    assert_eq!(cli(&["cover", "/nonexistent.net"]).code, EXIT_INPUT);
    assert_eq!(cli(&["frobnicate"]).code, EXIT_INPUT);
    let no_instance = write(&dir, "n.net", "net x\nplace p\n");
    assert_eq!(cli(&["cover", no_instance.to_str().unwrap()]).code, EXIT_INPUT);

    let run_file = write(&dir, "r.txt", "t1 t2");
    let o = cli(&["check-witness", &corpus("two_branch_workflow.net"), "--run", run_file.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_NO);
    assert!(o.out.starts_with("INVALID"));
}
