use std::io::Write;
use std::process::{Command, Output, Stdio};

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_intertype"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    let mut input = child.stdin.take().unwrap();
    input.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(input);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SELF_APP: &str = r"(\x.x x) (\y.y)";

const SELF_APP_TRACE: &str = "\
normalized {a = <b>→g, d = <a,b>→g, f = <e>→e, <a,b> = <f>, c = g}
blocked <a,b> = <f> (2 vs 1)
expand <f> by 1
normalized {a = <b>→<h>→h, d = <a,b>→<h>→h, f = <e>→<h>→h, i = <h>→h, e = <h>→h, b = <h>→h, c = <h>→h, g = <h>→h}
solved {a = <<h>→h>→<h>→h, d = <<<h>→h>→<h>→h,<h>→h>→<h>→h, f = <<h>→h>→<h>→h, i = <h>→h, e = <h>→h, b = <h>→h, c = <h>→h, g = <h>→h}
⊢ (λx.x x) (λy.y) : [a]→a
";

#[test]
fn parse_echoes_canonical_form() {
    let o = run(&["parse", r"\x y.x"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "λx.λy.x\n");
    let o = run(&["--ascii", "--format", "json", "parse", r"\x.x"], None);
    assert_eq!(stdout(&o), "{\"size\":2,\"term\":\"\\\\x.x\"}\n");
}

#[test]
fn syntax_errors_exit_2() {
    let o = run(&["infer", r"(\x.x"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected ')'"));
}

#[test]
fn reduce_prints_each_step() {
    let o = run(&["reduce", r"(\x.x) y"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "→ y\n");
    let o = run(&["--fuel", "5", "reduce", r"(\x.x x) (\x.x x)"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).ends_with("FUEL-EXHAUSTED\n"));
}

#[test]
fn infer_prints_the_typing() {
    let o = run(&["infer", r"\f.\x.f (f x)"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "⊢ λf.λx.f (f x) : [[a]→b,[c]→a]→[c]→b\n");
    let o = run(&["--ascii", "infer"], Some(r"\x.x"));
    assert_eq!(stdout(&o), "⊢ \\x.x : [a]->a\n");
}

#[test]
fn infer_runs_out_of_fuel_on_omega() {
    let o = run(&["--fuel", "30", "infer", r"(\x.x x) (\x.x x)"], None);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "FUEL-EXHAUSTED\n");
}

#[test]
fn weak_system_inference_is_a_usage_error() {
    let o = run(&["--system", "weak", "infer", r"\x.x"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn trace_matches_golden_text() {
    let o = run(&["trace", SELF_APP], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), SELF_APP_TRACE);
}

#[test]
fn trace_json_lists_events() {
    let o = run(&["--format", "json", "trace", SELF_APP], None);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let events: Vec<&str> = v["trace"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["event"].as_str().unwrap())
        .collect();
    assert_eq!(
        events,
        [
            "normalized",
            "blocked_chosen",
            "expanded",
            "normalized",
            "final_unification"
        ]
    );
    assert_eq!(v["trace"][2]["anchor"], "<f>");
    assert_eq!(v["trace"][2]["delta"], 1);
    assert_eq!(v["result"]["typing"], "⊢ (λx.x x) (λy.y) : [a]→a");
    assert_eq!(v["result"]["derivation"]["rule"], "app");
    assert_eq!(v["result"]["derivation"]["conclusion"], "[h]→h");
}

#[test]
fn inferred_json_checks_valid() {
    for term in [SELF_APP, r"\f.\x.f (f x)", r"(\x.\y.y) (\z.z z)"] {
        let tree = stdout(&run(&["--format", "json", "infer", term], None));
        let o = run(&["check"], Some(&tree));
        assert_eq!(o.status.code(), Some(0), "{term}");
        assert_eq!(stdout(&o), "valid\n");
    }
    // the object printed by `trace` is accepted as well
    let traced = stdout(&run(&["--format", "json", "trace", SELF_APP], None));
    let o = run(&["--format", "json", "check"], Some(&traced));
    assert_eq!(stdout(&o), "{\"valid\":true,\"violations\":[]}\n");
}

#[test]
fn check_rejects_a_tampered_tree() {
    let tree = stdout(&run(&["--format", "json", "infer", SELF_APP], None));
    let mut v: serde_json::Value = serde_json::from_str(&tree).unwrap();
    v["conclusion"] = "[a]→b".into();
    let o = run(&["check"], Some(&v.to_string()));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[app]"));
}

#[test]
fn check_reports_malformed_input() {
    assert_eq!(run(&["check"], Some("not json")).status.code(), Some(2));
    assert_eq!(run(&["check"], Some("{}")).status.code(), Some(2));
}

#[test]
fn output_is_bit_stable() {
    let args = ["--format", "json", "trace", r"(\x.x x x) (\y.y)"];
    assert_eq!(stdout(&run(&args, None)), stdout(&run(&args, None)));
    let seeded = ["--seed", "3", "infer", r"\f.\x.f (f x)"];
    assert_eq!(stdout(&run(&seeded, None)), stdout(&run(&seeded, None)));
}
