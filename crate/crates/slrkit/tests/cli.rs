use std::process::Command;

use serde_json::Value;
use slrkit::json::{graph_from_json, tree_from_json};

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn slrkit(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_slrkit"))
        .args(args.iter().map(|a| {
            if a.contains('.') && !a.starts_with('-') && !a.starts_with('/') {
                data(a)
            } else {
                a.to_string()
            }
        }))
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let r = slrkit(&all);
    (
        r.code,
        serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}\n{}", r.stdout)),
    )
}

/// Every embedded object that looks like a graph.
fn graphs(v: &Value, out: &mut Vec<Value>) {
    match v {
        Value::Object(m) if m.contains_key("vertices") && m.contains_key("sources") => {
            out.push(v.clone())
        }
        Value::Object(m) => m.values().for_each(|w| graphs(w, out)),
        Value::Array(a) => a.iter().for_each(|w| graphs(w, out)),
        _ => {}
    }
}

#[test]
fn check_regular() {
    let r = slrkit(&["check-regular", "ladder.sid"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("# slrkit check-regular\n"));
    assert!(r.stdout.contains("regular\nQ = {A, B}\n"));
    let r = slrkit(&["check-regular", "fan.sid"]);
    assert!(r.stdout.contains("Q = {A, C}"));

    for (file, condition) in [
        ("violates_1.sid", "1"),
        ("violates_2.sid", "2"),
        ("violates_3.sid", "3"),
        ("violates_4.sid", "4"),
    ] {
        let r = slrkit(&["check-regular", file]);
        assert_eq!(r.code, 1, "{file}");
        assert!(r.stdout.contains("not regular"), "{file}");
        assert!(
            r.stdout
                .contains(&format!("violates condition {condition}")),
            "{file}: {}",
            r.stdout
        );
        let (code, v) = json(&["check-regular", file]);
        assert_eq!((code, v["verdict"].as_str()), (1, Some("not-regular")));
    }
}

#[test]
fn check_rigid_and_bounds() {
    assert_eq!(slrkit(&["check-rigid", "ladder.sid"]).code, 1);
    assert_eq!(slrkit(&["check-rigid", "fan.sid"]).code, 1);
    let (code, v) = json(&["check-rigid", "fan_rigid.sid"]);
    assert_eq!((code, v["result"]["rigid"].as_bool()), (0, Some(true)));

    let r = slrkit(&["bounds", "fan_rigid.sid"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("K = 2\nB = 4\n"), "{}", r.stdout);
    let (_, v) = json(&["bounds", "fan_rigid.sid"]);
    assert_eq!(v["result"]["tw_bound"].as_u64(), Some(6));
    assert_eq!(slrkit(&["bounds", "ladder.sid"]).code, 1);
}

#[test]
fn entailment() {
    let r = slrkit(&["entail", "ladder.sid", "--lhs", "A", "--rhs", "A"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("no counterexample up to 4"));
    let (code, v) = json(&[
        "entail",
        "ladder.sid",
        "ladder_no_base.sid",
        "--lhs",
        "A",
        "--rhs",
        "A",
    ]);
    assert_eq!(code, 1);
    let mut gs = Vec::new();
    graphs(&v["result"], &mut gs);
    assert_eq!(gs.len(), 1);
    let g = graph_from_json(&gs[0].to_string()).unwrap();
    assert_eq!(g.vertex_count(), 3);
}

#[test]
fn mso_eval() {
    let eval = |graph: &str, formula: &str| slrkit(&["mso-eval", "--mso1", graph, formula]);
    let r = eval("ring3.graph.json", "hamiltonian.mso");
    assert_eq!((r.code, r.stdout.lines().last()), (0, Some("true")));
    assert_eq!(eval("ring3_detour.graph.json", "hamiltonian.mso").code, 1);
    assert_eq!(eval("k23.graph.json", "bipartite.mso").code, 0);
    let open = std::env::temp_dir().join("slrkit-open.mso");
    std::fs::write(&open, "exists x . e(x, y)").unwrap();
    let r = slrkit(&["mso-eval", "k23.graph.json", open.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("free variables: y"), "{}", r.stderr);
}

#[test]
fn models_and_trees() {
    let (code, v) = json(&["models", "ladder.sid", "--max-vertices", "4"]);
    assert_eq!(code, 0);
    for m in v["result"]["models"].as_array().unwrap() {
        tree_from_json(&m["tree"].to_string()).unwrap();
    }
    let mut gs = Vec::new();
    graphs(&v["result"], &mut gs);
    assert!(!gs.is_empty());
    for g in gs {
        let g = graph_from_json(&g.to_string()).unwrap();
        assert!(g.vertex_count() <= 4);
    }

    let (_, v) = json(&["models", "ladder.sid", "full", "--max-vertices", "4"]);
    let mut gs = Vec::new();
    graphs(&v["result"], &mut gs);
    assert_eq!(v["result"]["count"].as_u64(), Some(gs.len() as u64));

    let r = slrkit(&["parse-trees", "ladder.sid", "--max-trees", "3"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("2 edges  A[r0(B[r2()])]\n"));
    assert!(r.stdout.ends_with("3 trees\n"));
}

#[test]
fn fission_and_fusion() {
    for cmd in ["fission", "fusion"] {
        let (code, v) = json(&[cmd, "bc.graph.json"]);
        assert_eq!(code, 0);
        let mut gs = Vec::new();
        graphs(&v["result"], &mut gs);
        assert_eq!(v["result"]["count"].as_u64(), Some(gs.len() as u64));
        for g in gs {
            assert_eq!(graph_from_json(&g.to_string()).unwrap().type_n(), 1);
        }
        let dot = slrkit(&["--format", "dot", cmd, "bc.graph.json"]);
        assert_eq!(dot.code, 0);
        assert!(dot.stdout.starts_with("graph "));
    }
    assert_eq!(
        slrkit(&["--format", "dot", "check-regular", "ladder.sid"]).code,
        2
    );
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["models", "fan.sid", "full", "--max-vertices", "4"][..],
        &["fusion", "bc.graph.json", "--k", "2"],
        &["check-rigid", "fan.sid"],
        &["parse-trees", "fan.sid"],
    ] {
        let (a, b) = (slrkit(args), slrkit(args));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.code, b.code);
    }
}

#[test]
fn usage_and_input_errors() {
    let bad = std::env::temp_dir().join("slrkit-bad.sid");
    std::fs::write(&bad, "alphabet b/2 ;\nA() <= b(x, x) ;").unwrap();
    let r = slrkit(&["check-regular", bad.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(
        r.stderr.contains(":2:10: undeclared symbol `x`"),
        "{}",
        r.stderr
    );

    assert_eq!(slrkit(&["check-regular", "missing.sid"]).code, 2);
    assert_eq!(slrkit(&["frobnicate"]).code, 2);
    assert_eq!(
        slrkit(&["models", "ladder.sid", "--max-vertices", "99"]).code,
        2
    );
    assert_eq!(
        slrkit(&["check-regular", "ladder.sid", "--pred", "Nope"]).code,
        2
    );
    assert_eq!(slrkit(&["--help"]).code, 0);
}
