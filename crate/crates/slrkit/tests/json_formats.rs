#[path = "../../core/tests/common/mod.rs"]
mod common;

use common::random_simple;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slrkit::dot::graph_to_dot;
use slrkit::json::{
    grammar_from_json, grammar_to_json, graph_from_json, graph_to_json, tree_from_json,
    tree_to_json, JsonError,
};
use slrkit::parse_sid;
use slrkit_core::grammar::{enumerate_parse_trees, sid_to_grammar};
use slrkit_core::graph::CGraph;

fn data(name: &str) -> String {
    std::fs::read_to_string(format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn fixture_graphs() {
    let ring = graph_from_json(&data("ring3.graph.json")).unwrap();
    assert_eq!(
        (ring.vertex_count(), ring.edge_count(), ring.type_n()),
        (3, 6, 0)
    );
    let bc = graph_from_json(&data("bc.graph.json")).unwrap();
    assert_eq!(bc.type_n(), 1);
    for name in ["ring3", "ring3_detour", "k23", "triangle", "bc"] {
        let g = graph_from_json(&data(&format!("{name}.graph.json"))).unwrap();
        assert_eq!(graph_from_json(&graph_to_json(&g)).unwrap(), g, "{name}");
    }
}

#[test]
fn graph_errors() {
    let bad = |text: &str| graph_from_json(text).unwrap_err();
    assert!(matches!(bad("{"), JsonError::Syntax(_)));
    assert!(matches!(
        bad(r#"{"type": 0, "vertices": [], "edges": [], "sources": [], "extra": 1}"#),
        JsonError::Syntax(_)
    ));
    assert!(matches!(
        bad(r#"{"type": 1, "vertices": ["u"], "edges": [], "sources": []}"#),
        JsonError::TypeMismatch {
            declared: 1,
            found: 0
        }
    ));
    assert!(matches!(
        bad(r#"{"type": 0, "vertices": ["u"], "edges": [{"id": "e", "label": "a", "attach": ["w"]}], "sources": []}"#),
        JsonError::UnknownVertex(v) if v == "w"
    ));
    assert!(matches!(
        bad(r#"{"type": 0, "vertices": ["u", "u"], "edges": [], "sources": []}"#),
        JsonError::Graph(_)
    ));
    assert!(matches!(
        bad(r#"{"type": 2, "vertices": ["u"], "edges": [], "sources": ["u", "u"]}"#),
        JsonError::Graph(_)
    ));
}

#[test]
fn trees_round_trip() {
    for name in ["ladder", "fan", "fan_rigid"] {
        let sid = parse_sid(&data(&format!("{name}.sid"))).unwrap();
        let trees = enumerate_parse_trees(&sid, "A", 5).unwrap();
        assert!(!trees.is_empty());
        for t in trees {
            let text = tree_to_json(&t);
            assert_eq!(tree_from_json(&text).unwrap(), t, "{name}: {t}");
        }
    }
}

#[test]
fn tree_errors() {
    let bad = |text: &str| tree_from_json(text).unwrap_err();
    assert!(matches!(
        bad(r#"{"nodes": [], "edges": []}"#),
        JsonError::Tree(_)
    ));
    let two_parents = r#"{"nodes": [{"id": 0, "predicate": "A"}, {"id": 1, "predicate": "B"}],
        "edges": [{"rule": 0, "parent": 0, "children": [1]}, {"rule": 1, "parent": 0, "children": [1]}]}"#;
    assert!(matches!(bad(two_parents), JsonError::Tree(_)));
    let orphan = r#"{"nodes": [{"id": 0, "predicate": "A"}, {"id": 1, "predicate": "B"}],
        "edges": [{"rule": 0, "parent": 0, "children": []}]}"#;
    assert!(matches!(bad(orphan), JsonError::Tree(_)));
    let root_child = r#"{"nodes": [{"id": 0, "predicate": "A"}],
        "edges": [{"rule": 0, "parent": 0, "children": [0]}]}"#;
    assert!(matches!(bad(root_child), JsonError::Tree(_)));
    let cycle = r#"{"nodes": [{"id": 0, "predicate": "A"}, {"id": 1, "predicate": "B"}, {"id": 2, "predicate": "B"}],
        "edges": [{"rule": 0, "parent": 0, "children": []}, {"rule": 1, "parent": 1, "children": [2]},
                  {"rule": 1, "parent": 2, "children": [1]}]}"#;
    assert!(matches!(bad(cycle), JsonError::Tree(_)));
    let misnumbered = r#"{"nodes": [{"id": 3, "predicate": "A"}], "edges": []}"#;
    assert!(matches!(bad(misnumbered), JsonError::Tree(_)));
}

#[test]
fn grammars_round_trip() {
    for name in ["ladder", "fan", "fan_rigid"] {
        let sid = parse_sid(&data(&format!("{name}.sid"))).unwrap();
        let (gamma, _) = sid_to_grammar(&sid).unwrap();
        let text = grammar_to_json(&gamma);
        assert_eq!(grammar_from_json(&text).unwrap(), gamma, "{name}");
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let kinds: Vec<&str> = value["rules"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["kind"].as_str().unwrap())
            .collect();
        assert!(kinds
            .iter()
            .all(|k| *k == "productive" || *k == "unproductive"));
    }
}

#[test]
fn dot_output() {
    let bc = graph_from_json(&data("bc.graph.json")).unwrap();
    let dot = graph_to_dot(&bc, "bc");
    assert!(dot.starts_with("graph \"bc\" {\n"));
    assert!(dot.ends_with("}\n"));
    assert_eq!(dot.matches("doublecircle").count(), 1);
    assert_eq!(dot.matches("shape=box").count(), bc.edge_count());
    let lines = bc.edges().iter().map(|e| e.attach.len()).sum::<usize>();
    assert_eq!(dot.matches(" -- ").count(), lines);
    assert_eq!(
        graph_to_dot(&CGraph::new(), "a\"b"),
        "graph \"a\\\"b\" {\n}\n"
    );
}

proptest! {
    #[test]
    fn graphs_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(0..=5);
        let mut g = random_simple(&mut rng, n, 6, &[("a", 1), ("b", 2), ("t", 3)]);
        if n > 0 {
            let k = rng.gen_range(0..=n.min(2));
            let mut sources: Vec<usize> = (0..n).collect();
            for i in 0..k {
                let j = rng.gen_range(i..n);
                sources.swap(i, j);
            }
            sources.truncate(k);
            g.set_sources(sources).unwrap();
        }
        let text = graph_to_json(&g);
        prop_assert_eq!(graph_from_json(&text).unwrap(), g);
    }
}
