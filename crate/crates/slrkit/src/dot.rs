//! Graphviz output for inspection. Vertices are circles, edges are boxes
//! joined to their attachments by lines numbered in attachment order.

use std::fmt::Write;

use slrkit_core::graph::CGraph;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn graph_to_dot(g: &CGraph, name: &str) -> String {
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "graph {} {{", quote(name)).expect("writing to a string");
    for (i, v) in g.vertices().iter().enumerate() {
        let source = g.sources().iter().position(|&s| s == i);
        let label = match source {
            Some(k) => format!("{v} [{}]", k + 1),
            None => v.clone(),
        };
        let shape = if source.is_some() {
            "doublecircle"
        } else {
            "circle"
        };
        writeln!(w, "  v{i} [shape={shape}, label={}];", quote(&label))
            .expect("writing to a string");
    }
    for (i, e) in g.edges().iter().enumerate() {
        writeln!(w, "  e{i} [shape=box, label={}];", quote(&e.label.name))
            .expect("writing to a string");
        for (k, v) in e.attach.iter().enumerate() {
            writeln!(w, "  e{i} -- v{v} [label=\"{}\"];", k + 1).expect("writing to a string");
        }
    }
    out.push_str("}\n");
    out
}
