#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use slrkit_core::graph::{CGraph, Label};

/// Builds a type-0 graph from `(label, arity-implied attach)` over vertices `0..n`.
pub fn graph(n: usize, edges: &[(&str, &[usize])]) -> CGraph {
    let mut g = CGraph::new();
    for i in 0..n {
        g.add_vertex(format!("v{i}")).unwrap();
    }
    for (i, (l, att)) in edges.iter().enumerate() {
        g.add_edge(format!("e{i}"), Label::new(*l, att.len()), att.to_vec())
            .unwrap();
    }
    g
}

/// A random simple graph over the given labels.
pub fn random_simple(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_edges: usize,
    labels: &[(&str, usize)],
) -> CGraph {
    let mut g = graph(n, &[]);
    if n == 0 {
        return g;
    }
    let m = rng.gen_range(0..=max_edges);
    let mut id = 0;
    for _ in 0..m {
        let (l, a) = labels[rng.gen_range(0..labels.len())];
        let att: Vec<usize> = (0..a).map(|_| rng.gen_range(0..n)).collect();
        let dup = g
            .edges()
            .iter()
            .any(|e| e.label.name == l && e.attach == att);
        if !dup {
            g.add_edge(format!("e{id}"), Label::new(l, a), att).unwrap();
            id += 1;
        }
    }
    g
}

/// All permutations of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Isomorphism by trying every vertex bijection.
pub fn iso_bruteforce(g: &CGraph, h: &CGraph) -> bool {
    if g.vertex_count() != h.vertex_count() || g.edge_count() != h.edge_count() {
        return false;
    }
    let mut target: Vec<(String, Vec<usize>)> = h
        .edges()
        .iter()
        .map(|e| (e.label.name.clone(), e.attach.clone()))
        .collect();
    target.sort();
    let hs = h.sources().to_vec();
    permutations(g.vertex_count()).into_iter().any(|p| {
        if g.sources().iter().map(|&s| p[s]).collect::<Vec<_>>() != hs {
            return false;
        }
        let mut img: Vec<(String, Vec<usize>)> = g
            .edges()
            .iter()
            .map(|e| {
                (
                    e.label.name.clone(),
                    e.attach.iter().map(|&v| p[v]).collect(),
                )
            })
            .collect();
        img.sort();
        img == target
    })
}

/// Random vertex renaming and edge reordering of `g`.
pub fn shuffled(rng: &mut ChaCha8Rng, g: &CGraph) -> CGraph {
    let n = g.vertex_count();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    let mut h = CGraph::new();
    let mut inv = vec![0; n];
    for (old, &new) in perm.iter().enumerate() {
        inv[new] = old;
    }
    for old in &inv {
        h.add_vertex(format!("w{old}")).unwrap();
    }
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    for i in (1..order.len()).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    for i in order {
        let e = &g.edges()[i];
        h.add_edge(
            e.id.clone(),
            e.label.clone(),
            e.attach.iter().map(|&v| perm[v]).collect(),
        )
        .unwrap();
    }
    h.set_sources(g.sources().iter().map(|&s| perm[s]).collect())
        .unwrap();
    h
}

/// Set partitions of `0..n` as block-index vectors (canonical growth order).
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &out {
            let blocks = p.iter().max().map_or(0, |m| m + 1);
            for b in 0..=blocks {
                let mut q = p.clone();
                q.push(b);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Tree-width by trying every elimination ordering.
pub fn treewidth_bruteforce(g: &CGraph) -> usize {
    let n = g.vertex_count();
    if n == 0 {
        return 0;
    }
    let base = g.adjacency();
    permutations(n)
        .into_iter()
        .map(|order| {
            let mut adj = base.clone();
            let mut gone = vec![false; n];
            let mut width = 0;
            for &v in &order {
                let nb: Vec<usize> = adj[v].iter().copied().filter(|&w| !gone[w]).collect();
                width = width.max(nb.len());
                for &a in &nb {
                    for &b in &nb {
                        if a != b {
                            adj[a].insert(b);
                        }
                    }
                }
                gone[v] = true;
            }
            width
        })
        .min()
        .unwrap()
}

pub mod sids {
    use slrkit_core::graph::{Alphabet, Label};
    use slrkit_core::slr::{Rule, Sid, SlrFormula as F};

    pub fn alphabet(labels: &[(&str, usize)]) -> Alphabet {
        Alphabet::from_labels(labels.iter().map(|&(n, a)| Label::new(n, a))).unwrap()
    }

    pub fn ladder() -> Sid {
        Sid::new(
            alphabet(&[("b", 2), ("c", 2)]),
            vec![
                Rule::new(
                    "A",
                    &[],
                    F::exists(
                        &["y1", "y2", "y3"],
                        F::sep([
                            F::rel("b", &["y1", "y2"]),
                            F::rel("c", &["y3", "y2"]),
                            F::pred("B", &["y1", "y3"]),
                        ]),
                    ),
                ),
                Rule::new(
                    "B",
                    &["x1", "x2"],
                    F::exists(
                        &["y"],
                        F::sep([
                            F::rel("b", &["x1", "x2"]),
                            F::rel("c", &["y", "x2"]),
                            F::pred("B", &["x1", "y"]),
                        ]),
                    ),
                ),
                Rule::new("B", &["x1", "x2"], F::rel("b", &["x1", "x2"])),
            ],
        )
        .unwrap()
    }

    fn fan_with(c_body: Vec<F>) -> Sid {
        Sid::new(
            alphabet(&[("b", 2), ("c", 2)]),
            vec![
                Rule::new("A", &[], F::exists(&["y1"], F::pred("B", &["y1"]))),
                Rule::new(
                    "B",
                    &["x1"],
                    F::sep([F::pred("B", &["x1"]), F::pred("C", &["x1"])]),
                ),
                Rule::new("B", &["x1"], F::pred("C", &["x1"])),
                Rule::new("C", &["x1"], F::exists(&["y1", "y2"], F::sep(c_body))),
            ],
        )
        .unwrap()
    }

    pub fn fan() -> Sid {
        fan_with(vec![F::rel("b", &["x1", "y1"]), F::rel("c", &["y1", "y2"])])
    }

    pub fn fan_rigid() -> Sid {
        fan_with(vec![
            F::rel("b", &["x1", "y1"]),
            F::rel("c", &["y1", "y2"]),
            F::rel("b", &["y1", "y1"]),
            F::rel("b", &["y2", "y2"]),
        ])
    }
}

pub mod random_sid {
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;
    use slrkit_core::slr::{Rule, Sid, SlrFormula as F};

    use super::sids::alphabet;

    fn call(rng: &mut ChaCha8Rng, unary: &[String], binary: &[String], x: &str, y: &str) -> F {
        if !binary.is_empty() && rng.gen_bool(0.4) {
            F::pred(&binary[rng.gen_range(0..binary.len())], &[x, y])
        } else {
            F::pred(&unary[rng.gen_range(0..unary.len())], &[y])
        }
    }

    /// A random regular SID with nullary root `A`, productive predicates
    /// `P{i}` (unary) and `R{i}` (binary), and unproductive unary `U{i}`.
    pub fn random_regular(rng: &mut ChaCha8Rng) -> Sid {
        let np = rng.gen_range(1..=2);
        let nr = rng.gen_range(0..=1);
        let nu = rng.gen_range(0..=1);
        let ps: Vec<String> = (0..np).map(|i| format!("P{i}")).collect();
        let rs: Vec<String> = (0..nr).map(|i| format!("R{i}")).collect();
        let us: Vec<String> = (0..nu).map(|i| format!("U{i}")).collect();
        let callable: Vec<String> = ps.iter().chain(&us).cloned().collect();
        let mut rules = Vec::new();
        for _ in 0..rng.gen_range(1..=2) {
            let c = call(rng, &callable, &rs, "y1", "y2");
            rules.push(Rule::new(
                "A",
                &[],
                F::exists(&["y1", "y2"], F::sep([F::rel("b", &["y1", "y2"]), c])),
            ));
        }
        for p in &ps {
            rules.push(Rule::new(p, &["x1"], F::rel("c", &["x1"])));
            for _ in 0..rng.gen_range(0..=2) {
                let mut parts = vec![F::rel("b", &["x1", "y"])];
                for _ in 0..rng.gen_range(1..=2) {
                    parts.push(call(rng, &callable, &rs, "x1", "y"));
                }
                rules.push(Rule::new(p, &["x1"], F::exists(&["y"], F::sep(parts))));
            }
        }
        for r in &rs {
            rules.push(Rule::new(r, &["x1", "x2"], F::rel("b", &["x1", "x2"])));
            if rng.gen_bool(0.7) {
                let c = call(rng, &callable, &rs, "x1", "y");
                rules.push(Rule::new(
                    r,
                    &["x1", "x2"],
                    F::exists(
                        &["y"],
                        F::sep([F::rel("b", &["x1", "y"]), F::rel("b", &["y", "x2"]), c]),
                    ),
                ));
            }
        }
        for u in &us {
            let q = &ps[rng.gen_range(0..ps.len())];
            rules.push(Rule::new(u, &["x1"], F::pred(q, &["x1"])));
            if rng.gen_bool(0.6) {
                let q2 = &ps[rng.gen_range(0..ps.len())];
                rules.push(Rule::new(
                    u,
                    &["x1"],
                    F::sep([F::pred(u, &["x1"]), F::pred(q2, &["x1"])]),
                ));
            }
            if rng.gen_bool(0.4) {
                let (a, b) = (&ps[0], &ps[ps.len() - 1]);
                rules.push(Rule::new(
                    u,
                    &["x1"],
                    F::sep([F::pred(a, &["x1"]), F::pred(b, &["x1"])]),
                ));
            }
        }
        Sid::new(alphabet(&[("b", 2), ("c", 1)]), rules).unwrap()
    }
}
