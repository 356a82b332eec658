mod common;

use common::sids::alphabet;
use common::{graph, random_simple, shuffled};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slrkit_core::graph::{fission_1, fission_k, CGraph, IsoSet, Label};
use slrkit_core::mso::{
    apply_transduction, fission_scheme, mso_eval, EdgeSlot, Element, MsoError, MsoFormula as M,
    MsoStore, MsoValue, TransductionScheme,
};

fn holds(g: &CGraph, phi: &M) -> bool {
    mso_eval(g, &MsoStore::new(), phi).unwrap()
}

fn reach(x: &str, y: &str) -> M {
    M::forall_set(
        "R",
        M::implies(
            M::and([
                M::member("R", x),
                M::forall(
                    "u",
                    M::forall(
                        "v",
                        M::implies(
                            M::and([M::member("R", "u"), M::rel("e", &["u", "v"])]),
                            M::member("R", "v"),
                        ),
                    ),
                ),
            ]),
            M::member("R", y),
        ),
    )
}

/// A ring of `c`-vertices with attached non-`c` vertices, read over vertices.
fn hamiltonian() -> M {
    M::and([
        M::forall(
            "x",
            M::exists_unique("y", M::and([M::rel("e", &["y", "x"]), M::rel("c", &["y"])])),
        ),
        M::forall(
            "x",
            M::implies(
                M::rel("c", &["x"]),
                M::exists_unique("y", M::and([M::rel("e", &["x", "y"]), M::rel("c", &["y"])])),
            ),
        ),
        M::forall(
            "x",
            M::implies(
                M::not(M::rel("c", &["x"])),
                M::not(M::exists("y", M::rel("e", &["x", "y"]))),
            ),
        ),
        M::exists("x", M::forall("y", reach("x", "y"))),
    ])
    .over_vertices()
}

fn bipartite_parts() -> Vec<M> {
    let closed = |a: &str, b: &str| {
        M::forall(
            "x",
            M::forall(
                "y",
                M::implies(
                    M::and([M::member(a, "x"), M::rel("e", &["x", "y"])]),
                    M::member(b, "y"),
                ),
            ),
        )
    };
    vec![
        M::not(M::exists(
            "x",
            M::and([M::member("X", "x"), M::member("Y", "x")]),
        )),
        closed("X", "Y"),
        closed("Y", "X"),
    ]
}

fn bipartite() -> M {
    M::exists_set("X", M::exists_set("Y", M::and(bipartite_parts())))
}

/// Also requires every vertex to lie in `X` or `Y`.
fn bipartite_covering() -> M {
    let mut parts = bipartite_parts();
    parts.push(M::forall(
        "x",
        M::or([M::member("X", "x"), M::member("Y", "x")]),
    ));
    M::exists_set("X", M::exists_set("Y", M::and(parts))).over_vertices()
}

fn ring(n: usize) -> CGraph {
    let mut edges: Vec<(&str, Vec<usize>)> = (0..n).map(|i| ("c", vec![i])).collect();
    edges.extend((0..n).map(|i| ("e", vec![i, (i + 1) % n])));
    let refs: Vec<(&str, &[usize])> = edges.iter().map(|(l, a)| (*l, a.as_slice())).collect();
    graph(n, &refs)
}

fn with_edges(g: &CGraph, extra_vertices: usize, edges: &[(&str, &[usize])]) -> CGraph {
    let mut h = g.clone();
    for i in 0..extra_vertices {
        h.add_vertex(format!("w{i}")).unwrap();
    }
    for (i, (l, att)) in edges.iter().enumerate() {
        h.add_edge(format!("f{i}"), Label::new(*l, att.len()), att.to_vec())
            .unwrap();
    }
    h
}

fn complete_bipartite(n: usize, m: usize) -> CGraph {
    let edges: Vec<Vec<usize>> = (0..n)
        .flat_map(|i| (0..m).map(move |j| vec![i, n + j]))
        .collect();
    let refs: Vec<(&str, &[usize])> = edges.iter().map(|a| ("e", a.as_slice())).collect();
    graph(n + m, &refs)
}

#[test]
fn evaluation_examples() {
    assert!(!holds(&CGraph::new(), &M::exists("x", M::eq("x", "x"))));
    assert!(holds(&CGraph::new(), &M::forall("x", M::ff())));
    let g = graph(2, &[("e", &[0, 1])]);
    assert!(holds(
        &g,
        &M::exists(
            "x",
            M::exists("y", M::exists("z", M::edg("e", &["x", "y", "z"])))
        )
    ));
    let count = |phi: &M| {
        let mut k = 0;
        for v in 0..3 {
            let el = if v < 2 {
                Element::Vertex(v)
            } else {
                Element::Edge(0)
            };
            let s = MsoStore::from([("x".to_string(), MsoValue::Element(el))]);
            if mso_eval(&g, &s, phi).unwrap() {
                k += 1;
            }
        }
        k
    };
    // first-order variables range over vertices and edges
    assert_eq!(count(&M::tt()), 3);
    assert!(holds(
        &g,
        &M::exists_unique("x", M::not(M::vert(&alphabet(&[("e", 2)]), "x")))
    ));
    assert_eq!(
        count(&M::exists(
            "y",
            M::exists("z", M::edg("e", &["x", "y", "z"]))
        )),
        1
    );
    assert_eq!(count(&M::rel("e", &["x", "x"])), 0);
    let s = MsoStore::from([
        (
            "X".to_string(),
            MsoValue::Set([Element::Vertex(1), Element::Edge(0)].into()),
        ),
        ("x".to_string(), MsoValue::Element(Element::Edge(0))),
    ]);
    assert!(mso_eval(&g, &s, &M::member("X", "x")).unwrap());
    assert_eq!(
        mso_eval(&g, &MsoStore::new(), &M::member("X", "x")),
        Err(MsoError::UnboundVariable("X".into()))
    );
    assert_eq!(
        mso_eval(
            &g,
            &MsoStore::new(),
            &M::and([M::member("x", "y"), M::eq("x", "y")])
        ),
        Err(MsoError::KindMismatch("x".into()))
    );
}

#[test]
fn hamiltonian_vectors() {
    let h = hamiltonian();
    for n in 3..=5 {
        assert!(holds(&ring(n), &h), "ring {n}");
    }
    // attached non-c vertices are allowed
    assert!(holds(&with_edges(&ring(3), 1, &[("e", &[0, 3])]), &h));
    let crafted = [
        with_edges(&ring(3), 1, &[("e", &[0, 3]), ("e", &[3, 1])]),
        {
            let mut edges: Vec<(&str, Vec<usize>)> = (0..6).map(|i| ("c", vec![i])).collect();
            edges.extend((0..3).map(|i| ("e", vec![i, (i + 1) % 3])));
            edges.extend((0..3).map(|i| ("e", vec![3 + i, 3 + (i + 1) % 3])));
            let refs: Vec<(&str, &[usize])> =
                edges.iter().map(|(l, a)| (*l, a.as_slice())).collect();
            graph(6, &refs)
        },
        graph(
            3,
            &[
                ("c", &[0]),
                ("c", &[1]),
                ("c", &[2]),
                ("e", &[0, 1]),
                ("e", &[1, 2]),
            ],
        ),
        graph(
            4,
            &[
                ("c", &[0]),
                ("c", &[1]),
                ("c", &[2]),
                ("e", &[0, 1]),
                ("e", &[1, 2]),
                ("e", &[2, 3]),
                ("e", &[3, 0]),
            ],
        ),
        with_edges(&ring(3), 0, &[("e", &[0, 2])]),
    ];
    for (i, g) in crafted.iter().enumerate() {
        assert!(!holds(g, &h), "crafted {i}");
    }
}

#[test]
fn bipartite_vectors() {
    for n in 1..=3 {
        for m in 1..=3 {
            let k = complete_bipartite(n, m);
            assert!(holds(&k, &bipartite().over_vertices()), "K{n},{m}");
            assert!(holds(&k, &bipartite_covering()), "K{n},{m}");
        }
    }
    // desugared atoms with quantifiers over vertices and edges
    assert!(holds(&complete_bipartite(2, 3), &bipartite().desugar()));
    let odd = graph(3, &[("e", &[0, 1]), ("e", &[1, 2]), ("e", &[2, 0])]);
    assert!(holds(&odd, &bipartite().over_vertices()));
    assert!(!holds(&odd, &bipartite_covering()));
    let even = graph(
        4,
        &[
            ("e", &[0, 1]),
            ("e", &[1, 2]),
            ("e", &[2, 3]),
            ("e", &[3, 0]),
        ],
    );
    assert!(holds(&even, &bipartite_covering()));
}

#[test]
fn desugared_atoms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let g = {
            let n = rng.gen_range(0..4);
            random_simple(&mut rng, n, 5, &[("e", 2), ("c", 1)])
        };
        let phi = M::forall(
            "x",
            M::implies(
                M::rel("c", &["x"]),
                M::exists(
                    "y",
                    M::or([M::rel("e", &["x", "y"]), M::rel("e", &["y", "x"])]),
                ),
            ),
        )
        .over_vertices();
        assert_eq!(holds(&g, &phi), holds(&g, &phi.desugar()));
    }
}

fn random_formula(
    rng: &mut ChaCha8Rng,
    fo: &mut Vec<String>,
    so: &mut Vec<String>,
    depth: usize,
) -> M {
    let pick = |rng: &mut ChaCha8Rng, v: &[String]| v[rng.gen_range(0..v.len())].clone();
    let choice = if depth == 0 {
        rng.gen_range(0..4)
    } else {
        rng.gen_range(0..9)
    };
    match choice {
        0 if fo.len() >= 2 => M::eq(&pick(rng, fo), &pick(rng, fo)),
        0 | 1 => {
            let x = pick(rng, fo);
            let y = pick(rng, fo);
            let z = pick(rng, fo);
            if rng.gen_bool(0.5) {
                M::edg("b", &[&x, &y, &z])
            } else {
                M::edg("c", &[&x, &y])
            }
        }
        2 if !so.is_empty() => M::member(&pick(rng, so), &pick(rng, fo)),
        2 | 3 => M::rel("b", &[&pick(rng, fo), &pick(rng, fo)]),
        4 => M::not(random_formula(rng, fo, so, depth - 1)),
        5 => M::and([
            random_formula(rng, fo, so, depth - 1),
            random_formula(rng, fo, so, depth - 1),
        ]),
        6 | 7 => {
            let v = format!("x{}", fo.len());
            fo.push(v.clone());
            let body = random_formula(rng, fo, so, depth - 1);
            fo.pop();
            if choice == 6 {
                M::exists(&v, body)
            } else {
                M::forall(&v, body)
            }
        }
        _ => {
            let v = format!("X{}", so.len());
            so.push(v.clone());
            let body = random_formula(rng, fo, so, depth - 1);
            so.pop();
            M::exists_set(&v, body)
        }
    }
}

fn random_sentence(rng: &mut ChaCha8Rng) -> M {
    let mut fo = vec!["x0".to_string()];
    let body = random_formula(rng, &mut fo, &mut Vec::new(), 4);
    M::exists("x0", body)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn evaluation_is_isomorphism_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = { let n = rng.gen_range(1..4); random_simple(&mut rng, n, 4, &[("b", 2), ("c", 1)]) };
        let h = shuffled(&mut rng, &g);
        let phi = random_sentence(&mut rng);
        prop_assert_eq!(holds(&g, &phi), holds(&h, &phi), "{}", phi);
    }

    #[test]
    fn negation_and_quantifier_duality(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = { let n = rng.gen_range(0..4); random_simple(&mut rng, n, 4, &[("b", 2), ("c", 1)]) };
        let phi = random_sentence(&mut rng);
        let double = M::Not(Box::new(M::Not(Box::new(phi.clone()))));
        prop_assert_eq!(holds(&g, &double), holds(&g, &phi));
        let mut fo = vec!["x0".to_string()];
        let body = random_formula(&mut rng, &mut fo, &mut Vec::new(), 3);
        let each: Vec<bool> = (0..g.vertex_count() + g.edge_count())
            .map(|i| {
                let el = if i < g.vertex_count() { Element::Vertex(i) } else { Element::Edge(i - g.vertex_count()) };
                let s = MsoStore::from([("x0".to_string(), MsoValue::Element(el))]);
                mso_eval(&g, &s, &body).unwrap()
            })
            .collect();
        prop_assert_eq!(holds(&g, &M::forall("x0", body.clone())), each.iter().all(|&b| b));
        prop_assert_eq!(holds(&g, &M::exists("x0", body.clone())), each.iter().any(|&b| b));
        let dual = M::Not(Box::new(M::exists("x0", M::Not(Box::new(body.clone())))));
        prop_assert_eq!(holds(&g, &dual), holds(&g, &M::forall("x0", body)));
    }
}

fn two_labels() -> slrkit_core::graph::Alphabet {
    alphabet(&[("b", 2), ("c", 1)])
}

/// All simple graphs over `b/2`, `c/1` with `n` vertices and at most
/// `max_edges` edges.
fn all_graphs(n: usize, max_edges: usize) -> Vec<CGraph> {
    let mut slots: Vec<(&str, Vec<usize>)> = (0..n).map(|i| ("c", vec![i])).collect();
    for i in 0..n {
        for j in 0..n {
            slots.push(("b", vec![i, j]));
        }
    }
    let mut out = Vec::new();
    for mask in 0u32..1 << slots.len() {
        if mask.count_ones() as usize > max_edges {
            continue;
        }
        let chosen: Vec<(&str, &[usize])> = slots
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, (l, a))| (*l, a.as_slice()))
            .collect();
        out.push(graph(n, &chosen));
    }
    out
}

#[test]
fn scheme_examples() {
    let ab = two_labels();
    let g = graph(3, &[("b", &[0, 1]), ("c", &[2]), ("b", &[2, 2])]);
    let id = apply_transduction(&TransductionScheme::identity(&ab), &g).unwrap();
    assert_eq!(id.len(), 1);
    assert!(id.contains(&g));
    let mut empty = TransductionScheme::identity(&ab);
    empty.domain = M::exists("x", M::not(M::eq("x", "x")));
    assert!(apply_transduction(&empty, &g).unwrap().is_empty());
    let mut twice = TransductionScheme::identity(&ab);
    twice.edges.insert(
        EdgeSlot::new("b", &[1, 1, 1]),
        M::exists("y", M::edg("b", &["x1", "y", "x3"])),
    );
    assert!(matches!(
        apply_transduction(&twice, &g),
        Err(MsoError::NonFunctionalScheme { .. })
    ));
    let other = graph(1, &[("a", &[0])]);
    assert_eq!(
        apply_transduction(&TransductionScheme::identity(&ab), &other),
        Err(MsoError::AlphabetMismatch("a".into()))
    );
    let mut unknown = TransductionScheme::identity(&ab);
    unknown.layers[0] = M::member("Z", "x1");
    assert!(matches!(
        apply_transduction(&unknown, &g),
        Err(MsoError::InvalidScheme(_))
    ));
    let theta = fission_scheme(&ab);
    assert!(apply_transduction(&theta, &CGraph::new())
        .unwrap()
        .is_empty());
    let unary = alphabet(&[("a", 1)]);
    let a = graph(1, &[("a", &[0])]);
    let out = apply_transduction(&fission_scheme(&unary), &a).unwrap();
    assert!(out.same_classes(&fission_1(&a)));
    assert_eq!(out.len(), 1);
}

#[test]
fn fission_scheme_matches_fission_exhaustively() {
    let theta = fission_scheme(&two_labels());
    let mut checked = 0;
    for n in 0..=3 {
        for g in all_graphs(n, 3) {
            let out = apply_transduction(&theta, &g).unwrap();
            assert!(out.same_classes(&fission_1(&g)), "{g:?}");
            checked += 1;
        }
    }
    assert!(checked > 300);
}

#[test]
fn fission_scheme_matches_fission_random() {
    let theta = fission_scheme(&two_labels());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let g = {
            let n = rng.gen_range(1..=4);
            random_simple(&mut rng, n, 5, &[("b", 2), ("c", 1)])
        };
        let out = apply_transduction(&theta, &g).unwrap();
        assert!(out.same_classes(&fission_1(&g)), "{g:?}");
    }
}

fn apply_all(theta: &TransductionScheme, set: &IsoSet) -> IsoSet {
    let mut out = IsoSet::new();
    for g in set.iter() {
        out.extend(apply_transduction(theta, g).unwrap().into_graphs());
    }
    out
}

#[test]
fn iterated_scheme_matches_fission_k() {
    let theta = fission_scheme(&two_labels());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut graphs = all_graphs(2, 2);
    graphs.extend((0..10).map(|_| {
        let n = rng.gen_range(3..=4);
        random_simple(&mut rng, n, 3, &[("b", 2), ("c", 1)])
    }));
    for g in graphs {
        let once: IsoSet = apply_transduction(&theta, &g).unwrap();
        let twice = apply_all(&theta, &once);
        assert!(twice.same_classes(&fission_k(&g, 2)), "{g:?}");
    }
}

/// Properties of the outputs pull back to the inputs: some output has an
/// isolated vertex iff some fission of the input has one.
#[test]
fn backwards_translation_instances() {
    let theta = fission_scheme(&two_labels());
    let isolated = M::exists(
        "x",
        M::and([
            M::vert(&two_labels(), "x"),
            M::not(M::exists(
                "e",
                M::or([
                    M::incid("b", 2, 1, "e", "x"),
                    M::incid("b", 2, 2, "e", "x"),
                    M::incid("c", 1, 1, "e", "x"),
                ]),
            )),
        ]),
    );
    let mut via_scheme = Vec::new();
    let mut via_fission = Vec::new();
    for g in all_graphs(2, 3) {
        via_scheme.push(
            apply_transduction(&theta, &g)
                .unwrap()
                .iter()
                .any(|h| holds(h, &isolated)),
        );
        via_fission.push(fission_1(&g).iter().any(|h| holds(h, &isolated)));
    }
    assert_eq!(via_scheme, via_fission);
    assert!(via_scheme.iter().all(|&b| b));
    let loopy = M::exists("e", M::exists("x", M::edg("b", &["e", "x", "x"])));
    for g in all_graphs(2, 2) {
        let outs = apply_transduction(&theta, &g).unwrap();
        if outs.iter().any(|h| holds(h, &loopy)) {
            assert!(holds(&g, &loopy));
        }
    }
}

#[test]
fn formula_display_and_checks() {
    let ab = two_labels();
    let phi = M::forall("x", M::exists("y", M::edg("b", &["y", "x", "x"])));
    assert_eq!(phi.to_string(), "forall x . exists y . edg_b(y, x, x)");
    assert!(phi.check(&ab).is_ok());
    assert!(matches!(
        M::edg("b", &["y", "x"]).check(&ab),
        Err(MsoError::Arity { .. })
    ));
    assert!(matches!(
        M::edg("q", &["y"]).check(&ab),
        Err(MsoError::UnknownLabel(_))
    ));
    let renamed = M::exists("y", M::eq("x", "y")).rename_free("x", "y");
    let g = graph(2, &[]);
    let s = MsoStore::from([("y".to_string(), MsoValue::Element(Element::Vertex(0)))]);
    assert!(mso_eval(&g, &s, &renamed).unwrap());
    assert_eq!(
        renamed.free_vars().keys().cloned().collect::<Vec<_>>(),
        vec!["y".to_string()]
    );
}
