mod common;

use common::sids::{alphabet, fan, fan_rigid, ladder};
use common::{graph, random_simple, shuffled};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slrkit_core::graph::{isomorphic, CGraph, IsoSet};
use slrkit_core::slr::{
    default_fuel, enumerate_models_bruteforce, equality_eliminate, is_equality_free, sat_qpf,
    slr_models, Rule, Sid, SlrError, SlrFormula as F, Store, Verdict,
};

fn holds(g: &CGraph, phi: &F, sid: &Sid) -> bool {
    slr_models(g, &Store::new(), phi, sid, default_fuel(g, sid)).unwrap() == Verdict::True
}

fn empty_sid() -> Sid {
    Sid::new(alphabet(&[("b", 2), ("c", 2)]), vec![]).unwrap()
}

#[test]
fn qpf_examples() {
    let dup = F::sep([F::rel("b", &["x", "y"]), F::rel("b", &["x", "y"])]);
    assert!(sat_qpf(&dup).unwrap().is_none());

    let (g, s) = sat_qpf(&F::sep([F::rel("b", &["x", "y"]), F::neq("x", "y")]))
        .unwrap()
        .unwrap();
    assert_eq!((g.vertex_count(), g.edge_count()), (2, 1));
    assert_ne!(s["x"], s["y"]);

    let (g, s) = sat_qpf(&F::sep([F::eq("x", "y"), F::rel("b", &["x", "y"])]))
        .unwrap()
        .unwrap();
    assert_eq!(g.vertex_count(), 1);
    assert_eq!(g.edges()[0].attach, vec![0, 0]);
    assert_eq!(s["x"], s["y"]);

    assert!(sat_qpf(&F::sep([F::eq("x", "y"), F::neq("y", "x")]))
        .unwrap()
        .is_none());
    assert!(matches!(sat_qpf(&F::pred("A", &[])), Err(SlrError::NotQpf)));
}

#[test]
fn qpf_model_satisfies_formula() {
    let phi = F::sep([
        F::rel("b", &["x", "y"]),
        F::rel("c", &["y", "z"]),
        F::neq("x", "w"),
        F::eq("z", "u"),
    ]);
    let (g, s) = sat_qpf(&phi).unwrap().unwrap();
    let distinct: std::collections::BTreeSet<_> =
        ["x", "y", "z", "w"].iter().map(|v| &s[*v]).collect();
    assert_eq!(distinct.len(), 4);
    assert_eq!(
        slr_models(&g, &s, &phi, &empty_sid(), 0).unwrap(),
        Verdict::True
    );
}

#[test]
fn slr_models_examples() {
    let sid = empty_sid();
    let b = graph(2, &[("b", &[0, 1])]);
    let exy = F::exists(&["x", "y"], F::rel("b", &["x", "y"]));
    assert!(holds(&b, &exy, &sid));
    let empty = CGraph::new();
    assert!(holds(&empty, &F::Emp, &sid));
    assert!(!holds(&empty, &exy, &sid));
    assert!(!holds(&empty, &F::exists(&["x"], F::Emp), &sid));
    assert!(!holds(&b, &F::Emp, &sid));

    let ladder_sid = ladder();
    let canon = graph(3, &[("b", &[0, 1]), ("c", &[2, 1]), ("b", &[0, 2])]);
    assert!(holds(&canon, &F::pred("A", &[]), &ladder_sid));
    let missing = graph(3, &[("b", &[0, 1]), ("c", &[2, 1])]);
    assert!(!holds(&missing, &F::pred("A", &[]), &ladder_sid));
}

#[test]
fn slr_models_store_and_separation() {
    let sid = empty_sid();
    let g = graph(3, &[("b", &[0, 1]), ("c", &[1, 2])]);
    let phi = F::sep([
        F::rel("b", &["x", "y"]),
        F::exists(&["z"], F::rel("c", &["y", "z"])),
    ]);
    let mut s = Store::new();
    s.insert("x".into(), "v0".into());
    s.insert("y".into(), "v1".into());
    assert_eq!(slr_models(&g, &s, &phi, &sid, 0).unwrap(), Verdict::True);
    s.insert("y".into(), "v2".into());
    assert_eq!(
        slr_models(&g, &s, &phi, &sid, 0).unwrap(),
        Verdict::FalseAtFuel
    );
    // the nested existential ranges over the right-hand part only
    let phi = F::sep([
        F::rel("b", &["x", "y"]),
        F::exists(&["z"], F::sep([F::eq("z", "x"), F::rel("c", &["y", "y"])])),
    ]);
    let g = graph(2, &[("b", &[0, 1]), ("c", &[1, 1])]);
    s.insert("y".into(), "v1".into());
    assert_eq!(
        slr_models(&g, &s, &phi, &sid, 0).unwrap(),
        Verdict::FalseAtFuel
    );
    // variables mapped outside the graph
    s.insert("w".into(), "elsewhere".into());
    let phi = F::sep([
        F::rel("b", &["x", "y"]),
        F::neq("w", "x"),
        F::rel("c", &["y", "y"]),
    ]);
    assert_eq!(slr_models(&g, &s, &phi, &sid, 0).unwrap(), Verdict::True);
    s.remove("w");
    assert!(matches!(
        slr_models(&g, &s, &phi, &sid, 0),
        Err(SlrError::UnboundVariable(_))
    ));
}

#[test]
fn slr_models_rejects_non_simple() {
    let g = graph(2, &[("b", &[0, 1]), ("b", &[0, 1])]);
    assert!(matches!(
        slr_models(&g, &Store::new(), &F::Emp, &empty_sid(), 1),
        Err(SlrError::NotSimple)
    ));
}

#[test]
fn fuel_bounds_unfoldings() {
    let ladder_sid = ladder();
    let g = graph(3, &[("b", &[0, 1]), ("c", &[2, 1]), ("b", &[0, 2])]);
    let a = F::pred("A", &[]);
    let s = Store::new();
    assert_eq!(
        slr_models(&g, &s, &a, &ladder_sid, 1).unwrap(),
        Verdict::FalseAtFuel
    );
    assert_eq!(
        slr_models(&g, &s, &a, &ladder_sid, 2).unwrap(),
        Verdict::True
    );
}

#[test]
fn bruteforce_examples() {
    let models = enumerate_models_bruteforce(&ladder(), "A", 3).unwrap();
    let canon = graph(3, &[("b", &[0, 1]), ("c", &[2, 1]), ("b", &[0, 2])]);
    assert!(models.contains(&canon));

    let emp = Sid::new(alphabet(&[("b", 2)]), vec![Rule::new("A", &[], F::Emp)]).unwrap();
    let models = enumerate_models_bruteforce(&emp, "A", 3).unwrap();
    assert_eq!(models.len(), 1);
    assert!(models.contains(&CGraph::new()));

    let unsat = Sid::new(
        alphabet(&[("b", 2)]),
        vec![Rule::new(
            "A",
            &[],
            F::exists(
                &["x"],
                F::sep([F::rel("b", &["x", "x"]), F::rel("b", &["x", "x"])]),
            ),
        )],
    )
    .unwrap();
    assert!(enumerate_models_bruteforce(&unsat, "A", 3)
        .unwrap()
        .is_empty());

    assert!(matches!(
        enumerate_models_bruteforce(&ladder(), "A", 7),
        Err(SlrError::TooLarge { .. })
    ));
    assert!(matches!(
        enumerate_models_bruteforce(&ladder(), "B", 3),
        Err(SlrError::NotNullary(_))
    ));
}

/// Every model of the ladder SID with `k` unfoldings of the recursive rule, built by hand.
fn ladder_chain(k: usize) -> CGraph {
    // vertices: 0 = y1, 1 = y2, 2 = y3, then one fresh vertex per unfolding
    let mut edges: Vec<(&str, Vec<usize>)> = vec![("b", vec![0, 1]), ("c", vec![2, 1])];
    let mut x2 = 2;
    for i in 0..k {
        let y = 3 + i;
        edges.push(("b", vec![0, x2]));
        edges.push(("c", vec![y, x2]));
        x2 = y;
    }
    edges.push(("b", vec![0, x2]));
    let owned: Vec<(&str, &[usize])> = edges.iter().map(|(l, a)| (*l, a.as_slice())).collect();
    graph(3 + k, &owned)
}

#[test]
fn bruteforce_ladder_contains_chains() {
    let models = enumerate_models_bruteforce(&ladder(), "A", 5).unwrap();
    for k in 0..3 {
        assert!(models.contains(&ladder_chain(k)), "chain {k}");
    }
    for g in models.iter() {
        assert!(g.is_simple());
        assert!(g.vertex_count() <= 5);
    }
}

/// Edge deletions and single-edge additions of known models are accepted by the
/// checker exactly when the generator produced them.
fn neighbourhood_agrees(sid: &Sid, n: usize, labels: &[(&str, usize)]) {
    let models = enumerate_models_bruteforce(sid, "A", n).unwrap();
    let a = F::pred("A", &[]);
    let mut probes: Vec<CGraph> = Vec::new();
    for g in models.iter() {
        let ne = g.edge_count();
        for drop in 0..ne {
            let kept: Vec<(&str, &[usize])> = g
                .edges()
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != drop)
                .map(|(_, e)| (e.label.name.as_str(), e.attach.as_slice()))
                .collect();
            let h = graph(g.vertex_count(), &kept);
            if h.isolated_vertices().is_empty() {
                probes.push(h);
            }
        }
        let nv = g.vertex_count();
        for &(l, ar) in labels {
            assert_eq!(ar, 2);
            for u in 0..nv {
                for v in 0..nv {
                    let mut es: Vec<(&str, Vec<usize>)> = g
                        .edges()
                        .iter()
                        .map(|e| (e.label.name.as_str(), e.attach.clone()))
                        .collect();
                    if es.iter().any(|(x, at)| *x == l && *at == vec![u, v]) {
                        continue;
                    }
                    es.push((l, vec![u, v]));
                    let owned: Vec<(&str, &[usize])> =
                        es.iter().map(|(x, at)| (*x, at.as_slice())).collect();
                    probes.push(graph(nv, &owned));
                }
            }
        }
    }
    let mut accepted = 0;
    for h in &probes {
        if h.vertex_count() > n {
            continue;
        }
        let ok = holds(h, &a, sid);
        assert_eq!(ok, models.contains(h), "disagreement on {h:?}");
        accepted += ok as usize;
    }
    assert!(!probes.is_empty());
    let _ = accepted;
}

#[test]
fn bruteforce_agrees_with_checker_ladder() {
    neighbourhood_agrees(&ladder(), 4, &[("b", 2), ("c", 2)]);
}

#[test]
fn bruteforce_agrees_with_checker_fan() {
    neighbourhood_agrees(&fan(), 5, &[("b", 2), ("c", 2)]);
    neighbourhood_agrees(&fan_rigid(), 5, &[("b", 2), ("c", 2)]);
}

#[test]
fn bruteforce_agrees_with_checker_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for sid in [ladder(), fan()] {
        let models = enumerate_models_bruteforce(&sid, "A", 4).unwrap();
        for _ in 0..400 {
            let n = 1 + (rand::Rng::gen_range(&mut rng, 0..4));
            let g = random_simple(&mut rng, n, 6, &[("b", 2), ("c", 2)]);
            if !g.isolated_vertices().is_empty() {
                continue;
            }
            assert_eq!(holds(&g, &F::pred("A", &[]), &sid), models.contains(&g));
        }
    }
}

#[test]
fn fan_models() {
    let models = enumerate_models_bruteforce(&fan(), "A", 5).unwrap();
    // one C: b(r,y1) c(y1,y2), with y1, y2 free to coincide with r or each other
    assert!(models.contains(&graph(3, &[("b", &[0, 1]), ("c", &[1, 2])])));
    assert!(models.contains(&graph(1, &[("b", &[0, 0]), ("c", &[0, 0])])));
    assert!(models.contains(&graph(
        5,
        &[
            ("b", &[0, 1]),
            ("c", &[1, 2]),
            ("b", &[0, 3]),
            ("c", &[3, 4])
        ]
    )));
    for g in models.iter() {
        let b = g.edges().iter().filter(|e| e.label.name == "b").count();
        let c = g.edges().iter().filter(|e| e.label.name == "c").count();
        assert_eq!(b, c);
    }
}

fn eq_sids() -> Vec<Sid> {
    let ab = alphabet(&[("b", 2), ("c", 1)]);
    vec![
        // aliasing parameters
        Sid::new(
            ab.clone(),
            vec![
                Rule::new(
                    "A",
                    &[],
                    F::exists(
                        &["u", "v"],
                        F::sep([F::rel("b", &["u", "v"]), F::pred("B", &["u", "v"])]),
                    ),
                ),
                Rule::new(
                    "B",
                    &["x1", "x2"],
                    F::sep([F::eq("x1", "x2"), F::rel("c", &["x1"])]),
                ),
                Rule::new(
                    "B",
                    &["x1", "x2"],
                    F::sep([F::neq("x1", "x2"), F::rel("c", &["x2"])]),
                ),
            ],
        )
        .unwrap(),
        // equalities between existentials
        Sid::new(
            ab.clone(),
            vec![Rule::new(
                "A",
                &[],
                F::exists(
                    &["y", "z"],
                    F::sep([F::eq("y", "z"), F::rel("b", &["y", "z"])]),
                ),
            )],
        )
        .unwrap(),
        // aliasing through recursion and repeated arguments
        Sid::new(
            ab.clone(),
            vec![
                Rule::new(
                    "A",
                    &[],
                    F::exists(
                        &["u"],
                        F::sep([F::rel("c", &["u"]), F::pred("P", &["u", "u"])]),
                    ),
                ),
                Rule::new(
                    "A",
                    &[],
                    F::exists(
                        &["u", "v"],
                        F::sep([F::rel("b", &["v", "u"]), F::pred("P", &["u", "v"])]),
                    ),
                ),
                Rule::new(
                    "P",
                    &["x1", "x2"],
                    F::exists(
                        &["y"],
                        F::sep([F::rel("b", &["x1", "y"]), F::pred("Q", &["y", "x2"])]),
                    ),
                ),
                Rule::new(
                    "Q",
                    &["x1", "x2"],
                    F::sep([F::eq("x1", "x2"), F::rel("c", &["x2"])]),
                ),
                Rule::new("Q", &["x1", "x2"], F::rel("b", &["x2", "x1"])),
            ],
        )
        .unwrap(),
    ]
}

#[test]
fn equality_elimination_examples() {
    let sid = &eq_sids()[1];
    let out = equality_eliminate(sid);
    assert!(is_equality_free(&out));
    assert_eq!(out.rules().len(), 1);
    assert_eq!(out.rules()[0].to_string(), "A() <= exists y . b(y,y)");

    let ladder_sid = ladder();
    assert_eq!(equality_eliminate(&ladder_sid), ladder_sid);

    let out = equality_eliminate(&eq_sids()[0]);
    assert!(out.predicates().contains_key("B_eq_00"));
    assert!(out
        .rules()
        .iter()
        .any(|r| r.head == "A" && r.body.to_string().contains("B_eq_00(")));
}

#[test]
fn equality_elimination_preserves_models() {
    for (i, sid) in eq_sids().iter().enumerate() {
        let out = equality_eliminate(sid);
        assert!(is_equality_free(&out), "sid {i}:\n{out}");
        for n in 1..=4 {
            let before = enumerate_models_bruteforce(sid, "A", n).unwrap();
            let after = enumerate_models_bruteforce(&out, "A", n).unwrap();
            assert!(!before.is_empty() || n < 2, "sid {i} has no models");
            assert!(before == after, "sid {i}, n = {n}:\n{out}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn models_are_iso_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sid = ladder();
        let models = enumerate_models_bruteforce(&sid, "A", 4).unwrap();
        let picked = models.iter().nth((seed as usize) % models.len()).unwrap().clone();
        let h = shuffled(&mut rng, &picked);
        prop_assert!(isomorphic(&picked, &h).is_some());
        prop_assert!(holds(&h, &F::pred("A", &[]), &sid));
        let g = random_simple(&mut rng, 3, 5, &[("b", 2), ("c", 2)]);
        if g.isolated_vertices().is_empty() {
            let h = shuffled(&mut rng, &g);
            prop_assert_eq!(holds(&g, &F::pred("A", &[]), &sid), holds(&h, &F::pred("A", &[]), &sid));
        }
    }

    #[test]
    fn accepted_graphs_are_simple_models(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_simple(&mut rng, 3, 4, &[("b", 2), ("c", 2)]);
        let sid = fan();
        let all: IsoSet = enumerate_models_bruteforce(&sid, "A", 3).unwrap();
        if holds(&g, &F::pred("A", &[]), &sid) {
            prop_assert!(g.is_simple());
            prop_assert!(all.contains(&g));
        }
    }
}
