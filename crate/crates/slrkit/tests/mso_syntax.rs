#[path = "../../core/tests/common/mod.rs"]
mod common;

use common::{graph, random_simple};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slrkit::{parse_mso, parse_mso_in, ParseErrorKind, Pos};
use slrkit_core::graph::{Alphabet, CGraph, Label};
use slrkit_core::mso::{mso_eval, MsoFormula as M, MsoStore};

fn data(name: &str) -> String {
    std::fs::read_to_string(format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

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
}

fn err(text: &str) -> (Pos, ParseErrorKind) {
    let e = parse_mso(text).unwrap_err();
    (e.pos, e.kind)
}

#[test]
fn simple_sentence() {
    let phi = parse_mso("forall x . exists y . edg_e(y, x, x)").unwrap();
    assert_eq!(
        phi,
        M::forall("x", M::exists("y", M::edg("e", &["y", "x", "x"])))
    );
    let g = graph(1, &[("e", &[0, 0])]);
    // `x` also ranges over the edge, and over vertices `y` is never an edge
    assert!(!holds(&g, &phi));
    assert!(!holds(&g, &phi.over_vertices()));
    let loops = parse_mso("forall x . vert(x) -> exists y . edg_e(y, x, x)").unwrap();
    assert!(holds(&g, &loops));
    assert!(!holds(&graph(2, &[("e", &[0, 0])]), &loops));
}

#[test]
fn fixture_files_match_constructors() {
    let doc = parse_mso_in(&data("hamiltonian.mso"), &Alphabet::new()).unwrap();
    assert_eq!(doc.formula, hamiltonian());
    assert_eq!(doc.alphabet.arity("e"), Some(2));
    assert_eq!(doc.alphabet.arity("c"), Some(1));

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
    let expected = M::exists_set(
        "X",
        M::exists_set(
            "Y",
            M::and([
                M::not(M::exists(
                    "x",
                    M::and([M::member("X", "x"), M::member("Y", "x")]),
                )),
                closed("X", "Y"),
                closed("Y", "X"),
            ]),
        ),
    );
    assert_eq!(parse_mso(&data("bipartite.mso")).unwrap(), expected);
}

#[test]
fn connectives_and_quantifiers() {
    let phi = parse_mso("a(x) -> b(x) -> c(x) | d(x) & !e(x) <-> f(x)").unwrap();
    let atom = |l: &str| M::rel(l, &["x"]);
    let expected = M::iff(
        M::implies(
            atom("a"),
            M::implies(
                atom("b"),
                M::or([atom("c"), M::and([atom("d"), M::not(atom("e"))])]),
            ),
        ),
        atom("f"),
    );
    assert_eq!(phi, expected);

    let phi = parse_mso("existsV x y . forallSV X . X(x) -> x = y | x != y").unwrap();
    let expected = M::Exists {
        var: "x".into(),
        sort: slrkit_core::mso::Sort::Vertex,
        body: Box::new(M::Exists {
            var: "y".into(),
            sort: slrkit_core::mso::Sort::Vertex,
            body: Box::new(M::not(M::ExistsSet {
                var: "X".into(),
                sort: slrkit_core::mso::Sort::Vertex,
                body: Box::new(M::not(M::implies(
                    M::member("X", "x"),
                    M::or([M::eq("x", "y"), M::not(M::eq("x", "y"))]),
                ))),
            })),
        }),
    };
    assert_eq!(phi, expected);
    assert_eq!(
        parse_mso("exists! x . a(x)").unwrap(),
        M::exists_unique("x", atom("a"))
    );
    assert_eq!(
        parse_mso("true & !false").unwrap(),
        M::and([M::tt(), M::not(M::ff())])
    );
}

#[test]
fn builtins_match_constructors() {
    let alphabet = Alphabet::from_labels([Label::new("e", 2), Label::new("c", 1)]).unwrap();
    let cases = [
        ("existsS X . single(X)", M::exists_set("X", M::single("X"))),
        (
            "exists x . vert(x) & c(x)",
            M::exists("x", M::and([M::vert(&alphabet, "x"), M::rel("c", &["x"])])),
        ),
        (
            "exists x y . incid_e_2(x, y)",
            M::exists("x", M::exists("y", M::incid("e", 2, 2, "x", "y"))),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (text, expected) in cases {
        let doc = parse_mso_in(&format!("alphabet e/2, c/1 ; {text}"), &Alphabet::new()).unwrap();
        for _ in 0..20 {
            let n = rng.gen_range(0..=3);
            let g = random_simple(&mut rng, n, 4, &[("e", 2), ("c", 1)]);
            assert_eq!(holds(&g, &doc.formula), holds(&g, &expected), "{text}");
        }
    }
}

#[test]
fn macros_expand() {
    let text = "macro adj(x, y) := e(x, y) | e(y, x) ;\n\
                macro has(X, x) := X(x) ;\n\
                exists y . exists Z . forall x . has(Z, x) -> adj(x, y)";
    // `exists Z` is a lowercase-quantifier on an uppercase name: not allowed.
    assert!(parse_mso(text).is_err());
    let text = text.replace("exists Z", "existsS Z");
    let phi = parse_mso(&text).unwrap();
    let expected = M::exists(
        "y",
        M::exists_set(
            "Z",
            M::forall(
                "x",
                M::implies(
                    M::member("Z", "x"),
                    M::or([M::rel("e", &["x", "y"]), M::rel("e", &["y", "x"])]),
                ),
            ),
        ),
    );
    assert_eq!(phi, expected);
}

#[test]
fn diagnostics() {
    assert_eq!(
        err("exists x . X(x)"),
        (
            Pos {
                line: 1,
                column: 12
            },
            ParseErrorKind::UnboundSetVariable("X".into())
        )
    );
    assert_eq!(
        err("exists x . e(x, x) &\n e(x)"),
        (
            Pos { line: 2, column: 2 },
            ParseErrorKind::Arity {
                symbol: "e".into(),
                expected: 2,
                found: 1
            }
        )
    );
    assert_eq!(
        err("alphabet c/1 ; exists x . e(x, x)"),
        (
            Pos {
                line: 1,
                column: 27
            },
            ParseErrorKind::UndeclaredSymbol("e".into())
        )
    );
    assert!(matches!(
        err("exists x . (c(x)"),
        (_, ParseErrorKind::Syntax(_))
    ));
    assert!(matches!(
        err("exists . c(x)"),
        (_, ParseErrorKind::Syntax(_))
    ));
    assert!(matches!(
        err("macro m(x) := c(y) ; exists x . m(x)"),
        (_, ParseErrorKind::Syntax(_))
    ));
    assert!(matches!(
        err("exists x . incid_e_3(x, x) & e(x, x)"),
        (_, ParseErrorKind::Syntax(_))
    ));
}

/// A random formula over labels `a/1`, `b/2`, the set variables in `sets`
/// and the element variables in `elems`.
fn random_formula(
    rng: &mut ChaCha8Rng,
    depth: usize,
    elems: &mut Vec<String>,
    sets: &mut Vec<String>,
) -> M {
    let choice = if depth == 0 {
        rng.gen_range(0..4)
    } else {
        rng.gen_range(0..10)
    };
    let pick = |rng: &mut ChaCha8Rng, vs: &[String]| vs[rng.gen_range(0..vs.len())].clone();
    match choice {
        0 if !elems.is_empty() => M::rel("a", &[&pick(rng, elems)]),
        1 if !elems.is_empty() => M::rel("b", &[&pick(rng, elems), &pick(rng, elems)]),
        2 if !elems.is_empty() && !sets.is_empty() => {
            M::member(&pick(rng, sets), &pick(rng, elems))
        }
        3 if !elems.is_empty() => M::eq(&pick(rng, elems), &pick(rng, elems)),
        0..=3 => M::Bool(rng.gen()),
        4 => M::not(random_formula(rng, depth - 1, elems, sets)),
        5 | 6 => {
            let parts: Vec<M> = (0..rng.gen_range(2..=3))
                .map(|_| random_formula(rng, depth - 1, elems, sets))
                .collect();
            if choice == 5 {
                M::and(parts)
            } else {
                M::or(parts)
            }
        }
        7 | 8 => {
            let v = format!("x{}", elems.len());
            elems.push(v.clone());
            let body = random_formula(rng, depth - 1, elems, sets);
            elems.pop();
            if choice == 7 {
                M::exists(&v, body)
            } else {
                M::forall(&v, body)
            }
        }
        _ => {
            let v = format!("X{}", sets.len());
            sets.push(v.clone());
            let body = random_formula(rng, depth - 1, elems, sets);
            sets.pop();
            M::exists_set(&v, body)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_formulas_read_back(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_formula(&mut rng, 4, &mut Vec::new(), &mut Vec::new());
        let text = phi.to_string();
        let context = Alphabet::from_labels([Label::new("a", 1), Label::new("b", 2)]).unwrap();
        let back = parse_mso_in(&text, &context).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?.formula;
        prop_assert_eq!(back.to_string(), text.clone());
        for _ in 0..4 {
            let n = rng.gen_range(0..=2);
            let g = random_simple(&mut rng, n, 3, &[("a", 1), ("b", 2)]);
            prop_assert_eq!(holds(&g, &back), holds(&g, &phi), "{}", text);
        }
    }

    #[test]
    fn arbitrary_text_never_panics(text in "[A-Za-z0-9_ ().,;:=!&|<>#\n-]{0,60}") {
        let _ = parse_mso(&text);
    }
}
