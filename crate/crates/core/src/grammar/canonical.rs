//! Characteristic formulas and canonical models of parse trees.

use alloc::format;
use alloc::vec::Vec;

use super::tree::{check_parse_tree, enumerate_parse_trees, ParseTree};
use super::{regular, GrammarError};
use crate::graph::{project, CGraph, IsoSet};
use crate::slr::{qpf_model, Pure, Sid, SlrFormula, Store, Var};

/// The quantifier- and predicate-free formula accumulated along a parse tree.
/// Variables introduced by the tree's `i`-th edge (pre-order) are written
/// `x@e{i}`; the root's actual parameters are `x1, .., xn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharFormula {
    pub formula: SlrFormula,
    /// Annotated variables that stem from rule existentials.
    pub existentials: Vec<Var>,
    /// The root's actual parameters.
    pub roots: Vec<Var>,
}

fn annotate(v: &str, edge: usize) -> Var {
    format!("{v}@e{edge}")
}

struct Builder<'a> {
    sid: &'a Sid,
    next: usize,
    parts: Vec<SlrFormula>,
    existentials: Vec<Var>,
}

impl Builder<'_> {
    fn node(&mut self, tree: &ParseTree, actuals: &[Var]) {
        for e in &tree.edges {
            let idx = self.next;
            self.next += 1;
            let rule = &self.sid.rules()[e.rule];
            let body = rule.flat();
            let an = |v: &Var| annotate(v, idx);
            for (a, x) in actuals.iter().zip(&rule.params) {
                self.parts.push(SlrFormula::Eq(a.clone(), an(x)));
            }
            self.existentials.extend(body.existentials.iter().map(an));
            for p in &body.pure {
                self.parts.push(match p {
                    Pure::Eq(x, y) => SlrFormula::Eq(an(x), an(y)),
                    Pure::Neq(x, y) => SlrFormula::Neq(an(x), an(y)),
                });
            }
            for a in &body.rels {
                self.parts.push(SlrFormula::Rel {
                    label: a.name.clone(),
                    args: a.args.iter().map(an).collect(),
                });
            }
            for (a, c) in body.preds.iter().zip(&e.children) {
                let args: Vec<Var> = a.args.iter().map(an).collect();
                self.node(c, &args);
            }
        }
    }
}

/// The characteristic formula of a parse tree.
pub fn char_formula(sid: &Sid, tree: &ParseTree) -> Result<CharFormula, GrammarError> {
    check_parse_tree(sid, &regular(sid)?, tree)?;
    Ok(char_formula_unchecked(sid, tree))
}

fn char_formula_unchecked(sid: &Sid, tree: &ParseTree) -> CharFormula {
    let n = sid.arity(&tree.predicate).unwrap_or(0);
    let roots: Vec<Var> = (1..=n).map(|i| format!("x{i}")).collect();
    let mut b = Builder {
        sid,
        next: 0,
        parts: Vec::new(),
        existentials: Vec::new(),
    };
    b.node(tree, &roots);
    CharFormula {
        formula: SlrFormula::sep(b.parts),
        existentials: b.existentials,
        roots,
    }
}

/// A canonical model over the alphabet extended with `d__`, with the tree it
/// stems from and its canonical store.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RichCanonicalModel {
    pub graph: CGraph,
    pub tree: ParseTree,
    pub store: Store,
}

/// The rich canonical model of a parse tree; `None` when the characteristic
/// formula is unsatisfiable or an existential would denote no vertex.
pub fn rich_canonical_model(
    sid: &Sid,
    tree: &ParseTree,
) -> Result<Option<RichCanonicalModel>, GrammarError> {
    check_parse_tree(sid, &regular(sid)?, tree)?;
    rich_unchecked(sid, tree)
}

fn rich_unchecked(sid: &Sid, tree: &ParseTree) -> Result<Option<RichCanonicalModel>, GrammarError> {
    let cf = char_formula_unchecked(sid, tree);
    let Some(m) = qpf_model(&cf.formula, true)? else {
        return Ok(None);
    };
    let dangling = cf.existentials.iter().any(|y| {
        m.class_of
            .get(y)
            .is_none_or(|&c| m.vertex_of_class[c].is_none())
    });
    if dangling {
        return Ok(None);
    }
    Ok(Some(RichCanonicalModel {
        graph: m.graph,
        tree: tree.clone(),
        store: m.store,
    }))
}

/// Canonical models up to isomorphism, rich and projected to the SID's
/// alphabet.
#[derive(Clone, Debug, Default)]
pub struct CanonicalModels {
    pub rich: IsoSet,
    pub projected: IsoSet,
}

/// Canonical models of all parse trees of `pred` with at most `max_edges`
/// productive edges.
pub fn canonical_models(
    sid: &Sid,
    pred: &str,
    max_edges: usize,
) -> Result<CanonicalModels, GrammarError> {
    let trees = enumerate_parse_trees(sid, pred, max_edges)?;
    canonical_models_of(sid, &trees)
}

/// Canonical models of the given trees.
pub fn canonical_models_of(
    sid: &Sid,
    trees: &[ParseTree],
) -> Result<CanonicalModels, GrammarError> {
    let mut out = CanonicalModels::default();
    for t in trees {
        if let Some(m) = rich_unchecked(sid, t)? {
            out.projected.insert(project(&m.graph, sid.alphabet()));
            out.rich.insert(m.graph);
        }
    }
    Ok(out)
}
