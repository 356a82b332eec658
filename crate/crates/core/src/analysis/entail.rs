//! Models up to a size via canonical models and fusion, and bounded
//! entailment checking.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{regular, AnalysisError};
use crate::grammar::{enumerate_parse_trees_within, rich_canonical_model};
use crate::graph::{canonical_form, fusions_with_at_most, project, CGraph, IsoSet};
use crate::slr::{default_fuel, equality_eliminate, slr_models, Sid, SlrFormula, Store, Verdict};

/// Most vertices [`models_up_to`] accepts.
pub const MODEL_VERTEX_LIMIT: usize = 8;

/// Parse-tree cut-off for models with at most `n` vertices: per-label atom
/// limits and a bound on productive edges.
///
/// A fusion keeps every edge, so a model of a tree with more than `n^ar(a)`
/// `a`-atoms has more than `n` vertices. Every productive edge of a tree with
/// a model carries an atom, has a nullary head and an existential that
/// reaches an atom in its own subtree, or is an atom-free leaf; leaves beyond
/// the ones a node needs can be dropped without changing the model. With
/// `c` the most predicate atoms in a rule, this leaves at most
/// `2·(1 + c²)·atoms + c` edges.
pub fn model_cutoff(sid: &Sid, n: usize) -> (usize, BTreeMap<String, usize>) {
    let limits: BTreeMap<String, usize> = sid
        .alphabet()
        .labels()
        .map(|l| (l.name, n.saturating_pow(l.arity as u32)))
        .collect();
    let atoms = limits.values().fold(0usize, |a, &b| a.saturating_add(b));
    let c = sid
        .rules()
        .iter()
        .map(|r| r.flat().preds.len())
        .max()
        .unwrap_or(0);
    let edges = atoms.saturating_mul(2 * (1 + c * c)).saturating_add(c);
    (edges, limits)
}

/// All models of the nullary `pred` with at most `max_vertices` vertices, up
/// to isomorphism: the fusions of rich canonical models, projected.
pub fn models_up_to(sid: &Sid, pred: &str, max_vertices: usize) -> Result<IsoSet, AnalysisError> {
    let mut out = IsoSet::new();
    out.extend(models_in_order(sid, pred, max_vertices)?);
    Ok(out)
}

/// The models of [`models_up_to`], one per isomorphism class, in the order
/// of their parse trees; each canonical model precedes its proper fusions,
/// which are sorted by size.
pub fn models_in_order(
    sid: &Sid,
    pred: &str,
    max_vertices: usize,
) -> Result<Vec<CGraph>, AnalysisError> {
    if max_vertices > MODEL_VERTEX_LIMIT {
        return Err(AnalysisError::TooLarge {
            size: max_vertices,
            limit: MODEL_VERTEX_LIMIT,
        });
    }
    match sid.arity(pred) {
        None => return Err(AnalysisError::UnknownPredicate(pred.into())),
        Some(0) => {}
        Some(_) => return Err(AnalysisError::NotNullary(pred.into())),
    }
    let sid = equality_eliminate(sid);
    regular(&sid)?;
    let (edges, limits) = model_cutoff(&sid, max_vertices);
    let mut seen = IsoSet::new();
    let mut out = Vec::new();
    for t in enumerate_parse_trees_within(&sid, pred, edges, &limits)? {
        let Some(m) = rich_canonical_model(&sid, &t)? else {
            continue;
        };
        let own = project(&m.graph, sid.alphabet());
        if own.vertex_count() <= max_vertices && seen.insert(own.clone()) {
            out.push(own);
        }
        let fused: IsoSet = fusions_with_at_most(&m.graph, max_vertices)
            .iter()
            .map(|q| project(q, sid.alphabet()))
            .collect();
        for g in sorted_models(&fused) {
            if seen.insert(g.clone()) {
                out.push(g);
            }
        }
    }
    Ok(out)
}

/// Graphs sorted by vertex count, edge count and canonical form.
pub fn sorted_models(set: &IsoSet) -> Vec<CGraph> {
    let mut v: Vec<CGraph> = set.iter().cloned().collect();
    v.sort_by_cached_key(|g| (g.vertex_count(), g.edge_count(), canonical_form(g)));
    v
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entailment {
    /// The first model of the left predicate, in the order of
    /// [`models_in_order`], that is no model of the right one.
    Counterexample(CGraph),
    NoCounterexampleUpTo(usize),
}

/// Bounded check of `lhs ⊨ rhs` within one SID.
pub fn entails(
    sid: &Sid,
    lhs: &str,
    rhs: &str,
    max_vertices: usize,
) -> Result<Entailment, AnalysisError> {
    entails_between(sid, lhs, sid, rhs, max_vertices, None)
}

/// Bounded check of `lhs ⊨ rhs`, with the predicates defined by separate
/// SIDs. `fuel` defaults to [`default_fuel`].
pub fn entails_between(
    lhs_sid: &Sid,
    lhs: &str,
    rhs_sid: &Sid,
    rhs: &str,
    max_vertices: usize,
    fuel: Option<u32>,
) -> Result<Entailment, AnalysisError> {
    match rhs_sid.arity(rhs) {
        None => return Err(AnalysisError::UnknownPredicate(rhs.into())),
        Some(0) => {}
        Some(_) => return Err(AnalysisError::NotNullary(rhs.into())),
    }
    regular(rhs_sid)?;
    let phi = SlrFormula::pred(rhs, &[]);
    for g in models_in_order(lhs_sid, lhs, max_vertices)? {
        let fuel = fuel.unwrap_or_else(|| default_fuel(&g, rhs_sid));
        if slr_models(&g, &Store::new(), &phi, rhs_sid, fuel)? != Verdict::True {
            return Ok(Entailment::Counterexample(g));
        }
    }
    Ok(Entailment::NoCounterexampleUpTo(max_vertices))
}
