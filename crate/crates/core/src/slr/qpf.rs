//! Canonical models of quantifier- and predicate-free formulas.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::{SlrError, SlrFormula, Store, Var};
use crate::graph::{CGraph, Label};

/// The least model of a qpf formula: one vertex per equality class that occurs
/// in a relation atom, named after the first variable of the class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QpfModel {
    pub graph: CGraph,
    pub store: Store,
    /// Class index of every variable, in order of first occurrence.
    pub class_of: BTreeMap<Var, usize>,
    /// Vertex of each class, if the class occurs in a relation atom.
    pub vertex_of_class: Vec<Option<usize>>,
}

fn collect<'a>(phi: &'a SlrFormula, out: &mut Vec<&'a SlrFormula>) -> Result<(), SlrError> {
    match phi {
        SlrFormula::Emp => Ok(()),
        SlrFormula::Sep(parts) => parts.iter().try_for_each(|p| collect(p, out)),
        SlrFormula::Pred { .. } | SlrFormula::Exists(..) => Err(SlrError::NotQpf),
        atom => {
            out.push(atom);
            Ok(())
        }
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Builds the canonical model, with one `d__` edge per ordered pair of classes
/// related by a disequality when `diseq_edges` is set. `None` if unsatisfiable.
pub fn qpf_model(phi: &SlrFormula, diseq_edges: bool) -> Result<Option<QpfModel>, SlrError> {
    let mut atoms = Vec::new();
    collect(phi, &mut atoms)?;
    let mut vars: Vec<&Var> = Vec::new();
    let mut index: BTreeMap<&Var, usize> = BTreeMap::new();
    for a in &atoms {
        let args: Vec<&Var> = match a {
            SlrFormula::Eq(x, y) | SlrFormula::Neq(x, y) => alloc::vec![x, y],
            SlrFormula::Rel { args, .. } => args.iter().collect(),
            _ => unreachable!(),
        };
        for v in args {
            if !index.contains_key(v) {
                index.insert(v, vars.len());
                vars.push(v);
            }
        }
    }
    let mut parent: Vec<usize> = (0..vars.len()).collect();
    for a in &atoms {
        if let SlrFormula::Eq(x, y) = a {
            let (rx, ry) = (find(&mut parent, index[x]), find(&mut parent, index[y]));
            // keep the earlier variable as representative
            let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
            parent[hi] = lo;
        }
    }
    let roots: Vec<usize> = (0..vars.len()).map(|i| find(&mut parent, i)).collect();
    let mut class_ids: BTreeMap<usize, usize> = BTreeMap::new();
    for &r in &roots {
        let n = class_ids.len();
        class_ids.entry(r).or_insert(n);
    }
    let class: Vec<usize> = roots.iter().map(|r| class_ids[r]).collect();
    let nclasses = class_ids.len();

    let mut g = CGraph::new();
    let mut vertex_of_class: Vec<Option<usize>> = alloc::vec![None; nclasses];
    let mut seen_rels: BTreeSet<(&str, Vec<usize>)> = BTreeSet::new();
    let mut rel_edges: Vec<(Label, Vec<usize>)> = Vec::new();
    for a in &atoms {
        if let SlrFormula::Rel { label, args } = a {
            let cls: Vec<usize> = args.iter().map(|v| class[index[v]]).collect();
            if !seen_rels.insert((label.as_str(), cls.clone())) {
                return Ok(None);
            }
            let mut attach = Vec::new();
            for (&c, v) in cls.iter().zip(args) {
                let vi = match vertex_of_class[c] {
                    Some(vi) => vi,
                    None => {
                        let rep = vars[roots[index[v]]];
                        let vi = g.add_vertex(rep.clone())?;
                        vertex_of_class[c] = Some(vi);
                        vi
                    }
                };
                attach.push(vi);
            }
            rel_edges.push((Label::new(label.clone(), args.len()), attach));
        }
    }
    let mut diseqs: Vec<(usize, usize)> = Vec::new();
    for a in &atoms {
        if let SlrFormula::Neq(x, y) = a {
            let (cx, cy) = (class[index[x]], class[index[y]]);
            if cx == cy {
                return Ok(None);
            }
            if let (Some(u), Some(v)) = (vertex_of_class[cx], vertex_of_class[cy]) {
                if !diseqs.contains(&(u, v)) {
                    diseqs.push((u, v));
                }
            }
        }
    }
    for (i, (label, attach)) in rel_edges.into_iter().enumerate() {
        let id = g.fresh_name(&alloc::format!("e{i}"));
        g.add_edge(id, label, attach)?;
    }
    if diseq_edges {
        for (i, (u, v)) in diseqs.into_iter().enumerate() {
            let id = g.fresh_name(&alloc::format!("d{i}"));
            g.add_edge(id, Label::diseq(), alloc::vec![u, v])?;
        }
    }
    let mut store = Store::new();
    let mut class_of = BTreeMap::new();
    for (i, v) in vars.iter().enumerate() {
        let c = class[i];
        class_of.insert((*v).clone(), c);
        let name: String = match vertex_of_class[c] {
            Some(vi) => g.vertices()[vi].clone(),
            None => alloc::format!("{}#out", vars[roots[i]]),
        };
        store.insert((*v).clone(), name);
    }
    Ok(Some(QpfModel {
        graph: g,
        store,
        class_of,
        vertex_of_class,
    }))
}

/// A model of a qpf formula, or `None` if it is unsatisfiable. Variables of
/// classes without relation atoms are mapped to pairwise distinct values
/// outside the graph.
pub fn sat_qpf(phi: &SlrFormula) -> Result<Option<(CGraph, Store)>, SlrError> {
    Ok(qpf_model(phi, false)?.map(|m| (m.graph, m.store)))
}
