use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Alphabet, CGraph, Edge, GraphError};

/// Composition of two type-0 graphs: union of vertices and edges.
pub fn compose(g1: &CGraph, g2: &CGraph) -> Result<CGraph, GraphError> {
    if g1.type_n() != 0 || g2.type_n() != 0 {
        return Err(GraphError::TypeMismatch {
            expected: 0,
            found: g1.type_n().max(g2.type_n()),
        });
    }
    let ids1: BTreeSet<&str> = g1.edges().iter().map(|e| e.id.as_str()).collect();
    if let Some(e) = g2.edges().iter().find(|e| ids1.contains(e.id.as_str())) {
        return Err(GraphError::NotComposable(alloc::format!(
            "edge id {} occurs in both graphs",
            e.id
        )));
    }
    let rels1: BTreeSet<(&str, Vec<&str>)> = g1
        .edges()
        .iter()
        .map(|e| (e.label.name.as_str(), named(g1, &e.attach)))
        .collect();
    for e in g2.edges() {
        if rels1.contains(&(e.label.name.as_str(), named(g2, &e.attach))) {
            return Err(GraphError::NotComposable(alloc::format!(
                "two {}-edges with identical attachments",
                e.label.name
            )));
        }
    }
    let mut out = g1.clone();
    for v in g2.vertices() {
        if out.vertex_index(v).is_none() {
            if out.edge_index(v).is_some() {
                return Err(GraphError::NotComposable(alloc::format!(
                    "{v} is a vertex in one graph and an edge in the other"
                )));
            }
            out.add_vertex(v.clone())?;
        }
    }
    for e in g2.edges() {
        let attach = e
            .attach
            .iter()
            .map(|&v| out.vertex_index(&g2.vertices()[v]).expect("vertex copied"))
            .collect();
        out.add_edge(e.id.clone(), e.label.clone(), attach)
            .map_err(|_| GraphError::NotComposable(alloc::format!("{} clashes", e.id)))?;
    }
    Ok(out)
}

fn named<'a>(g: &'a CGraph, attach: &[usize]) -> Vec<&'a str> {
    attach.iter().map(|&v| g.vertices()[v].as_str()).collect()
}

fn check_disjoint(g1: &CGraph, g2: &CGraph, skip_sources_of_g2: bool) -> Result<(), GraphError> {
    let mut names: BTreeSet<&str> = g1.vertices().iter().map(String::as_str).collect();
    names.extend(g1.edges().iter().map(|e| e.id.as_str()));
    for (i, v) in g2.vertices().iter().enumerate() {
        if skip_sources_of_g2 && g2.sources().contains(&i) {
            continue;
        }
        if names.contains(v.as_str()) {
            return Err(GraphError::NotDisjoint(v.clone()));
        }
    }
    for e in g2.edges() {
        if names.contains(e.id.as_str()) {
            return Err(GraphError::NotDisjoint(e.id.clone()));
        }
    }
    Ok(())
}

/// Appends `h` into `out`, mapping the i-th source of `h` to `joins[i]`.
fn glue(out: &mut CGraph, h: &CGraph, joins: &[usize]) -> Result<(), GraphError> {
    let mut map = alloc::vec![usize::MAX; h.vertex_count()];
    for (i, &s) in h.sources().iter().enumerate() {
        map[s] = joins[i];
    }
    for (v, name) in h.vertices().iter().enumerate() {
        if map[v] == usize::MAX {
            map[v] = out.add_vertex(name.clone())?;
        }
    }
    for e in h.edges() {
        let attach = e.attach.iter().map(|&v| map[v]).collect();
        out.add_edge(e.id.clone(), e.label.clone(), attach)?;
    }
    Ok(())
}

/// Parallel composition: disjoint union joining the i-th sources.
pub fn parallel(g1: &CGraph, g2: &CGraph, n: usize) -> Result<CGraph, GraphError> {
    for g in [g1, g2] {
        if g.type_n() != n {
            return Err(GraphError::TypeMismatch {
                expected: n,
                found: g.type_n(),
            });
        }
    }
    check_disjoint(g1, g2, true)?;
    let mut out = g1.clone();
    glue(&mut out, g2, g1.sources())?;
    Ok(out)
}

/// Substitution `G[e/H]`.
pub fn substitute(g: &CGraph, edge_id: &str, h: &CGraph) -> Result<CGraph, GraphError> {
    let ei = g
        .edge_index(edge_id)
        .ok_or_else(|| GraphError::UnknownEdge(edge_id.into()))?;
    let e = &g.edges()[ei];
    if h.type_n() != e.label.arity {
        return Err(GraphError::ArityMismatch {
            label: e.label.name.clone(),
            expected: e.label.arity,
            found: h.type_n(),
        });
    }
    check_disjoint(g, h, true)?;
    let attach = e.attach.clone();
    let edges: Vec<Edge> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != ei)
        .map(|(_, e)| e.clone())
        .collect();
    let mut out = CGraph::from_parts_unchecked(g.vertices().to_vec(), edges, g.sources().to_vec());
    glue(&mut out, h, &attach)?;
    Ok(out)
}

/// Removes the edges whose label is outside `alphabet`.
pub fn project(g: &CGraph, alphabet: &Alphabet) -> CGraph {
    let edges = g
        .edges()
        .iter()
        .filter(|e| alphabet.arity(&e.label.name) == Some(e.label.arity))
        .cloned()
        .collect();
    CGraph::from_parts_unchecked(g.vertices().to_vec(), edges, g.sources().to_vec())
}

/// Removes the disequality edges.
pub fn strip_diseq(g: &CGraph) -> CGraph {
    let edges = g
        .edges()
        .iter()
        .filter(|e| !e.label.is_diseq())
        .cloned()
        .collect();
    CGraph::from_parts_unchecked(g.vertices().to_vec(), edges, g.sources().to_vec())
}
