use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::GraphError;

/// Reserved name of the binary disequality label.
pub const DISEQ: &str = "d__";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub name: String,
    pub arity: usize,
}

impl Label {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Label {
            name: name.into(),
            arity,
        }
    }

    pub fn diseq() -> Self {
        Label::new(DISEQ, 2)
    }

    pub fn is_diseq(&self) -> bool {
        self.name == DISEQ
    }
}

/// A set of labels with unique names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    arities: BTreeMap<String, usize>,
}

impl Alphabet {
    pub fn new() -> Self {
        Alphabet::default()
    }

    pub fn from_labels<I: IntoIterator<Item = Label>>(labels: I) -> Result<Self, GraphError> {
        let mut a = Alphabet::new();
        for l in labels {
            a.insert(l)?;
        }
        Ok(a)
    }

    pub fn insert(&mut self, label: Label) -> Result<(), GraphError> {
        if label.arity == 0 {
            return Err(GraphError::ZeroArity(label.name));
        }
        match self.arities.get(&label.name) {
            Some(&a) if a != label.arity => Err(GraphError::ArityMismatch {
                label: label.name,
                expected: a,
                found: label.arity,
            }),
            _ => {
                self.arities.insert(label.name, label.arity);
                Ok(())
            }
        }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.arities.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.arities.contains_key(name)
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.arities.iter().map(|(n, &a)| Label::new(n.clone(), a))
    }

    pub fn len(&self) -> usize {
        self.arities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arities.is_empty()
    }

    /// The alphabet extended with the disequality label.
    pub fn with_diseq(&self) -> Self {
        let mut a = self.clone();
        a.arities.insert(DISEQ.to_string(), 2);
        a
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub label: Label,
    /// Indices into the owning graph's vertex list.
    pub attach: Vec<usize>,
}

/// A concrete hypergraph with numbered sources.
///
/// Vertices are addressed by index; names are kept for interchange and must be
/// unique across vertices and edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    sources: Vec<usize>,
}

impl CGraph {
    pub fn new() -> Self {
        CGraph::default()
    }

    /// A graph of type `n` consisting of `n` isolated sources.
    pub fn sources_only(n: usize) -> Self {
        let mut g = CGraph::new();
        for i in 0..n {
            g.vertices.push(format!("s{}", i + 1));
        }
        g.sources = (0..n).collect();
        g
    }

    pub fn type_n(&self) -> usize {
        self.sources.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    fn name_taken(&self, name: &str) -> bool {
        self.vertices.iter().any(|v| v == name) || self.edges.iter().any(|e| e.id == name)
    }

    pub fn add_vertex(&mut self, name: impl Into<String>) -> Result<usize, GraphError> {
        let name = name.into();
        if self.name_taken(&name) {
            return Err(GraphError::DuplicateId(name));
        }
        self.vertices.push(name);
        Ok(self.vertices.len() - 1)
    }

    /// Returns the index of `name`, adding the vertex if absent.
    pub fn ensure_vertex(&mut self, name: &str) -> Result<usize, GraphError> {
        match self.vertex_index(name) {
            Some(i) => Ok(i),
            None => self.add_vertex(name),
        }
    }

    pub fn add_edge(
        &mut self,
        id: impl Into<String>,
        label: Label,
        attach: Vec<usize>,
    ) -> Result<usize, GraphError> {
        let id = id.into();
        if self.name_taken(&id) {
            return Err(GraphError::DuplicateId(id));
        }
        if attach.len() != label.arity {
            return Err(GraphError::ArityMismatch {
                label: label.name,
                expected: label.arity,
                found: attach.len(),
            });
        }
        if let Some(&bad) = attach.iter().find(|&&v| v >= self.vertices.len()) {
            return Err(GraphError::UnknownVertex(format!("#{bad}")));
        }
        self.edges.push(Edge { id, label, attach });
        Ok(self.edges.len() - 1)
    }

    /// Adds an edge whose attachment is given by vertex names, creating missing vertices.
    pub fn add_edge_named(
        &mut self,
        id: impl Into<String>,
        label: Label,
        attach: &[&str],
    ) -> Result<usize, GraphError> {
        let idx = attach
            .iter()
            .map(|n| self.ensure_vertex(n))
            .collect::<Result<Vec<_>, _>>()?;
        self.add_edge(id, label, idx)
    }

    pub fn set_sources(&mut self, sources: Vec<usize>) -> Result<(), GraphError> {
        let mut seen = BTreeSet::new();
        for &s in &sources {
            if s >= self.vertices.len() {
                return Err(GraphError::UnknownVertex(format!("#{s}")));
            }
            if !seen.insert(s) {
                return Err(GraphError::NonInjectiveSources);
            }
        }
        self.sources = sources;
        Ok(())
    }

    /// Label of every edge, each listed once, sorted.
    pub fn labels(&self) -> BTreeSet<Label> {
        self.edges.iter().map(|e| e.label.clone()).collect()
    }

    /// Vertices touched by no edge.
    pub fn isolated_vertices(&self) -> Vec<usize> {
        let mut used = alloc::vec![false; self.vertices.len()];
        for e in &self.edges {
            for &v in &e.attach {
                used[v] = true;
            }
        }
        (0..self.vertices.len()).filter(|&v| !used[v]).collect()
    }

    /// True iff no two distinct edges share label and attachment.
    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges
            .iter()
            .all(|e| seen.insert((&e.label, &e.attach)))
    }

    pub fn has_diseq_edges(&self) -> bool {
        self.edges.iter().any(|e| e.label.is_diseq())
    }

    /// Returns a fresh name starting with `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        if !self.name_taken(base) {
            return base.to_string();
        }
        let mut i = 1usize;
        loop {
            let cand = format!("{base}_{i}");
            if !self.name_taken(&cand) {
                return cand;
            }
            i += 1;
        }
    }

    /// Renames every vertex and edge with the given prefix.
    pub fn with_prefix(&self, prefix: &str) -> CGraph {
        CGraph {
            vertices: self
                .vertices
                .iter()
                .map(|v| format!("{prefix}{v}"))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    id: format!("{prefix}{}", e.id),
                    label: e.label.clone(),
                    attach: e.attach.clone(),
                })
                .collect(),
            sources: self.sources.clone(),
        }
    }

    /// Replaces vertex and edge names by `v0, v1, ..` and `e0, e1, ..`.
    pub fn renamed_compact(&self) -> CGraph {
        CGraph {
            vertices: (0..self.vertices.len()).map(|i| format!("v{i}")).collect(),
            edges: self
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| Edge {
                    id: format!("e{i}"),
                    label: e.label.clone(),
                    attach: e.attach.clone(),
                })
                .collect(),
            sources: self.sources.clone(),
        }
    }

    pub(crate) fn from_parts_unchecked(
        vertices: Vec<String>,
        edges: Vec<Edge>,
        sources: Vec<usize>,
    ) -> CGraph {
        CGraph {
            vertices,
            edges,
            sources,
        }
    }

    /// Primal-graph adjacency: vertices sharing an edge are adjacent.
    pub fn adjacency(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = alloc::vec![BTreeSet::new(); self.vertices.len()];
        for e in &self.edges {
            for &a in &e.attach {
                for &b in &e.attach {
                    if a != b {
                        adj[a].insert(b);
                    }
                }
            }
        }
        adj
    }
}
