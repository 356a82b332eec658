//! Vertex equivalences, quotients, fusion and fission.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use super::{CGraph, Edge, GraphError, IsoSet};

/// A partition of the vertices of a graph, stored as a block index per vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct VertexEquivalence {
    block: Vec<usize>,
}

impl VertexEquivalence {
    pub fn identity(n: usize) -> Self {
        VertexEquivalence {
            block: (0..n).collect(),
        }
    }

    /// The equivalence generated by `pairs` over `n` vertices.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut uf: Vec<usize> = (0..n).collect();
        fn root(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        for &(a, b) in pairs {
            let (ra, rb) = (root(&mut uf, a), root(&mut uf, b));
            if ra != rb {
                uf[ra.max(rb)] = ra.min(rb);
            }
        }
        let roots: Vec<usize> = (0..n).map(|v| root(&mut uf, v)).collect();
        Self::from_blocks(&roots)
    }

    /// Normalizes arbitrary block labels into first-occurrence order.
    pub fn from_blocks(labels: &[usize]) -> Self {
        let mut seen = BTreeMap::new();
        let block = labels
            .iter()
            .map(|l| {
                let next = seen.len();
                *seen.entry(*l).or_insert(next)
            })
            .collect();
        VertexEquivalence { block }
    }

    pub fn len(&self) -> usize {
        self.block.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block.is_empty()
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.block[v]
    }

    pub fn block_count(&self) -> usize {
        self.block.iter().max().map_or(0, |m| m + 1)
    }

    pub fn same(&self, u: usize, v: usize) -> bool {
        self.block[u] == self.block[v]
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut c = vec![Vec::new(); self.block_count()];
        for (v, &b) in self.block.iter().enumerate() {
            c[b].push(v);
        }
        c
    }

    /// A minimum generating set: each class member joined to the class's first vertex.
    pub fn generators(&self) -> Vec<(usize, usize)> {
        self.classes()
            .iter()
            .flat_map(|c| c[1..].iter().map(move |&v| (c[0], v)))
            .collect()
    }

    /// Size of a minimum generating set, `|V| - #classes`.
    pub fn generator_count(&self) -> usize {
        self.len() - self.block_count()
    }
}

/// True iff the quotient keeps same-label edges apart and no disequality edge collapses.
pub fn compatible(g: &CGraph, eq: &VertexEquivalence) -> bool {
    let mut seen = BTreeSet::new();
    for e in g.edges() {
        let blocks: Vec<usize> = e.attach.iter().map(|&v| eq.block_of(v)).collect();
        if e.label.is_diseq() && blocks[0] == blocks[1] {
            return false;
        }
        if !seen.insert((&e.label, blocks)) {
            return false;
        }
    }
    true
}

/// `G/≈`; a class is named after its first vertex.
pub fn quotient(g: &CGraph, eq: &VertexEquivalence) -> Result<CGraph, GraphError> {
    if eq.len() != g.vertex_count() {
        return Err(GraphError::Incompatible);
    }
    if !compatible(g, eq) {
        return Err(GraphError::Incompatible);
    }
    Ok(quotient_unchecked(g, eq))
}

fn quotient_unchecked(g: &CGraph, eq: &VertexEquivalence) -> CGraph {
    let vertices = eq
        .classes()
        .iter()
        .map(|c| g.vertices()[c[0]].clone())
        .collect();
    let edges = g
        .edges()
        .iter()
        .map(|e| Edge {
            id: e.id.clone(),
            label: e.label.clone(),
            attach: e.attach.iter().map(|&v| eq.block_of(v)).collect(),
        })
        .collect();
    let sources = g.sources().iter().map(|&s| eq.block_of(s)).collect();
    CGraph::from_parts_unchecked(vertices, edges, sources)
}

/// Enumerates compatible partitions by restricted growth strings with early pruning.
struct PartitionSearch<'a> {
    g: &'a CGraph,
    order: Vec<usize>,
    /// Edges whose attachment is fully assigned once `order[i]` is.
    closing: Vec<Vec<usize>>,
    label_idx: Vec<usize>,
    assign: Vec<usize>,
    used: BTreeSet<(usize, Vec<usize>)>,
}

impl<'a> PartitionSearch<'a> {
    fn new(g: &'a CGraph) -> Self {
        let n = g.vertex_count();
        let adj = g.adjacency();
        // Highest-degree vertex first, then breadth-first, so collisions surface early.
        let mut order = Vec::with_capacity(n);
        let mut placed = vec![false; n];
        while order.len() < n {
            let start = (0..n)
                .filter(|&v| !placed[v])
                .max_by_key(|&v| (adj[v].len(), core::cmp::Reverse(v)))
                .expect("unplaced vertex");
            let mut queue = alloc::collections::VecDeque::from([start]);
            placed[start] = true;
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &w in &adj[v] {
                    if !placed[w] {
                        placed[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut closing = vec![Vec::new(); n];
        for (ei, e) in g.edges().iter().enumerate() {
            if let Some(last) = e.attach.iter().map(|&v| pos[v]).max() {
                closing[last].push(ei);
            }
        }
        let labels: Vec<_> = g.edges().iter().map(|e| &e.label).collect();
        let mut distinct = labels.clone();
        distinct.sort();
        distinct.dedup();
        let label_idx = labels
            .iter()
            .map(|l| distinct.binary_search(l).expect("label present"))
            .collect();
        PartitionSearch {
            g,
            order,
            closing,
            label_idx,
            assign: vec![usize::MAX; n],
            used: BTreeSet::new(),
        }
    }

    /// Calls `visit` with each compatible partition having at most `*max_blocks`
    /// blocks; `visit` may lower the limit.
    fn run(&mut self, max_blocks: &mut usize, visit: &mut dyn FnMut(&[usize], usize, &mut usize)) {
        if self.g.vertex_count() == 0 {
            visit(&[], 0, max_blocks);
            return;
        }
        self.go(0, 0, max_blocks, visit);
    }

    fn go(
        &mut self,
        i: usize,
        blocks: usize,
        max_blocks: &mut usize,
        visit: &mut dyn FnMut(&[usize], usize, &mut usize),
    ) {
        if i == self.order.len() {
            visit(&self.assign, blocks, max_blocks);
            return;
        }
        let v = self.order[i];
        for b in 0..=blocks {
            if b == blocks && blocks >= *max_blocks {
                break;
            }
            self.assign[v] = b;
            let mut inserted = Vec::new();
            let mut ok = true;
            for &ei in &self.closing[i] {
                let e = &self.g.edges()[ei];
                let key: Vec<usize> = e.attach.iter().map(|&w| self.assign[w]).collect();
                if e.label.is_diseq() && key[0] == key[1] {
                    ok = false;
                    break;
                }
                let k = (self.label_idx[ei], key);
                if self.used.contains(&k) {
                    ok = false;
                    break;
                }
                self.used.insert(k.clone());
                inserted.push(k);
            }
            if ok {
                let nb = if b == blocks { blocks + 1 } else { blocks };
                self.go(i + 1, nb, max_blocks, visit);
            }
            for k in inserted {
                self.used.remove(&k);
            }
            self.assign[v] = usize::MAX;
        }
    }
}

/// Calls `f` for every compatible equivalence of `g` with at most `max_blocks` classes.
pub fn for_each_compatible(g: &CGraph, max_blocks: usize, mut f: impl FnMut(&VertexEquivalence)) {
    let mut search = PartitionSearch::new(g);
    let mut limit = max_blocks;
    search.run(&mut limit, &mut |assign, _, _| {
        f(&VertexEquivalence::from_blocks(assign));
    });
}

/// Quotients by every compatible equivalence, up to isomorphism.
pub fn fusion_all(g: &CGraph) -> IsoSet {
    fusions_with_at_most(g, g.vertex_count())
}

/// Quotients with at most `max_vertices` vertices, up to isomorphism.
pub fn fusions_with_at_most(g: &CGraph, max_vertices: usize) -> IsoSet {
    let mut out = IsoSet::new();
    for_each_compatible(g, max_vertices, |eq| {
        out.insert(quotient_unchecked(g, eq));
    });
    out
}

/// Quotients by exactly `k`-generated compatible equivalences.
pub fn fusion_k(g: &CGraph, k: usize) -> IsoSet {
    let n = g.vertex_count();
    let mut out = IsoSet::new();
    if k > n {
        return out;
    }
    for_each_compatible(g, n - k, |eq| {
        if eq.block_count() == n - k {
            out.insert(quotient_unchecked(g, eq));
        }
    });
    out
}

/// The fusion bound: the largest generator count of a compatible equivalence.
pub fn fb_of_graph(g: &CGraph) -> usize {
    let n = g.vertex_count();
    let mut search = PartitionSearch::new(g);
    let mut limit = n;
    let mut best = n;
    search.run(&mut limit, &mut |_, blocks, limit| {
        if blocks < best {
            best = blocks;
        }
        // Only strictly coarser partitions can improve the bound.
        *limit = best.saturating_sub(1).max(1);
    });
    n - best
}

/// Every graph obtained by splitting one vertex in two, up to isomorphism.
pub fn fission_1(g: &CGraph) -> IsoSet {
    let mut out = IsoSet::new();
    for u in 0..g.vertex_count() {
        let occ: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .enumerate()
            .flat_map(|(ei, e)| {
                e.attach
                    .iter()
                    .enumerate()
                    .filter(move |&(_, &v)| v == u)
                    .map(move |(p, _)| (ei, p))
            })
            .collect();
        let fresh = g.fresh_name(&alloc::format!("{}'", g.vertices()[u]));
        for mask in 0u64..(1u64 << occ.len()) {
            let mut h = g.clone();
            let u2 = h.add_vertex(fresh.clone()).expect("fresh name");
            let mut edges: Vec<Edge> = h.edges().to_vec();
            for (bit, &(ei, p)) in occ.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    edges[ei].attach[p] = u2;
                }
            }
            // A disequality edge between the two copies cannot fuse back.
            let bad = edges.iter().any(|e| {
                e.label.is_diseq()
                    && ((e.attach[0] == u && e.attach[1] == u2)
                        || (e.attach[0] == u2 && e.attach[1] == u))
            });
            if bad {
                continue;
            }
            let h =
                CGraph::from_parts_unchecked(h.vertices().to_vec(), edges, h.sources().to_vec());
            out.insert(h);
        }
    }
    out
}

/// Every `G'` such that `G` is a `k`-generated fusion of `G'`, up to isomorphism.
pub fn fission_k(g: &CGraph, k: usize) -> IsoSet {
    let mut current: IsoSet = core::iter::once(g.clone()).collect();
    for _ in 0..k {
        let mut next = IsoSet::new();
        for h in current.iter() {
            next.extend(fission_1(h).into_graphs());
        }
        current = next;
    }
    current
}
