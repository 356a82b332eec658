//! Canonical forms by individualization-refinement with automorphism pruning.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::CGraph;

/// Isomorphism-invariant encoding of a c-graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub vertex_count: usize,
    pub edges: Vec<(String, Vec<usize>)>,
    pub sources: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    /// `vertex_map[v]` is the image in the second graph of vertex `v` of the first.
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
}

enum Flow {
    Continue,
    Backjump { depth: usize, aut: Vec<usize> },
}

struct Leaf {
    form: CanonicalForm,
    lab: Vec<usize>,
    path: Vec<usize>,
}

struct Canon<'a> {
    g: &'a CGraph,
    label_rank: Vec<usize>,
    inc: Vec<Vec<(usize, usize)>>,
    first: Option<Leaf>,
    best: Option<Leaf>,
}

fn rank_by<K: Ord + Clone>(keys: &[K]) -> (Vec<usize>, usize) {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    let ranks = keys
        .iter()
        .map(|k| sorted.binary_search(k).expect("key present"))
        .collect();
    (ranks, sorted.len())
}

fn class_count(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn find(uf: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while uf[r] != r {
        r = uf[r];
    }
    let mut y = x;
    while uf[y] != r {
        let next = uf[y];
        uf[y] = r;
        y = next;
    }
    r
}

impl<'a> Canon<'a> {
    fn new(g: &'a CGraph) -> Self {
        let labels: Vec<(&str, usize)> = g
            .edges()
            .iter()
            .map(|e| (e.label.name.as_str(), e.label.arity))
            .collect();
        let (label_rank, _) = rank_by(&labels);
        let mut inc = vec![Vec::new(); g.vertex_count()];
        for (ei, e) in g.edges().iter().enumerate() {
            for (p, &v) in e.attach.iter().enumerate() {
                inc[v].push((ei, p));
            }
        }
        Canon {
            g,
            label_rank,
            inc,
            first: None,
            best: None,
        }
    }

    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let mut count = class_count(&colors);
        loop {
            let sigs: Vec<(usize, Vec<(usize, usize, Vec<usize>)>)> = (0..colors.len())
                .map(|v| {
                    let mut s: Vec<(usize, usize, Vec<usize>)> = self.inc[v]
                        .iter()
                        .map(|&(e, p)| {
                            let cols = self.g.edges()[e]
                                .attach
                                .iter()
                                .map(|&w| colors[w])
                                .collect();
                            (self.label_rank[e], p, cols)
                        })
                        .collect();
                    s.sort();
                    (colors[v], s)
                })
                .collect();
            let (next, n) = rank_by(&sigs);
            colors = next;
            if n == count {
                return colors;
            }
            count = n;
        }
    }

    fn initial(&self) -> Vec<usize> {
        let keys: Vec<(usize, usize)> = (0..self.g.vertex_count())
            .map(|v| match self.g.sources().iter().position(|&s| s == v) {
                Some(p) => (0, p),
                None => (1, 0),
            })
            .collect();
        self.refine(rank_by(&keys).0)
    }

    fn individualize(&self, colors: &[usize], v: usize) -> Vec<usize> {
        let keys: Vec<(usize, bool)> = (0..colors.len()).map(|w| (colors[w], w != v)).collect();
        self.refine(rank_by(&keys).0)
    }

    fn form(&self, lab: &[usize]) -> CanonicalForm {
        let mut edges: Vec<(String, Vec<usize>)> = self
            .g
            .edges()
            .iter()
            .map(|e| {
                (
                    e.label.name.clone(),
                    e.attach.iter().map(|&v| lab[v]).collect(),
                )
            })
            .collect();
        edges.sort();
        CanonicalForm {
            vertex_count: lab.len(),
            edges,
            sources: self.g.sources().iter().map(|&s| lab[s]).collect(),
        }
    }

    fn automorphism(from: &[usize], to: &[usize]) -> Vec<usize> {
        let mut inv = vec![0; to.len()];
        for (v, &p) in to.iter().enumerate() {
            inv[p] = v;
        }
        from.iter().map(|&p| inv[p]).collect()
    }

    fn divergence(a: &[usize], b: &[usize]) -> usize {
        a.iter().zip(b).take_while(|(x, y)| x == y).count()
    }

    fn leaf(&mut self, lab: Vec<usize>, path: &[usize]) -> Flow {
        let form = self.form(&lab);
        if let Some(first) = &self.first {
            if first.form == form {
                return Flow::Backjump {
                    depth: Self::divergence(&first.path, path),
                    aut: Self::automorphism(&first.lab, &lab),
                };
            }
        } else {
            self.first = Some(Leaf {
                form: form.clone(),
                lab: lab.clone(),
                path: path.to_vec(),
            });
            self.best = Some(Leaf {
                form,
                lab,
                path: path.to_vec(),
            });
            return Flow::Continue;
        }
        let best = self.best.as_ref().expect("best set with first");
        if form == best.form {
            return Flow::Backjump {
                depth: Self::divergence(&best.path, path),
                aut: Self::automorphism(&best.lab, &lab),
            };
        }
        if form < best.form {
            self.best = Some(Leaf {
                form,
                lab,
                path: path.to_vec(),
            });
        }
        Flow::Continue
    }

    fn search(&mut self, colors: Vec<usize>, path: &mut Vec<usize>) -> Flow {
        let n = colors.len();
        if class_count(&colors) == n {
            return self.leaf(colors, path);
        }
        let mut sizes = vec![0usize; n];
        for &c in &colors {
            sizes[c] += 1;
        }
        let target = (0..n)
            .find(|&c| sizes[c] > 1)
            .expect("non-discrete partition");
        let cell: Vec<usize> = (0..n).filter(|&v| colors[v] == target).collect();
        // Interchangeable isolated vertices: one branch suffices.
        let isolated = cell
            .iter()
            .all(|&v| self.inc[v].is_empty() && !self.g.sources().contains(&v));
        let depth = path.len();
        let mut uf: Vec<usize> = (0..n).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if explored
                .iter()
                .any(|&u| find(&mut uf, u) == find(&mut uf, v))
            {
                continue;
            }
            explored.push(v);
            path.push(v);
            let next = self.individualize(&colors, v);
            let flow = self.search(next, path);
            path.pop();
            match flow {
                Flow::Continue => {}
                Flow::Backjump { depth: d, aut } if d == depth => {
                    for (x, &y) in aut.iter().enumerate() {
                        let (a, b) = (find(&mut uf, x), find(&mut uf, y));
                        if a != b {
                            uf[a] = b;
                        }
                    }
                }
                other => return other,
            }
            if isolated {
                break;
            }
        }
        Flow::Continue
    }
}

/// Canonical form of `g` and the labeling `vertex -> canonical position`.
pub fn canonical_labeling(g: &CGraph) -> (CanonicalForm, Vec<usize>) {
    let mut c = Canon::new(g);
    let init = c.initial();
    let mut path = Vec::new();
    let _ = c.search(init, &mut path);
    match c.best {
        Some(best) => (best.form, best.lab),
        None => (
            CanonicalForm {
                vertex_count: 0,
                edges: Vec::new(),
                sources: Vec::new(),
            },
            Vec::new(),
        ),
    }
}

pub fn canonical_form(g: &CGraph) -> CanonicalForm {
    canonical_labeling(g).0
}

/// An isomorphism from `g` to `h`, if one exists.
pub fn isomorphic(g: &CGraph, h: &CGraph) -> Option<Isomorphism> {
    if g.vertex_count() != h.vertex_count()
        || g.edge_count() != h.edge_count()
        || g.type_n() != h.type_n()
    {
        return None;
    }
    let (fg, lg) = canonical_labeling(g);
    let (fh, lh) = canonical_labeling(h);
    if fg != fh {
        return None;
    }
    let mut inv = vec![0; lh.len()];
    for (v, &p) in lh.iter().enumerate() {
        inv[p] = v;
    }
    let vertex_map: Vec<usize> = lg.iter().map(|&p| inv[p]).collect();
    let mut used = vec![false; h.edge_count()];
    let mut edge_map = Vec::with_capacity(g.edge_count());
    for e in g.edges() {
        let image: Vec<usize> = e.attach.iter().map(|&v| vertex_map[v]).collect();
        let j = h
            .edges()
            .iter()
            .enumerate()
            .position(|(j, f)| !used[j] && f.label == e.label && f.attach == image)?;
        used[j] = true;
        edge_map.push(j);
    }
    Some(Isomorphism {
        vertex_map,
        edge_map,
    })
}

/// A set of c-graphs up to isomorphism, ordered by canonical form.
#[derive(Clone, Debug, Default)]
pub struct IsoSet {
    members: BTreeMap<CanonicalForm, CGraph>,
}

impl IsoSet {
    pub fn new() -> Self {
        IsoSet::default()
    }

    /// Inserts `g` unless an isomorphic graph is present; returns whether it was new.
    pub fn insert(&mut self, g: CGraph) -> bool {
        let f = canonical_form(&g);
        if self.members.contains_key(&f) {
            return false;
        }
        self.members.insert(f, g);
        true
    }

    pub fn contains(&self, g: &CGraph) -> bool {
        self.members.contains_key(&canonical_form(g))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &CGraph> {
        self.members.values()
    }

    pub fn forms(&self) -> impl Iterator<Item = &CanonicalForm> {
        self.members.keys()
    }

    pub fn into_graphs(self) -> Vec<CGraph> {
        self.members.into_values().collect()
    }

    pub fn extend<I: IntoIterator<Item = CGraph>>(&mut self, graphs: I) {
        for g in graphs {
            self.insert(g);
        }
    }

    /// Members satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&CGraph) -> bool) -> IsoSet {
        IsoSet {
            members: self
                .members
                .iter()
                .filter(|(_, g)| keep(g))
                .map(|(f, g)| (f.clone(), g.clone()))
                .collect(),
        }
    }

    pub fn same_classes(&self, other: &IsoSet) -> bool {
        self.members.keys().eq(other.members.keys())
    }
}

impl FromIterator<CGraph> for IsoSet {
    fn from_iter<I: IntoIterator<Item = CGraph>>(iter: I) -> Self {
        let mut s = IsoSet::new();
        s.extend(iter);
        s
    }
}

impl PartialEq for IsoSet {
    fn eq(&self, other: &Self) -> bool {
        self.same_classes(other)
    }
}

impl Eq for IsoSet {}
