use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{CGraph, GraphError, Label};

/// Default vertex limit for [`treewidth_exact`].
pub const TREEWIDTH_SOFT_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    /// A tree over the binary label `t`, edges oriented parent to child.
    pub tree: CGraph,
    /// Bag of each tree vertex, as indices of the decomposed graph's vertices.
    pub bags: Vec<BTreeSet<usize>>,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(|b| b.len())
            .max()
            .unwrap_or(1)
            .saturating_sub(1)
    }
}

fn is_tree(t: &CGraph) -> bool {
    let n = t.vertex_count();
    if n == 0 {
        return false;
    }
    if t.edge_count() != n - 1 || t.edges().iter().any(|e| e.attach.len() != 2) {
        return false;
    }
    let adj = t.adjacency();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Checks both conditions of a tree decomposition of `g`.
pub fn verify_tree_decomposition(g: &CGraph, td: &TreeDecomposition) -> bool {
    if !is_tree(&td.tree) || td.bags.len() != td.tree.vertex_count() {
        return false;
    }
    if td.bags.iter().flatten().any(|&v| v >= g.vertex_count()) {
        return false;
    }
    let covered = g.edges().iter().all(|e| {
        td.bags
            .iter()
            .any(|b| e.attach.iter().all(|v| b.contains(v)))
    });
    if !covered {
        return false;
    }
    let adj = td.tree.adjacency();
    (0..g.vertex_count()).all(|v| {
        let holders: Vec<usize> = (0..td.bags.len())
            .filter(|&n| td.bags[n].contains(&v))
            .collect();
        let Some(&start) = holders.first() else {
            return false;
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            for &m in &adj[n] {
                if td.bags[m].contains(&v) && seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        seen.len() == holders.len()
    })
}

/// Exact tree-width with a witness decomposition, for at most [`TREEWIDTH_SOFT_LIMIT`] vertices.
pub fn treewidth_exact(g: &CGraph) -> Result<(usize, TreeDecomposition), GraphError> {
    treewidth_exact_with_limit(g, TREEWIDTH_SOFT_LIMIT)
}

pub fn treewidth_exact_with_limit(
    g: &CGraph,
    limit: usize,
) -> Result<(usize, TreeDecomposition), GraphError> {
    let n = g.vertex_count();
    if n > limit || n > 24 {
        return Err(GraphError::TooLarge {
            size: n,
            limit: limit.min(24),
        });
    }
    let adj: Vec<u32> = g
        .adjacency()
        .iter()
        .map(|s| s.iter().fold(0u32, |m, &w| m | 1 << w))
        .collect();
    if n == 0 {
        let mut tree = CGraph::new();
        tree.add_vertex("t0")?;
        return Ok((
            0,
            TreeDecomposition {
                tree,
                bags: vec![BTreeSet::new()],
            },
        ));
    }
    // Vertices outside s + {v} reachable from v through s.
    let q = |s: u32, v: usize| -> u32 {
        let mut comp = 1u32 << v;
        let mut frontier = comp;
        while frontier != 0 {
            let mut next = 0u32;
            let mut f = frontier;
            while f != 0 {
                let w = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= adj[w] & s;
            }
            frontier = next & !comp;
            comp |= next;
        }
        let mut nb = 0u32;
        let mut c = comp;
        while c != 0 {
            let w = c.trailing_zeros() as usize;
            c &= c - 1;
            nb |= adj[w];
        }
        nb & !comp & !s
    };
    // tw[s]: best width when the vertices of s are eliminated first.
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut tw = vec![i32::MAX; 1usize << n];
    let mut choice = vec![0u8; 1usize << n];
    tw[0] = -1;
    for s in 1..=full {
        let mut best = i32::MAX;
        let mut arg = 0u8;
        let mut bits = s;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let rest = s & !(1 << v);
            let w = tw[rest as usize].max(q(rest, v).count_ones() as i32);
            if w < best {
                best = w;
                arg = v as u8;
            }
        }
        tw[s as usize] = best;
        choice[s as usize] = arg;
    }
    let width = tw[full as usize].max(0) as usize;
    // Elimination ordering, first eliminated first.
    let mut order = vec![0usize; n];
    let mut s = full;
    for i in (0..n).rev() {
        let v = choice[s as usize] as usize;
        order[i] = v;
        s &= !(1 << v);
    }
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut eliminated = 0u32;
    let mut bags = Vec::with_capacity(n);
    for &v in &order {
        let later = q(eliminated, v);
        let mut bag: BTreeSet<usize> = (0..n).filter(|&w| later >> w & 1 == 1).collect();
        bag.insert(v);
        bags.push(bag);
        eliminated |= 1 << v;
    }
    let mut tree = CGraph::new();
    for i in 0..n {
        tree.add_vertex(format!("t{i}"))?;
    }
    let t = Label::new("t", 2);
    let root = n - 1;
    for i in 0..n - 1 {
        let v = order[i];
        let parent = bags[i]
            .iter()
            .filter(|&&w| w != v)
            .map(|&w| pos[w])
            .min()
            .unwrap_or(root);
        tree.add_edge(format!("te{i}"), t.clone(), vec![parent, i])?;
    }
    Ok((width, TreeDecomposition { tree, bags }))
}
