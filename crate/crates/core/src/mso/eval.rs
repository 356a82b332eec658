use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::formula::{MsoFormula, Sort};
use super::MsoError;
use crate::graph::CGraph;

/// Advisory size for formulas with set quantifiers: evaluation enumerates
/// all `2^(|V|+|E|)` subsets per quantifier.
pub const MSO_SOFT_LIMIT: usize = 14;

/// Largest domain a set quantifier may range over.
pub const MSO_SET_LIMIT: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Vertex(usize),
    Edge(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MsoValue {
    Element(Element),
    Set(BTreeSet<Element>),
}

pub type MsoStore = BTreeMap<String, MsoValue>;

enum Node {
    Bool(bool),
    Eq(usize, usize),
    /// Label index into the graph's labels, if the label occurs.
    Edg(Option<usize>, Vec<usize>),
    Rel(Option<usize>, Vec<usize>),
    Member(usize, usize),
    Not(usize),
    And(Vec<usize>),
    Exists {
        slot: usize,
        sort: Sort,
        set: bool,
        body: usize,
        /// Slots free in the quantified formula, the memo key.
        free: Vec<usize>,
    },
}

/// A formula resolved against a graph: variables become slots of an
/// environment holding element ids or set bitmasks.
pub(crate) struct Compiled {
    nodes: Vec<Node>,
    root: usize,
    slots: usize,
    /// Slots of the free variables, by name.
    pub(crate) free: BTreeMap<String, usize>,
}

struct Compiler<'a> {
    labels: &'a BTreeMap<String, usize>,
    nodes: Vec<Node>,
    slots: usize,
}

impl Compiler<'_> {
    fn push(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn slot(scope: &[(String, usize)], v: &str) -> usize {
        scope
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|&(_, s)| s)
            .expect("free variables are bound")
    }

    /// Returns the node and the slots free in it.
    fn compile(
        &mut self,
        phi: &MsoFormula,
        scope: &mut Vec<(String, usize)>,
    ) -> (usize, BTreeSet<usize>) {
        let args_of = |args: &[String], scope: &[(String, usize)]| -> Vec<usize> {
            args.iter().map(|a| Self::slot(scope, a)).collect()
        };
        match phi {
            MsoFormula::Bool(b) => (self.push(Node::Bool(*b)), BTreeSet::new()),
            MsoFormula::Eq(x, y) => {
                let (a, b) = (Self::slot(scope, x), Self::slot(scope, y));
                (self.push(Node::Eq(a, b)), BTreeSet::from([a, b]))
            }
            MsoFormula::Edg { label, args } | MsoFormula::Rel { label, args } => {
                let slots = args_of(args, scope);
                let free = slots.iter().copied().collect();
                let l = self.labels.get(label.as_str()).copied();
                let node = if matches!(phi, MsoFormula::Edg { .. }) {
                    Node::Edg(l, slots)
                } else {
                    Node::Rel(l, slots)
                };
                (self.push(node), free)
            }
            MsoFormula::Member(s, x) => {
                let (a, b) = (Self::slot(scope, s), Self::slot(scope, x));
                (self.push(Node::Member(a, b)), BTreeSet::from([a, b]))
            }
            MsoFormula::Not(p) => {
                let (n, free) = self.compile(p, scope);
                (self.push(Node::Not(n)), free)
            }
            MsoFormula::And(ps) => {
                let mut free = BTreeSet::new();
                let mut kids = Vec::new();
                for p in ps {
                    let (n, f) = self.compile(p, scope);
                    kids.push(n);
                    free.extend(f);
                }
                (self.push(Node::And(kids)), free)
            }
            MsoFormula::Exists { var, sort, body } | MsoFormula::ExistsSet { var, sort, body } => {
                let slot = self.slots;
                self.slots += 1;
                scope.push((var.clone(), slot));
                let (b, mut free) = self.compile(body, scope);
                scope.pop();
                free.remove(&slot);
                let node = Node::Exists {
                    slot,
                    sort: *sort,
                    set: matches!(phi, MsoFormula::ExistsSet { .. }),
                    body: b,
                    free: free.iter().copied().collect(),
                };
                (self.push(node), free)
            }
        }
    }
}

pub(crate) struct Evaluator<'g> {
    nv: usize,
    /// Label index and attachment of each edge.
    edges: Vec<(usize, &'g [usize])>,
    tuples: BTreeSet<(usize, &'g [usize])>,
    labels: BTreeMap<String, usize>,
    memo: BTreeMap<(usize, Vec<u64>), bool>,
}

impl<'g> Evaluator<'g> {
    pub(crate) fn new(g: &'g CGraph) -> Self {
        let labels: BTreeMap<String, usize> = g
            .labels()
            .into_iter()
            .zip(0..)
            .map(|(l, i)| (l.name, i))
            .collect();
        let edges: Vec<(usize, &[usize])> = g
            .edges()
            .iter()
            .map(|e| (labels[e.label.name.as_str()], e.attach.as_slice()))
            .collect();
        Evaluator {
            nv: g.vertex_count(),
            tuples: edges.iter().copied().collect(),
            edges,
            labels,
            memo: BTreeMap::new(),
        }
    }

    fn domain(&self) -> usize {
        self.nv + self.edges.len()
    }

    pub(crate) fn element_id(&self, e: Element) -> Option<u64> {
        match e {
            Element::Vertex(v) if v < self.nv => Some(v as u64),
            Element::Edge(i) if i < self.edges.len() => Some((self.nv + i) as u64),
            _ => None,
        }
    }

    /// Compiles `phi` with its free variables in the given order first.
    pub(crate) fn compile(&self, phi: &MsoFormula, order: &[String]) -> Result<Compiled, MsoError> {
        let mut names: Vec<String> = order.to_vec();
        for v in phi.free_vars().into_keys() {
            if !names.contains(&v) {
                names.push(v);
            }
        }
        let mut scope: Vec<(String, usize)> = names.iter().cloned().zip(0..).collect();
        let mut c = Compiler {
            labels: &self.labels,
            nodes: Vec::new(),
            slots: names.len(),
        };
        let (root, _) = c.compile(phi, &mut scope);
        let sets = c.nodes.iter().any(|n| {
            matches!(
                n,
                Node::Exists {
                    set: true,
                    sort: Sort::Any,
                    ..
                }
            )
        });
        let vsets = c.nodes.iter().any(|n| {
            matches!(
                n,
                Node::Exists {
                    set: true,
                    sort: Sort::Vertex,
                    ..
                }
            )
        });
        let size = if sets {
            self.domain()
        } else if vsets {
            self.nv
        } else {
            0
        };
        if size > MSO_SET_LIMIT {
            return Err(MsoError::TooLarge {
                size,
                limit: MSO_SET_LIMIT,
            });
        }
        Ok(Compiled {
            nodes: c.nodes,
            root,
            slots: c.slots,
            free: names.into_iter().zip(0..).collect(),
        })
    }

    pub(crate) fn env(&self, c: &Compiled) -> Vec<u64> {
        alloc::vec![0; c.slots]
    }

    pub(crate) fn run(&mut self, c: &Compiled, env: &mut [u64]) -> bool {
        self.memo.clear();
        self.eval(c, c.root, env)
    }

    fn eval(&mut self, c: &Compiled, n: usize, env: &mut [u64]) -> bool {
        match &c.nodes[n] {
            Node::Bool(b) => *b,
            Node::Eq(a, b) => env[*a] == env[*b],
            Node::Edg(l, args) => {
                let Some(l) = *l else { return false };
                let x = env[args[0]] as usize;
                x >= self.nv
                    && self.edges[x - self.nv].0 == l
                    && self.edges[x - self.nv]
                        .1
                        .iter()
                        .zip(&args[1..])
                        .all(|(&v, &s)| env[s] == v as u64)
            }
            Node::Rel(l, args) => {
                let Some(l) = *l else { return false };
                let vals: Vec<usize> = args.iter().map(|&s| env[s] as usize).collect();
                vals.iter().all(|&v| v < self.nv) && self.tuples.contains(&(l, vals.as_slice()))
            }
            Node::Member(s, x) => env[*x] < 64 && env[*s] >> env[*x] & 1 == 1,
            Node::Not(p) => !self.eval(c, *p, env),
            Node::And(ps) => ps.iter().all(|&p| self.eval(c, p, env)),
            Node::Exists {
                slot,
                sort,
                set,
                body,
                free,
            } => {
                let key = (n, free.iter().map(|&s| env[s]).collect::<Vec<u64>>());
                if let Some(&r) = self.memo.get(&key) {
                    return r;
                }
                let range = match sort {
                    Sort::Any => self.domain(),
                    Sort::Vertex => self.nv,
                };
                let saved = env[*slot];
                let r = if *set {
                    let all = if range == 64 {
                        u64::MAX
                    } else {
                        (1u64 << range) - 1
                    };
                    let mut sub = 0u64;
                    loop {
                        env[*slot] = sub;
                        if self.eval(c, *body, env) {
                            break true;
                        }
                        if sub == all {
                            break false;
                        }
                        sub += 1;
                    }
                } else {
                    (0..range as u64).any(|v| {
                        env[*slot] = v;
                        self.eval(c, *body, env)
                    })
                };
                env[*slot] = saved;
                self.memo.insert(key, r);
                r
            }
        }
    }
}

/// Decides `G, s ⊩ φ`. First-order variables range over vertices and edges
/// (vertices only under [`Sort::Vertex`]); set variables over subsets of the
/// same range.
pub fn mso_eval(g: &CGraph, store: &MsoStore, phi: &MsoFormula) -> Result<bool, MsoError> {
    phi.check_kinds()?;
    let mut ev = Evaluator::new(g);
    let order: Vec<String> = phi.free_vars().into_keys().collect();
    let c = ev.compile(phi, &order)?;
    let mut env = ev.env(&c);
    for (name, kind) in phi.free_vars() {
        let value = store
            .get(&name)
            .ok_or_else(|| MsoError::UnboundVariable(name.clone()))?;
        let slot = c.free[&name];
        env[slot] = match (value, kind) {
            (MsoValue::Element(e), super::VarKind::First) => ev
                .element_id(*e)
                .ok_or_else(|| MsoError::OutOfRange(name.clone()))?,
            (MsoValue::Set(s), super::VarKind::Second) => {
                let mut mask = 0u64;
                for &e in s {
                    let id = ev
                        .element_id(e)
                        .ok_or_else(|| MsoError::OutOfRange(name.clone()))?;
                    if id >= 64 {
                        return Err(MsoError::TooLarge {
                            size: ev.domain(),
                            limit: 64,
                        });
                    }
                    mask |= 1 << id;
                }
                mask
            }
            _ => return Err(MsoError::KindMismatch(name)),
        };
    }
    Ok(ev.run(&c, &mut env))
}
