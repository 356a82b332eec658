//! Exhaustive generation of the small models of a nullary predicate.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::compiled::{Conj, Opaque, Program};
use super::{slr_models, Sid, SlrError, SlrFormula, Store, Verdict};
use crate::graph::{CGraph, Edge, IsoSet, Label};

/// Largest vertex bound accepted by [`enumerate_models_bruteforce`].
pub const BRUTEFORCE_LIMIT: usize = 6;

#[derive(Clone)]
enum Goal<'a> {
    Pred {
        id: usize,
        args: Vec<usize>,
        chain: Vec<usize>,
    },
    Conj {
        conj: &'a Conj,
        env: Vec<Option<usize>>,
        chain: Vec<usize>,
    },
}

impl Goal<'_> {
    fn key(&self) -> (usize, Vec<Option<usize>>, Vec<usize>) {
        match self {
            Goal::Pred { id, args, chain } => {
                (*id, args.iter().map(|&a| Some(a)).collect(), chain.clone())
            }
            Goal::Conj { conj, env, chain } => (
                usize::MAX - (*conj as *const Conj as usize),
                env.clone(),
                chain.clone(),
            ),
        }
    }
}

type Key<'a> = (
    usize,
    Vec<(&'a str, Vec<usize>, Vec<usize>)>,
    Vec<Vec<usize>>,
    Vec<(usize, Vec<Option<usize>>, Vec<usize>)>,
);

#[derive(Clone)]
struct State<'a> {
    /// Edges with the scopes they belong to.
    edges: Vec<(&'a str, Vec<usize>, Vec<usize>)>,
    /// Values that existentials occurring in no relation atom took, per scope.
    scopes: Vec<Vec<usize>>,
    used: usize,
    goals: Vec<Goal<'a>>,
    fuel: u32,
}

impl<'a> State<'a> {
    fn key(&self) -> Key<'a> {
        let mut edges = self.edges.clone();
        edges.sort();
        let mut goals: Vec<_> = self.goals.iter().map(Goal::key).collect();
        goals.sort();
        (self.used, edges, self.scopes.clone(), goals)
    }
}

struct Gen<'a> {
    prog: &'a Program,
    max_vertices: usize,
    /// Predicates that can reach themselves; expanded after the others so that
    /// edges appear early and duplicates prune the search.
    recursive: Vec<bool>,
    /// Largest fuel each state was explored with.
    visited: BTreeMap<Key<'a>, u32>,
    found: BTreeSet<(usize, Vec<(&'a str, Vec<usize>)>)>,
}

impl<'a> Gen<'a> {
    fn run(&mut self, mut st: State<'a>) {
        let key = st.key();
        match self.visited.get(&key) {
            Some(&f) if f >= st.fuel => return,
            _ => {
                self.visited.insert(key, st.fuel);
            }
        }
        let pick = st
            .goals
            .iter()
            .rposition(|g| match g {
                Goal::Pred { id, .. } => !self.recursive[*id],
                Goal::Conj { .. } => true,
            })
            .or(st.goals.len().checked_sub(1));
        let Some(goal) = pick.map(|i| st.goals.remove(i)) else {
            self.finish(st);
            return;
        };
        match goal {
            Goal::Pred { id, args, chain } => {
                if st.fuel == 0 {
                    return;
                }
                st.fuel -= 1;
                let prog = self.prog;
                for unit in &prog.rules[id] {
                    let mut env = vec![None; unit.nvars];
                    for (i, &a) in args.iter().enumerate() {
                        env[i] = Some(a);
                    }
                    let mut next = st.clone();
                    next.goals.push(Goal::Conj {
                        conj: &unit.conj,
                        env,
                        chain: chain.clone(),
                    });
                    self.run(next);
                }
            }
            Goal::Conj {
                conj,
                env,
                mut chain,
            } => {
                let loose = conj
                    .exists
                    .iter()
                    .any(|x| !conj.rels.iter().any(|(_, args)| args.contains(x)));
                if loose {
                    chain.push(st.scopes.len());
                    st.scopes.push(Vec::new());
                }
                self.bind(st, conj, env, chain, 0, loose);
            }
        }
    }

    fn bind(
        &mut self,
        mut st: State<'a>,
        conj: &'a Conj,
        mut env: Vec<Option<usize>>,
        chain: Vec<usize>,
        j: usize,
        loose: bool,
    ) {
        if let Some(&x) = conj.exists.get(j) {
            let top = (st.used + 1).min(self.max_vertices);
            let in_rel = conj.rels.iter().any(|(_, args)| args.contains(&x));
            for v in 0..top {
                let mut next = st.clone();
                if v == st.used {
                    next.used += 1;
                }
                if loose && !in_rel {
                    next.scopes.last_mut().expect("scope").push(v);
                }
                env[x] = Some(v);
                self.bind(next, conj, env.clone(), chain.clone(), j + 1, loose);
            }
            return;
        }
        let val = |a: usize| env[a].expect("bound");
        if !conj.pure.iter().all(|&(eq, a, b)| (val(a) == val(b)) == eq) {
            return;
        }
        for (label, args) in &conj.rels {
            let attach: Vec<usize> = args.iter().map(|&a| val(a)).collect();
            if st
                .edges
                .iter()
                .any(|(l, at, _)| l == label && *at == attach)
            {
                return;
            }
            st.edges.push((label.as_str(), attach, chain.clone()));
        }
        for part in conj.opaque.iter().rev() {
            st.goals.push(match part {
                Opaque::Pred(id, args) => Goal::Pred {
                    id: *id,
                    args: args.iter().map(|&a| val(a)).collect(),
                    chain: chain.clone(),
                },
                Opaque::Nested(inner) => Goal::Conj {
                    conj: inner,
                    env: env.clone(),
                    chain: chain.clone(),
                },
            });
        }
        self.run(st);
    }

    fn finish(&mut self, st: State<'a>) {
        for (s, values) in st.scopes.iter().enumerate() {
            for &v in values {
                let covered = st
                    .edges
                    .iter()
                    .any(|(_, at, tag)| tag.contains(&s) && at.contains(&v));
                if !covered {
                    return;
                }
            }
        }
        let mut edges: Vec<(&str, Vec<usize>)> =
            st.edges.into_iter().map(|(l, at, _)| (l, at)).collect();
        edges.sort();
        self.found.insert((st.used, edges));
    }

    fn build(&self, used: usize, edges: &[(&str, Vec<usize>)]) -> CGraph {
        let vertices = (0..used).map(|i| alloc::format!("v{i}")).collect();
        let edges = edges
            .iter()
            .enumerate()
            .map(|(i, (l, at))| Edge {
                id: alloc::format!("e{i}"),
                label: Label::new(String::from(*l), at.len()),
                attach: at.clone(),
            })
            .collect();
        CGraph::from_parts_unchecked(vertices, edges, Vec::new())
    }
}

/// All models of the nullary predicate `pred` with at most `max_vertices`
/// vertices, up to isomorphism. Every result is re-checked with [`slr_models`].
pub fn enumerate_models_bruteforce(
    sid: &Sid,
    pred: &str,
    max_vertices: usize,
) -> Result<IsoSet, SlrError> {
    if max_vertices > BRUTEFORCE_LIMIT {
        return Err(SlrError::TooLarge {
            size: max_vertices,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    enumerate_models_bruteforce_with(sid, pred, max_vertices, None)
}

/// As [`enumerate_models_bruteforce`] without the size limit and with an
/// explicit unfolding budget.
pub fn enumerate_models_bruteforce_with(
    sid: &Sid,
    pred: &str,
    max_vertices: usize,
    fuel: Option<u32>,
) -> Result<IsoSet, SlrError> {
    match sid.arity(pred) {
        None => return Err(SlrError::UndeclaredSymbol(pred.into())),
        Some(0) => {}
        Some(_) => return Err(SlrError::NotNullary(pred.into())),
    }
    let prog = Program::new(sid)?;
    let max_edges: usize = sid
        .alphabet()
        .labels()
        .map(|l| max_vertices.saturating_pow(l.arity as u32))
        .fold(0usize, |a, b| a.saturating_add(b));
    let fuel = fuel.unwrap_or_else(|| {
        2u32.saturating_mul((max_vertices.saturating_add(max_edges)) as u32)
            .saturating_add(sid.rules().len() as u32)
    });
    let mut gen = Gen {
        prog: &prog,
        max_vertices,
        recursive: prog.recursive.clone(),
        visited: BTreeMap::new(),
        found: BTreeSet::new(),
    };
    gen.run(State {
        edges: Vec::new(),
        scopes: Vec::new(),
        used: 0,
        goals: vec![Goal::Pred {
            id: prog.pred_ids[pred],
            args: Vec::new(),
            chain: Vec::new(),
        }],
        fuel,
    });
    let phi = SlrFormula::pred(pred, &[]);
    let mut out = IsoSet::new();
    for (used, edges) in &gen.found {
        let g = gen.build(*used, edges);
        if out.contains(&g) {
            continue;
        }
        let fuel = super::default_fuel(&g, sid).max(fuel);
        if slr_models(&g, &Store::new(), &phi, sid, fuel)? == Verdict::True {
            out.insert(g);
        }
    }
    Ok(out)
}
