//! Model checking of SLR formulas on finite c-graphs.
//!
//! Every SLR model has exactly the vertices of its edges, so a sub-model is
//! identified by its edge set, kept as a 64-bit mask.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::compiled::{Conj, Opaque, Program};
use super::{Sid, SlrError, SlrFormula, Var};
use crate::graph::{CGraph, GraphError};

/// Maps variables to vertex names; names outside the graph denote values that
/// are not vertices of it.
pub type Store = BTreeMap<Var, String>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    True,
    /// No derivation using at most the given number of predicate unfoldings.
    FalseAtFuel,
}

/// `2·(|V| + |E|) + |Δ|`, enough unfoldings for regular SIDs.
pub fn default_fuel(g: &CGraph, sid: &Sid) -> u32 {
    (2 * (g.vertex_count() + g.edge_count()) + sid.rules().len()) as u32
}

type Goal = (u64, usize, Vec<usize>);

struct Checker<'a> {
    prog: &'a Program,
    edges: Vec<(&'a str, &'a [usize])>,
    /// Least number of unfoldings deriving each goal, if derivable.
    memo: BTreeMap<Goal, Option<u32>>,
    /// Goals being evaluated, with their stack depth.
    active: BTreeMap<Goal, usize>,
    /// Shallowest active goal reached since the current goal started.
    low: usize,
}

fn min_opt(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<'a> Checker<'a> {
    fn vertices_of(&self, mask: u64) -> Vec<usize> {
        let mut vs: Vec<usize> = (0..self.edges.len())
            .filter(|&e| mask >> e & 1 == 1)
            .flat_map(|e| self.edges[e].1.iter().copied())
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    fn sat_conj(&mut self, conj: &Conj, env: &mut Vec<Option<usize>>, mask: u64) -> Option<u32> {
        let scope = self.vertices_of(mask);
        self.match_rels(conj, 0, mask, env, &scope)
    }

    fn match_rels(
        &mut self,
        conj: &Conj,
        i: usize,
        rem: u64,
        env: &mut Vec<Option<usize>>,
        scope: &[usize],
    ) -> Option<u32> {
        if i == conj.rels.len() {
            return self.bind_exists(conj, 0, rem, env, scope);
        }
        let (label, args) = &conj.rels[i];
        let mut best = None;
        for e in 0..self.edges.len() {
            if rem >> e & 1 == 0 {
                continue;
            }
            let (l, attach) = self.edges[e];
            if l != label || attach.len() != args.len() {
                continue;
            }
            let mut bound = Vec::new();
            let mut ok = true;
            for (k, &a) in args.iter().enumerate() {
                match env[a] {
                    Some(v) if v != attach[k] => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        env[a] = Some(attach[k]);
                        bound.push(a);
                    }
                }
            }
            if ok {
                best = min_opt(
                    best,
                    self.match_rels(conj, i + 1, rem & !(1 << e), env, scope),
                );
            }
            for a in bound {
                env[a] = None;
            }
            if best == Some(0) {
                break;
            }
        }
        best
    }

    fn bind_exists(
        &mut self,
        conj: &Conj,
        j: usize,
        rem: u64,
        env: &mut Vec<Option<usize>>,
        scope: &[usize],
    ) -> Option<u32> {
        let Some(&x) = conj.exists.get(j) else {
            let pure_ok = conj.pure.iter().all(|&(is_eq, a, b)| {
                let (a, b) = (env[a].expect("bound"), env[b].expect("bound"));
                (a == b) == is_eq
            });
            if !pure_ok {
                return None;
            }
            return self.split(&conj.opaque, 0, rem, env);
        };
        if env[x].is_some() {
            return self.bind_exists(conj, j + 1, rem, env, scope);
        }
        let mut best = None;
        for &v in scope {
            env[x] = Some(v);
            best = min_opt(best, self.bind_exists(conj, j + 1, rem, env, scope));
            if best == Some(0) {
                break;
            }
        }
        env[x] = None;
        best
    }

    fn split(
        &mut self,
        parts: &[Opaque],
        idx: usize,
        rem: u64,
        env: &mut Vec<Option<usize>>,
    ) -> Option<u32> {
        if parts.is_empty() {
            return (rem == 0).then_some(0);
        }
        if idx + 1 == parts.len() {
            return self.eval_opaque(&parts[idx], rem, env);
        }
        let prog = self.prog;
        let lo = prog.part_min(&parts[idx]);
        let hi = prog.part_max(&parts[idx]).unwrap_or(usize::MAX);
        let rest_lo = parts[idx + 1..]
            .iter()
            .fold(0usize, |a, p| a.saturating_add(prog.part_min(p)));
        let total = rem.count_ones() as usize;
        let mut best: Option<u32> = None;
        let mut sub = rem;
        loop {
            let k = sub.count_ones() as usize;
            let fits = lo <= k && k <= hi && rest_lo <= total - k;
            if let Some(c1) = fits
                .then(|| self.eval_opaque(&parts[idx], sub, env))
                .flatten()
            {
                if best.is_none_or(|b| c1 < b) {
                    if let Some(c2) = self.split(parts, idx + 1, rem & !sub, env) {
                        best = min_opt(best, Some(c1 + c2));
                    }
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rem;
        }
        best
    }

    fn eval_opaque(
        &mut self,
        part: &Opaque,
        mask: u64,
        env: &mut Vec<Option<usize>>,
    ) -> Option<u32> {
        match part {
            Opaque::Pred(id, args) => {
                let vals = args.iter().map(|&a| env[a].expect("bound")).collect();
                self.sat_pred(mask, *id, vals)
            }
            Opaque::Nested(inner) => self.sat_conj(inner, env, mask),
        }
    }

    /// A least derivation never repeats a goal below itself, so a goal met
    /// again while active is treated as underivable. Results that relied on
    /// this for a goal further up the stack are not memoised.
    fn sat_pred(&mut self, mask: u64, id: usize, vals: Vec<usize>) -> Option<u32> {
        let key = (mask, id, vals);
        if let Some(&c) = self.memo.get(&key) {
            return c;
        }
        if let Some(&d) = self.active.get(&key) {
            self.low = self.low.min(d);
            return None;
        }
        let depth = self.active.len();
        self.active.insert(key.clone(), depth);
        let saved = core::mem::replace(&mut self.low, usize::MAX);
        let prog = self.prog;
        let mut best = None;
        for unit in &prog.rules[id] {
            let mut env = vec![None; unit.nvars];
            for (i, &v) in key.2.iter().enumerate() {
                env[i] = Some(v);
            }
            let r = self.sat_conj(&unit.conj, &mut env, mask);
            best = min_opt(best, r.map(|c| c + 1));
            if best == Some(1) {
                break;
            }
        }
        self.active.remove(&key);
        let low = self.low;
        if low >= depth {
            self.memo.insert(key, best);
            self.low = saved;
        } else {
            self.low = saved.min(low);
        }
        best
    }
}

/// Decides `G, s ⊨ φ` up to `fuel` predicate unfoldings. The least number of
/// unfoldings is computed exactly and compared against `fuel`.
pub fn slr_models(
    g: &CGraph,
    store: &Store,
    phi: &SlrFormula,
    sid: &Sid,
    fuel: u32,
) -> Result<Verdict, SlrError> {
    Ok(match least_unfoldings(g, store, phi, sid)? {
        Some(c) if c <= fuel => Verdict::True,
        _ => Verdict::FalseAtFuel,
    })
}

/// The least number of predicate unfoldings of any derivation of `G, s ⊨ φ`.
pub fn least_unfoldings(
    g: &CGraph,
    store: &Store,
    phi: &SlrFormula,
    sid: &Sid,
) -> Result<Option<u32>, SlrError> {
    if g.type_n() != 0 {
        return Err(GraphError::TypeMismatch {
            expected: 0,
            found: g.type_n(),
        }
        .into());
    }
    if !g.is_simple() {
        return Err(SlrError::NotSimple);
    }
    if g.edge_count() > 64 {
        return Err(SlrError::TooLarge {
            size: g.edge_count(),
            limit: 64,
        });
    }
    sid.check_formula(phi)?;
    let prog = Program::new(sid)?;
    let free: Vec<Var> = phi.free_vars().into_iter().collect();
    let unit = prog.compile(phi, &free)?;
    let mut env = vec![None; unit.nvars];
    let mut outside: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, x) in free.iter().enumerate() {
        let name = store
            .get(x)
            .ok_or_else(|| SlrError::UnboundVariable(x.clone()))?;
        let val = match g.vertex_index(name) {
            Some(v) => v,
            None => {
                let next = g.vertex_count() + outside.len();
                *outside.entry(name.as_str()).or_insert(next)
            }
        };
        env[i] = Some(val);
    }
    if !g.isolated_vertices().is_empty() {
        return Ok(None);
    }
    let mut checker = Checker {
        prog: &prog,
        edges: g
            .edges()
            .iter()
            .map(|e| (e.label.name.as_str(), e.attach.as_slice()))
            .collect(),
        memo: BTreeMap::new(),
        active: BTreeMap::new(),
        low: usize::MAX,
    };
    let full = if g.edge_count() == 64 {
        u64::MAX
    } else {
        (1u64 << g.edge_count()) - 1
    };
    Ok(checker.sat_conj(&unit.conj, &mut env, full))
}
