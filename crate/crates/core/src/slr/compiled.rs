//! Formulas compiled to variable indices, shared by the model checker and the
//! model generator.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Sid, SlrError, SlrFormula, Var};

/// Conjuncts evaluated over one sub-model; `exists` range over its vertices.
#[derive(Clone, Debug, Default)]
pub(crate) struct Conj {
    pub exists: Vec<usize>,
    pub rels: Vec<(String, Vec<usize>)>,
    /// `(is_equality, x, y)`.
    pub pure: Vec<(bool, usize, usize)>,
    pub opaque: Vec<Opaque>,
}

#[derive(Clone, Debug)]
pub(crate) enum Opaque {
    Pred(usize, Vec<usize>),
    Nested(Conj),
}

#[derive(Clone, Debug)]
pub(crate) struct Unit {
    pub nvars: usize,
    pub conj: Conj,
}

#[derive(Clone, Debug)]
pub(crate) struct Program {
    pub pred_ids: BTreeMap<String, usize>,
    pub rules: Vec<Vec<Unit>>,
    /// Predicates that can reach themselves.
    pub recursive: Vec<bool>,
    /// Fewest edges of any model of each predicate.
    pub min_edges: Vec<usize>,
    /// Most edges of any model, for non-recursive predicates.
    pub max_edges: Vec<Option<usize>>,
}

impl Program {
    pub fn new(sid: &Sid) -> Result<Program, SlrError> {
        let pred_names: Vec<String> = sid.predicates().keys().cloned().collect();
        let pred_ids: BTreeMap<String, usize> = pred_names
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let n = pred_names.len();
        let mut prog = Program {
            pred_ids,
            rules: alloc::vec![Vec::new(); n],
            recursive: alloc::vec![false; n],
            min_edges: alloc::vec![0; n],
            max_edges: alloc::vec![None; n],
        };
        for r in sid.rules() {
            let unit = prog.compile(&r.body, &r.params)?;
            let id = prog.pred_ids[&r.head];
            prog.rules[id].push(unit);
        }
        prog.analyse();
        let mut rules = core::mem::take(&mut prog.rules);
        for unit in rules.iter_mut().flatten() {
            prog.order_parts(&mut unit.conj);
        }
        prog.rules = rules;
        Ok(prog)
    }

    /// Compiles `phi` with the given free variables bound to indices `0..free.len()`.
    pub fn compile(&self, phi: &SlrFormula, free: &[Var]) -> Result<Unit, SlrError> {
        let mut scope: Vec<(Var, usize)> = free.iter().cloned().zip(0..).collect();
        let mut next = free.len();
        let mut conj = Conj::default();
        self.compile_into(phi, &mut conj, &mut scope, &mut next)?;
        self.order_parts(&mut conj);
        Ok(Unit { nvars: next, conj })
    }

    fn analyse(&mut self) {
        let n = self.rules.len();
        let calls: Vec<Vec<usize>> = self
            .rules
            .iter()
            .map(|units| {
                let mut out = Vec::new();
                for u in units {
                    callees(&u.conj, &mut out);
                }
                out
            })
            .collect();
        for p in 0..n {
            let mut seen = alloc::vec![false; n];
            let mut stack = calls[p].clone();
            while let Some(q) = stack.pop() {
                if q == p {
                    self.recursive[p] = true;
                    break;
                }
                if !core::mem::replace(&mut seen[q], true) {
                    stack.extend(&calls[q]);
                }
            }
        }
        let mut min: Vec<Option<usize>> = alloc::vec![None; n];
        loop {
            let mut changed = false;
            for p in 0..n {
                let best = self.rules[p]
                    .iter()
                    .filter_map(|u| conj_bound(&u.conj, &|q| min[q]))
                    .min();
                if best.is_some() && best != min[p] {
                    min[p] = best;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.min_edges = min.into_iter().map(|m| m.unwrap_or(usize::MAX)).collect();
        let mut max: Vec<Option<usize>> = alloc::vec![None; n];
        loop {
            let mut changed = false;
            let open: Vec<usize> = (0..n)
                .filter(|&p| !self.recursive[p] && max[p].is_none())
                .collect();
            for p in open {
                let bounds: Option<Vec<usize>> = self.rules[p]
                    .iter()
                    .map(|u| conj_bound(&u.conj, &|q| max[q]))
                    .collect();
                if let Some(b) = bounds {
                    max[p] = Some(b.into_iter().max().unwrap_or(0));
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.max_edges = max;
    }

    fn part_recursive(&self, part: &Opaque) -> bool {
        match part {
            Opaque::Pred(id, _) => self.recursive[*id],
            Opaque::Nested(c) => c.opaque.iter().any(|p| self.part_recursive(p)),
        }
    }

    /// Puts non-recursive parts first; they are cheap to refute.
    fn order_parts(&self, conj: &mut Conj) {
        for part in conj.opaque.iter_mut() {
            if let Opaque::Nested(inner) = part {
                self.order_parts(inner);
            }
        }
        conj.opaque.sort_by_key(|p| self.part_recursive(p));
    }

    pub fn part_min(&self, part: &Opaque) -> usize {
        match part {
            Opaque::Pred(id, _) => self.min_edges[*id],
            Opaque::Nested(c) => conj_bound(c, &|q| Some(self.min_edges[q])).unwrap_or(usize::MAX),
        }
    }

    pub fn part_max(&self, part: &Opaque) -> Option<usize> {
        match part {
            Opaque::Pred(id, _) => self.max_edges[*id],
            Opaque::Nested(c) => conj_bound(c, &|q| self.max_edges[q]),
        }
    }

    fn lookup(scope: &[(Var, usize)], v: &Var) -> Result<usize, SlrError> {
        scope
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|&(_, i)| i)
            .ok_or_else(|| SlrError::UnboundVariable(v.clone()))
    }

    fn compile_into(
        &self,
        phi: &SlrFormula,
        conj: &mut Conj,
        scope: &mut Vec<(Var, usize)>,
        next: &mut usize,
    ) -> Result<(), SlrError> {
        match phi {
            SlrFormula::Emp => {}
            SlrFormula::Eq(x, y) => {
                conj.pure
                    .push((true, Self::lookup(scope, x)?, Self::lookup(scope, y)?))
            }
            SlrFormula::Neq(x, y) => {
                conj.pure
                    .push((false, Self::lookup(scope, x)?, Self::lookup(scope, y)?))
            }
            SlrFormula::Rel { label, args } => {
                let a = args
                    .iter()
                    .map(|v| Self::lookup(scope, v))
                    .collect::<Result<_, _>>()?;
                conj.rels.push((label.clone(), a));
            }
            SlrFormula::Pred { name, args } => {
                let id = *self
                    .pred_ids
                    .get(name)
                    .ok_or_else(|| SlrError::UndeclaredSymbol(name.clone()))?;
                let a = args
                    .iter()
                    .map(|v| Self::lookup(scope, v))
                    .collect::<Result<_, _>>()?;
                conj.opaque.push(Opaque::Pred(id, a));
            }
            SlrFormula::Sep(parts) => {
                for p in parts {
                    if let SlrFormula::Exists(..) = p {
                        let mut inner = Conj::default();
                        self.compile_into(p, &mut inner, scope, next)?;
                        conj.opaque.push(Opaque::Nested(inner));
                    } else {
                        self.compile_into(p, conj, scope, next)?;
                    }
                }
            }
            SlrFormula::Exists(x, body) => {
                let idx = *next;
                *next += 1;
                conj.exists.push(idx);
                scope.push((x.clone(), idx));
                self.compile_into(body, conj, scope, next)?;
                scope.pop();
            }
        }
        Ok(())
    }
}

fn callees(conj: &Conj, out: &mut Vec<usize>) {
    for part in &conj.opaque {
        match part {
            Opaque::Pred(id, _) => out.push(*id),
            Opaque::Nested(inner) => callees(inner, out),
        }
    }
}

/// Edge count bound of a conjunction given bounds of its predicates.
fn conj_bound(conj: &Conj, pred: &dyn Fn(usize) -> Option<usize>) -> Option<usize> {
    let mut total = conj.rels.len();
    for part in &conj.opaque {
        let b = match part {
            Opaque::Pred(id, _) => pred(*id)?,
            Opaque::Nested(inner) => conj_bound(inner, pred)?,
        };
        total = total.saturating_add(b);
    }
    Some(total)
}
