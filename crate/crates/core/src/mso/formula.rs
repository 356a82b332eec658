use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::MsoError;
use crate::graph::Alphabet;

/// Range of a quantifier.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    /// Vertices and edges.
    #[default]
    Any,
    Vertex,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MsoFormula {
    Bool(bool),
    Eq(String, String),
    /// `edg_a(x1, ..)`: `x1` is an `a`-edge attached to the others in order.
    Edg {
        label: String,
        args: Vec<String>,
    },
    /// `a(x1, ..)`: some `a`-edge is attached to the arguments in order.
    Rel {
        label: String,
        args: Vec<String>,
    },
    /// `X(x)`.
    Member(String, String),
    Not(Box<MsoFormula>),
    And(Vec<MsoFormula>),
    Exists {
        var: String,
        sort: Sort,
        body: Box<MsoFormula>,
    },
    ExistsSet {
        var: String,
        sort: Sort,
        body: Box<MsoFormula>,
    },
}

/// Whether a variable ranges over elements or over sets of elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum VarKind {
    First,
    Second,
}

impl MsoFormula {
    pub fn tt() -> Self {
        MsoFormula::Bool(true)
    }

    pub fn ff() -> Self {
        MsoFormula::Bool(false)
    }

    pub fn eq(x: &str, y: &str) -> Self {
        MsoFormula::Eq(x.into(), y.into())
    }

    pub fn edg(label: &str, args: &[&str]) -> Self {
        MsoFormula::Edg {
            label: label.into(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }

    pub fn rel(label: &str, args: &[&str]) -> Self {
        MsoFormula::Rel {
            label: label.into(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }

    pub fn member(set: &str, x: &str) -> Self {
        MsoFormula::Member(set.into(), x.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(phi: MsoFormula) -> Self {
        match phi {
            MsoFormula::Not(inner) => *inner,
            other => MsoFormula::Not(Box::new(other)),
        }
    }

    pub fn and<I: IntoIterator<Item = MsoFormula>>(parts: I) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                MsoFormula::And(inner) => out.extend(inner),
                MsoFormula::Bool(true) => {}
                other => out.push(other),
            }
        }
        match out.len() {
            0 => MsoFormula::tt(),
            1 => out.pop().expect("one part"),
            _ => MsoFormula::And(out),
        }
    }

    pub fn or<I: IntoIterator<Item = MsoFormula>>(parts: I) -> Self {
        let parts: Vec<MsoFormula> = parts.into_iter().collect();
        if parts.is_empty() {
            return MsoFormula::ff();
        }
        MsoFormula::not(MsoFormula::and(parts.into_iter().map(MsoFormula::not)))
    }

    pub fn implies(a: MsoFormula, b: MsoFormula) -> Self {
        MsoFormula::not(MsoFormula::and([a, MsoFormula::not(b)]))
    }

    pub fn iff(a: MsoFormula, b: MsoFormula) -> Self {
        MsoFormula::and([
            MsoFormula::implies(a.clone(), b.clone()),
            MsoFormula::implies(b, a),
        ])
    }

    pub fn exists(var: &str, body: MsoFormula) -> Self {
        MsoFormula::Exists {
            var: var.into(),
            sort: Sort::Any,
            body: Box::new(body),
        }
    }

    pub fn forall(var: &str, body: MsoFormula) -> Self {
        MsoFormula::not(MsoFormula::exists(var, MsoFormula::not(body)))
    }

    pub fn exists_set(var: &str, body: MsoFormula) -> Self {
        MsoFormula::ExistsSet {
            var: var.into(),
            sort: Sort::Any,
            body: Box::new(body),
        }
    }

    pub fn forall_set(var: &str, body: MsoFormula) -> Self {
        MsoFormula::not(MsoFormula::exists_set(var, MsoFormula::not(body)))
    }

    /// `∃x. φ(x) ∧ ∀y. φ(y) → x = y`, with `y` fresh.
    pub fn exists_unique(var: &str, body: MsoFormula) -> Self {
        let y = body.fresh_var(&format!("{var}'"));
        let renamed = body.rename_free(var, &y);
        MsoFormula::exists(
            var,
            MsoFormula::and([
                body,
                MsoFormula::forall(&y, MsoFormula::implies(renamed, MsoFormula::eq(var, &y))),
            ]),
        )
    }

    /// `∃x. X(x) ∧ ∀y. X(y) → y = x`.
    pub fn single(set: &str) -> Self {
        let x = avoiding("x", &[set]);
        let y = avoiding("y", &[set, &x]);
        MsoFormula::exists(
            &x,
            MsoFormula::and([
                MsoFormula::member(set, &x),
                MsoFormula::forall(
                    &y,
                    MsoFormula::implies(MsoFormula::member(set, &y), MsoFormula::eq(&y, &x)),
                ),
            ]),
        )
    }

    /// `x` is a vertex: it is the edge element of no `edg_a` atom.
    pub fn vert(alphabet: &Alphabet, x: &str) -> Self {
        MsoFormula::not(MsoFormula::or(alphabet.labels().map(|l| {
            let ys: Vec<String> = (1..=l.arity)
                .map(|i| avoiding(&format!("y{i}"), &[x]))
                .collect();
            let mut args = vec![x.to_string()];
            args.extend(ys.iter().cloned());
            let atom = MsoFormula::Edg {
                label: l.name,
                args,
            };
            ys.iter()
                .rev()
                .fold(atom, |acc, y| MsoFormula::exists(y, acc))
        })))
    }

    /// `x` is an `a`-edge whose `i`-th attachment (from 1) is `y`.
    pub fn incid(label: &str, arity: usize, i: usize, x: &str, y: &str) -> Self {
        let zs: Vec<String> = (1..=arity)
            .map(|j| avoiding(&format!("z{j}"), &[x, y]))
            .collect();
        let mut args = vec![x.to_string()];
        args.extend(zs.iter().cloned());
        let body = MsoFormula::and([
            MsoFormula::Edg {
                label: label.into(),
                args,
            },
            MsoFormula::eq(y, &zs[i - 1]),
        ]);
        zs.iter()
            .rev()
            .fold(body, |acc, z| MsoFormula::exists(z, acc))
    }

    /// Free variables with their kinds.
    pub fn free_vars(&self) -> BTreeMap<String, VarKind> {
        let mut out = BTreeMap::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeMap<String, VarKind>) {
        let mut add = |v: &String, k: VarKind, bound: &Vec<String>| {
            if !bound.contains(v) {
                out.entry(v.clone()).or_insert(k);
            }
        };
        match self {
            MsoFormula::Bool(_) => {}
            MsoFormula::Eq(x, y) => {
                add(x, VarKind::First, bound);
                add(y, VarKind::First, bound);
            }
            MsoFormula::Edg { args, .. } | MsoFormula::Rel { args, .. } => {
                for a in args {
                    add(a, VarKind::First, bound);
                }
            }
            MsoFormula::Member(s, x) => {
                add(s, VarKind::Second, bound);
                add(x, VarKind::First, bound);
            }
            MsoFormula::Not(p) => p.collect_free(bound, out),
            MsoFormula::And(ps) => {
                for p in ps {
                    p.collect_free(bound, out);
                }
            }
            MsoFormula::Exists { var, body, .. } | MsoFormula::ExistsSet { var, body, .. } => {
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring in the formula, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            MsoFormula::Eq(x, y) | MsoFormula::Member(x, y) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            MsoFormula::Edg { args, .. } | MsoFormula::Rel { args, .. } => {
                out.extend(args.iter().cloned())
            }
            MsoFormula::Exists { var, .. } | MsoFormula::ExistsSet { var, .. } => {
                out.insert(var.clone());
            }
            _ => {}
        });
        out
    }

    fn walk(&self, f: &mut impl FnMut(&MsoFormula)) {
        f(self);
        match self {
            MsoFormula::Not(p) => p.walk(f),
            MsoFormula::And(ps) => ps.iter().for_each(|p| p.walk(f)),
            MsoFormula::Exists { body, .. } | MsoFormula::ExistsSet { body, .. } => body.walk(f),
            _ => {}
        }
    }

    /// A name based on `base` that occurs nowhere in the formula.
    pub fn fresh_var(&self, base: &str) -> String {
        let used = self.all_vars();
        let mut name = String::from(base);
        while used.contains(&name) {
            name.push('\'');
        }
        name
    }

    /// Replaces free occurrences of `from` by `to`, renaming binders that
    /// would capture `to`.
    pub fn rename_free(&self, from: &str, to: &str) -> MsoFormula {
        let map = BTreeMap::from([(from.to_string(), to.to_string())]);
        self.substitute(&map)
    }

    /// Simultaneous capture-avoiding renaming of free variables.
    pub fn substitute(&self, map: &BTreeMap<String, String>) -> MsoFormula {
        let r = |v: &String| map.get(v).cloned().unwrap_or_else(|| v.clone());
        match self {
            MsoFormula::Bool(b) => MsoFormula::Bool(*b),
            MsoFormula::Eq(x, y) => MsoFormula::Eq(r(x), r(y)),
            MsoFormula::Edg { label, args } => MsoFormula::Edg {
                label: label.clone(),
                args: args.iter().map(r).collect(),
            },
            MsoFormula::Rel { label, args } => MsoFormula::Rel {
                label: label.clone(),
                args: args.iter().map(r).collect(),
            },
            MsoFormula::Member(s, x) => MsoFormula::Member(r(s), r(x)),
            MsoFormula::Not(p) => MsoFormula::Not(Box::new(p.substitute(map))),
            MsoFormula::And(ps) => MsoFormula::And(ps.iter().map(|p| p.substitute(map)).collect()),
            MsoFormula::Exists { var, sort, body } | MsoFormula::ExistsSet { var, sort, body } => {
                let mut inner = map.clone();
                inner.remove(var);
                let captured = inner.values().any(|t| t == var)
                    && body.free_vars().keys().any(|f| inner.contains_key(f));
                let (var, body) = if captured {
                    let mut avoid = body.all_vars();
                    avoid.extend(inner.keys().cloned());
                    avoid.extend(inner.values().cloned());
                    let mut fresh = var.clone();
                    while avoid.contains(&fresh) {
                        fresh.push('\'');
                    }
                    inner.insert(var.clone(), fresh.clone());
                    (fresh, body.substitute(&inner))
                } else {
                    (var.clone(), body.substitute(&inner))
                };
                let body = Box::new(body);
                match self {
                    MsoFormula::Exists { .. } => MsoFormula::Exists {
                        var,
                        sort: *sort,
                        body,
                    },
                    _ => MsoFormula::ExistsSet {
                        var,
                        sort: *sort,
                        body,
                    },
                }
            }
        }
    }

    /// The same formula with every quantifier ranging over vertices only,
    /// the reading of formulas written with `a(x1, ..)` atoms.
    pub fn over_vertices(&self) -> MsoFormula {
        match self {
            MsoFormula::Not(p) => MsoFormula::Not(Box::new(p.over_vertices())),
            MsoFormula::And(ps) => MsoFormula::And(ps.iter().map(|p| p.over_vertices()).collect()),
            MsoFormula::Exists { var, body, .. } => MsoFormula::Exists {
                var: var.clone(),
                sort: Sort::Vertex,
                body: Box::new(body.over_vertices()),
            },
            MsoFormula::ExistsSet { var, body, .. } => MsoFormula::ExistsSet {
                var: var.clone(),
                sort: Sort::Vertex,
                body: Box::new(body.over_vertices()),
            },
            other => other.clone(),
        }
    }

    /// Replaces each `a(x1, ..)` by `∃y. edg_a(y, x1, ..)` with `y` fresh.
    pub fn desugar(&self) -> MsoFormula {
        match self {
            MsoFormula::Rel { label, args } => {
                let taken: Vec<&str> = args.iter().map(String::as_str).collect();
                let y = avoiding("e", &taken);
                let mut all = vec![y.clone()];
                all.extend(args.iter().cloned());
                MsoFormula::exists(
                    &y,
                    MsoFormula::Edg {
                        label: label.clone(),
                        args: all,
                    },
                )
            }
            MsoFormula::Not(p) => MsoFormula::Not(Box::new(p.desugar())),
            MsoFormula::And(ps) => MsoFormula::And(ps.iter().map(|p| p.desugar()).collect()),
            MsoFormula::Exists { var, sort, body } => MsoFormula::Exists {
                var: var.clone(),
                sort: *sort,
                body: Box::new(body.desugar()),
            },
            MsoFormula::ExistsSet { var, sort, body } => MsoFormula::ExistsSet {
                var: var.clone(),
                sort: *sort,
                body: Box::new(body.desugar()),
            },
            other => other.clone(),
        }
    }

    /// Checks label arities against `alphabet` and that no variable is used
    /// with both kinds.
    pub fn check(&self, alphabet: &Alphabet) -> Result<(), MsoError> {
        self.check_in(Some(alphabet), &mut Vec::new(), &mut BTreeMap::new())
    }

    /// Checks only that no variable is used with both kinds.
    pub fn check_kinds(&self) -> Result<(), MsoError> {
        self.check_in(None, &mut Vec::new(), &mut BTreeMap::new())
    }

    fn check_in(
        &self,
        alphabet: Option<&Alphabet>,
        scope: &mut Vec<(String, VarKind)>,
        free: &mut BTreeMap<String, VarKind>,
    ) -> Result<(), MsoError> {
        let mut use_var = |v: &String, k: VarKind, scope: &Vec<(String, VarKind)>| {
            let found = scope
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|&(_, k)| k)
                .unwrap_or_else(|| *free.entry(v.clone()).or_insert(k));
            if found == k {
                Ok(())
            } else {
                Err(MsoError::KindMismatch(v.clone()))
            }
        };
        let label_arity = |label: &str| match alphabet {
            Some(a) => a
                .arity(label)
                .map(Some)
                .ok_or_else(|| MsoError::UnknownLabel(label.into())),
            None => Ok(None),
        };
        match self {
            MsoFormula::Bool(_) => Ok(()),
            MsoFormula::Eq(x, y) => {
                use_var(x, VarKind::First, scope)?;
                use_var(y, VarKind::First, scope)
            }
            MsoFormula::Edg { label, args } | MsoFormula::Rel { label, args } => {
                let extra = usize::from(matches!(self, MsoFormula::Edg { .. }));
                if let Some(ar) = label_arity(label)?.filter(|ar| args.len() != ar + extra) {
                    return Err(MsoError::Arity {
                        label: label.clone(),
                        expected: ar + extra,
                        found: args.len(),
                    });
                }
                args.iter()
                    .try_for_each(|a| use_var(a, VarKind::First, scope))
            }
            MsoFormula::Member(s, x) => {
                use_var(s, VarKind::Second, scope)?;
                use_var(x, VarKind::First, scope)
            }
            MsoFormula::Not(p) => p.check_in(alphabet, scope, free),
            MsoFormula::And(ps) => ps
                .iter()
                .try_for_each(|p| p.check_in(alphabet, scope, free)),
            MsoFormula::Exists { var, body, .. } | MsoFormula::ExistsSet { var, body, .. } => {
                let kind = if matches!(self, MsoFormula::Exists { .. }) {
                    VarKind::First
                } else {
                    VarKind::Second
                };
                scope.push((var.clone(), kind));
                let r = body.check_in(alphabet, scope, free);
                scope.pop();
                r
            }
        }
    }
}

impl fmt::Display for MsoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MsoFormula::Bool(b) => write!(f, "{b}"),
            MsoFormula::Eq(x, y) => write!(f, "{x} = {y}"),
            MsoFormula::Edg { label, args } => write!(f, "edg_{label}({})", args.join(", ")),
            MsoFormula::Rel { label, args } => write!(f, "{label}({})", args.join(", ")),
            MsoFormula::Member(s, x) => write!(f, "{s}({x})"),
            MsoFormula::Not(p) => match &**p {
                MsoFormula::Eq(x, y) => write!(f, "{x} != {y}"),
                MsoFormula::Exists { var, sort, body } => {
                    write!(f, "forall{} {var} . {}", sort_suffix(*sort), Body(body))
                }
                MsoFormula::ExistsSet { var, sort, body } => {
                    write!(f, "forallS{} {var} . {}", sort_suffix(*sort), Body(body))
                }
                MsoFormula::And(ps) if ps.iter().all(|p| matches!(p, MsoFormula::Not(_))) => {
                    let parts: Vec<String> = ps.iter().map(|p| format!("{}", Negated(p))).collect();
                    write!(f, "({})", parts.join(" | "))
                }
                MsoFormula::And(ps) if ps.len() == 2 && matches!(ps[1], MsoFormula::Not(_)) => {
                    write!(f, "({} -> {})", Atomic(&ps[0]), Negated(&ps[1]))
                }
                other => write!(f, "!{}", Atomic(other)),
            },
            MsoFormula::And(ps) => {
                let parts: Vec<String> = ps.iter().map(|p| format!("{}", Atomic(p))).collect();
                write!(f, "({})", parts.join(" & "))
            }
            MsoFormula::Exists { var, sort, body } => {
                write!(f, "exists{} {var} . {body}", sort_suffix(*sort))
            }
            MsoFormula::ExistsSet { var, sort, body } => {
                write!(f, "existsS{} {var} . {body}", sort_suffix(*sort))
            }
        }
    }
}

fn avoiding(base: &str, taken: &[&str]) -> String {
    let mut name = String::from(base);
    while taken.contains(&name.as_str()) {
        name.push('\'');
    }
    name
}

fn sort_suffix(sort: Sort) -> &'static str {
    match sort {
        Sort::Any => "",
        Sort::Vertex => "V",
    }
}

/// Prints `p` without its outer negation; `p` is expected to be negated.
struct Negated<'a>(&'a MsoFormula);

impl fmt::Display for Negated<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            MsoFormula::Not(inner) => write!(f, "{}", Atomic(inner)),
            other => write!(f, "!{}", Atomic(other)),
        }
    }
}

/// The body of a universal quantifier, stored negated.
struct Body<'a>(&'a MsoFormula);

impl fmt::Display for Body<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            MsoFormula::Not(inner) => write!(f, "{inner}"),
            other => write!(f, "!{}", Atomic(other)),
        }
    }
}

/// Parenthesises quantified formulas in operand position.
struct Atomic<'a>(&'a MsoFormula);

impl fmt::Display for Atomic<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            MsoFormula::Exists { .. } | MsoFormula::ExistsSet { .. } => write!(f, "({})", self.0),
            MsoFormula::Not(p)
                if matches!(
                    **p,
                    MsoFormula::Exists { .. } | MsoFormula::ExistsSet { .. }
                ) =>
            {
                write!(f, "({})", self.0)
            }
            other => write!(f, "{other}"),
        }
    }
}
