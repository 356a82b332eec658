use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Var = String;

/// SLR formulas.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SlrFormula {
    Emp,
    Eq(Var, Var),
    Neq(Var, Var),
    Rel {
        label: String,
        args: Vec<Var>,
    },
    Pred {
        name: String,
        args: Vec<Var>,
    },
    /// Separating conjunction of any number of conjuncts; the empty list is `emp`.
    Sep(Vec<SlrFormula>),
    Exists(Var, Box<SlrFormula>),
}

impl SlrFormula {
    pub fn rel(label: &str, args: &[&str]) -> Self {
        SlrFormula::Rel {
            label: label.into(),
            args: args.iter().map(|&a| a.into()).collect(),
        }
    }

    pub fn pred(name: &str, args: &[&str]) -> Self {
        SlrFormula::Pred {
            name: name.into(),
            args: args.iter().map(|&a| a.into()).collect(),
        }
    }

    pub fn eq(x: &str, y: &str) -> Self {
        SlrFormula::Eq(x.into(), y.into())
    }

    pub fn neq(x: &str, y: &str) -> Self {
        SlrFormula::Neq(x.into(), y.into())
    }

    pub fn exists(vars: &[&str], body: SlrFormula) -> Self {
        vars.iter()
            .rev()
            .fold(body, |acc, &v| SlrFormula::Exists(v.into(), Box::new(acc)))
    }

    /// Separating conjunction, flattening nested lists.
    pub fn sep<I: IntoIterator<Item = SlrFormula>>(parts: I) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                SlrFormula::Sep(inner) => out.extend(inner),
                SlrFormula::Emp => {}
                other => out.push(other),
            }
        }
        match out.len() {
            0 => SlrFormula::Emp,
            1 => out.pop().expect("one element"),
            _ => SlrFormula::Sep(out),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let mut add = |v: &Var, bound: &Vec<Var>| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            SlrFormula::Emp => {}
            SlrFormula::Eq(x, y) | SlrFormula::Neq(x, y) => {
                add(x, bound);
                add(y, bound);
            }
            SlrFormula::Rel { args, .. } | SlrFormula::Pred { args, .. } => {
                for a in args {
                    add(a, bound);
                }
            }
            SlrFormula::Sep(parts) => {
                for p in parts {
                    p.collect_free(bound, out);
                }
            }
            SlrFormula::Exists(x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// True iff the formula has neither quantifiers nor predicate atoms.
    pub fn is_qpf(&self) -> bool {
        match self {
            SlrFormula::Pred { .. } | SlrFormula::Exists(..) => false,
            SlrFormula::Sep(parts) => parts.iter().all(SlrFormula::is_qpf),
            _ => true,
        }
    }

    /// Top-level conjuncts of a qpf formula, `emp` dropped.
    pub fn conjuncts(&self) -> Vec<&SlrFormula> {
        match self {
            SlrFormula::Sep(parts) => parts.iter().flat_map(|p| p.conjuncts()).collect(),
            SlrFormula::Emp => Vec::new(),
            other => alloc::vec![other],
        }
    }

    /// Renames free occurrences of variables according to `f`.
    pub fn rename(&self, f: &dyn Fn(&str) -> Option<Var>) -> SlrFormula {
        let r = |v: &Var| f(v).unwrap_or_else(|| v.clone());
        match self {
            SlrFormula::Emp => SlrFormula::Emp,
            SlrFormula::Eq(x, y) => SlrFormula::Eq(r(x), r(y)),
            SlrFormula::Neq(x, y) => SlrFormula::Neq(r(x), r(y)),
            SlrFormula::Rel { label, args } => SlrFormula::Rel {
                label: label.clone(),
                args: args.iter().map(r).collect(),
            },
            SlrFormula::Pred { name, args } => SlrFormula::Pred {
                name: name.clone(),
                args: args.iter().map(r).collect(),
            },
            SlrFormula::Sep(parts) => SlrFormula::Sep(parts.iter().map(|p| p.rename(f)).collect()),
            SlrFormula::Exists(x, body) => {
                let inner = |v: &str| if v == x { None } else { f(v) };
                SlrFormula::Exists(x.clone(), Box::new(body.rename(&inner)))
            }
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Var]) -> fmt::Result {
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        f.write_str(a)?;
    }
    f.write_str(")")
}

impl fmt::Display for SlrFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlrFormula::Emp => f.write_str("emp"),
            SlrFormula::Eq(x, y) => write!(f, "{x} = {y}"),
            SlrFormula::Neq(x, y) => write!(f, "{x} != {y}"),
            SlrFormula::Rel { label, args } => {
                f.write_str(label)?;
                write_args(f, args)
            }
            SlrFormula::Pred { name, args } => {
                f.write_str(name)?;
                write_args(f, args)
            }
            SlrFormula::Sep(parts) => {
                if parts.is_empty() {
                    return f.write_str("emp");
                }
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    match p {
                        SlrFormula::Exists(..) | SlrFormula::Sep(_) => write!(f, "({p})")?,
                        _ => write!(f, "{p}")?,
                    }
                }
                Ok(())
            }
            SlrFormula::Exists(..) => {
                let mut vars = Vec::new();
                let mut body = self;
                while let SlrFormula::Exists(x, b) = body {
                    vars.push(x.as_str());
                    body = b;
                }
                write!(f, "exists {} . {body}", vars.join(" "))
            }
        }
    }
}

/// An atom `name(args)`, relation or predicate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub name: String,
    pub args: Vec<Var>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pure {
    Eq(Var, Var),
    Neq(Var, Var),
}

/// A rule body in prenex form: `exists ȳ . pure * rels * preds`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlatBody {
    pub existentials: Vec<Var>,
    pub pure: Vec<Pure>,
    pub rels: Vec<Atom>,
    pub preds: Vec<Atom>,
}

impl FlatBody {
    /// Flattens `phi`, renaming nested quantified variables apart from `reserved`.
    pub fn of(phi: &SlrFormula, reserved: &[Var]) -> FlatBody {
        let mut out = FlatBody::default();
        let mut taken: BTreeSet<Var> = reserved.iter().cloned().collect();
        taken.extend(phi.free_vars());
        flatten_into(phi, &mut out, &mut taken);
        out
    }

    /// The qpf part `pure * rels` as a formula.
    pub fn qpf(&self) -> SlrFormula {
        SlrFormula::sep(
            self.pure
                .iter()
                .map(|p| match p {
                    Pure::Eq(x, y) => SlrFormula::Eq(x.clone(), y.clone()),
                    Pure::Neq(x, y) => SlrFormula::Neq(x.clone(), y.clone()),
                })
                .chain(self.rels.iter().map(|a| SlrFormula::Rel {
                    label: a.name.clone(),
                    args: a.args.clone(),
                })),
        )
    }

    pub fn to_formula(&self) -> SlrFormula {
        let body = SlrFormula::sep(core::iter::once(self.qpf()).chain(self.preds.iter().map(
            |a| SlrFormula::Pred {
                name: a.name.clone(),
                args: a.args.clone(),
            },
        )));
        self.existentials
            .iter()
            .rev()
            .fold(body, |acc, v| SlrFormula::Exists(v.clone(), Box::new(acc)))
    }

    /// Existentials occurring in the qpf part.
    pub fn qpf_existentials(&self) -> Vec<Var> {
        let fv = self.qpf().free_vars();
        self.existentials
            .iter()
            .filter(|y| fv.contains(*y))
            .cloned()
            .collect()
    }
}

fn flatten_into(phi: &SlrFormula, out: &mut FlatBody, taken: &mut BTreeSet<Var>) {
    match phi {
        SlrFormula::Emp => {}
        SlrFormula::Eq(x, y) => out.pure.push(Pure::Eq(x.clone(), y.clone())),
        SlrFormula::Neq(x, y) => out.pure.push(Pure::Neq(x.clone(), y.clone())),
        SlrFormula::Rel { label, args } => out.rels.push(Atom {
            name: label.clone(),
            args: args.clone(),
        }),
        SlrFormula::Pred { name, args } => out.preds.push(Atom {
            name: name.clone(),
            args: args.clone(),
        }),
        SlrFormula::Sep(parts) => {
            for p in parts {
                flatten_into(p, out, taken);
            }
        }
        SlrFormula::Exists(x, body) => {
            let fresh = if taken.contains(x) {
                fresh_var(x, taken)
            } else {
                x.clone()
            };
            taken.insert(fresh.clone());
            out.existentials.push(fresh.clone());
            if &fresh == x {
                flatten_into(body, out, taken);
            } else {
                let renamed = body.rename(&|v| (v == x).then(|| fresh.clone()));
                flatten_into(&renamed, out, taken);
            }
        }
    }
}

pub(crate) fn fresh_var(base: &str, taken: &BTreeSet<Var>) -> Var {
    let mut i = 1usize;
    loop {
        let cand = alloc::format!("{base}_{i}");
        if !taken.contains(&cand) {
            return cand;
        }
        i += 1;
    }
}
