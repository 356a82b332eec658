//! Pumping sets and rigidity.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::cfg::{parikh_image, sid_to_cfg, SemilinearSet};
use super::{regular, AnalysisError};
use crate::slr::{is_equality_free, Sid, SlrFormula, Var};

pub type Coloring = BTreeMap<Var, BTreeSet<String>>;

/// `col(x)`: the labels `a` such that `a(x, .., x)` occurs in `psi`.
pub fn coloring(psi: &SlrFormula) -> Coloring {
    let mut out: Coloring = psi
        .free_vars()
        .into_iter()
        .map(|x| (x, BTreeSet::new()))
        .collect();
    for c in psi.conjuncts() {
        if let SlrFormula::Rel { label, args } = c {
            if let Some((x, rest)) = args.split_first() {
                if rest.iter().all(|y| y == x) {
                    out.entry(x.clone()).or_default().insert(label.clone());
                }
            }
        }
    }
    out
}

/// Pumping queries against the Parikh image of a predicate's parse trees.
#[derive(Clone, Debug)]
pub struct Pumping {
    /// Productive rules, in coordinate order.
    pub rules: Vec<usize>,
    /// `None` when the predicate has no parse tree.
    pub image: Option<SemilinearSet>,
}

impl Pumping {
    pub fn new(sid: &Sid, pred: &str) -> Result<Self, AnalysisError> {
        let cfg = sid_to_cfg(sid, pred)?;
        let image = match parikh_image(&cfg) {
            Ok(s) => Some(s),
            Err(AnalysisError::EmptyLanguage) => None,
            Err(e) => return Err(e),
        };
        Ok(Pumping {
            rules: cfg.terminals,
            image,
        })
    }

    /// Whether the occurrence counts of all rules in `subset` grow together
    /// without bound.
    pub fn is_pumping(&self, subset: &[usize]) -> Result<bool, AnalysisError> {
        if subset.is_empty() {
            return Err(AnalysisError::EmptySubset);
        }
        let coords = subset
            .iter()
            .map(|&r| {
                self.rules
                    .iter()
                    .position(|&x| x == r)
                    .ok_or(AnalysisError::UnknownRule(r))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let Some(image) = &self.image else {
            return Ok(false);
        };
        Ok(image.sets.iter().any(|l| {
            coords
                .iter()
                .all(|&c| l.generators.iter().any(|g| g[c] > 0))
        }))
    }
}

/// Whether `subset` of productive rules is pumping for `pred`.
pub fn is_pumping(sid: &Sid, pred: &str, subset: &[usize]) -> Result<bool, AnalysisError> {
    Pumping::new(sid, pred)?.is_pumping(subset)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RigidityViolation {
    pub rule1: usize,
    pub rule2: usize,
    pub y1: Var,
    pub y2: Var,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidityReport {
    pub rigid: bool,
    /// Pumping pairs `(ρ1, ρ2)` with `ρ1 <= ρ2`; `(ρ, ρ)` stands for `{ρ}`.
    pub pumping_pairs: Vec<(usize, usize)>,
    pub violations: Vec<RigidityViolation>,
    /// Coloring of the existentials of each productive rule's qpf body.
    pub colorings: BTreeMap<usize, Coloring>,
}

fn existential_colorings(sid: &Sid, rules: &[usize]) -> BTreeMap<usize, Coloring> {
    rules
        .iter()
        .map(|&r| {
            let body = sid.rules()[r].flat();
            let col = coloring(&body.qpf());
            let ys: BTreeSet<Var> = body.qpf_existentials().into_iter().collect();
            (r, col.into_iter().filter(|(y, _)| ys.contains(y)).collect())
        })
        .collect()
}

fn pair_violations(
    colorings: &BTreeMap<usize, Coloring>,
    r1: usize,
    r2: usize,
    out: &mut Vec<RigidityViolation>,
) {
    for (y1, c1) in &colorings[&r1] {
        for (y2, c2) in &colorings[&r2] {
            if r1 == r2 && y1 > y2 {
                continue;
            }
            if c1.is_disjoint(c2) {
                out.push(RigidityViolation {
                    rule1: r1,
                    rule2: r2,
                    y1: y1.clone(),
                    y2: y2.clone(),
                });
            }
        }
    }
}

fn prepare(sid: &Sid, pred: &str) -> Result<Pumping, AnalysisError> {
    regular(sid)?;
    if !is_equality_free(sid) {
        return Err(AnalysisError::NotEqualityFree);
    }
    if sid.arity(pred) != Some(0) {
        return Err(AnalysisError::NotNullary(pred.into()));
    }
    Pumping::new(sid, pred)
}

/// Checks rigidity on pumping singletons and pairs; every subset of a
/// pumping set is pumping, so larger sets add no pairs.
pub fn check_rigid(sid: &Sid, pred: &str) -> Result<RigidityReport, AnalysisError> {
    let pumping = prepare(sid, pred)?;
    let colorings = existential_colorings(sid, &pumping.rules);
    let mut pumping_pairs = Vec::new();
    let mut violations = Vec::new();
    for (i, &r1) in pumping.rules.iter().enumerate() {
        for &r2 in &pumping.rules[i..] {
            if pumping.is_pumping(&[r1, r2])? {
                pumping_pairs.push((r1, r2));
                pair_violations(&colorings, r1, r2, &mut violations);
            }
        }
    }
    Ok(RigidityReport {
        rigid: violations.is_empty(),
        pumping_pairs,
        violations,
        colorings,
    })
}

/// Most productive rules [`check_rigid_exhaustive`] accepts.
pub const EXHAUSTIVE_RIGIDITY_LIMIT: usize = 16;

/// Checks rigidity on every pumping subset of productive rules.
pub fn check_rigid_exhaustive(sid: &Sid, pred: &str) -> Result<RigidityReport, AnalysisError> {
    let pumping = prepare(sid, pred)?;
    let n = pumping.rules.len();
    if n > EXHAUSTIVE_RIGIDITY_LIMIT {
        return Err(AnalysisError::TooLarge {
            size: n,
            limit: EXHAUSTIVE_RIGIDITY_LIMIT,
        });
    }
    let colorings = existential_colorings(sid, &pumping.rules);
    let mut pairs = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| pumping.rules[i])
            .collect();
        if !pumping.is_pumping(&subset)? {
            continue;
        }
        for (i, &r1) in subset.iter().enumerate() {
            for &r2 in &subset[i..] {
                pairs.insert((r1, r2));
            }
        }
    }
    let mut violations = Vec::new();
    for &(r1, r2) in &pairs {
        pair_violations(&colorings, r1, r2, &mut violations);
    }
    Ok(RigidityReport {
        rigid: violations.is_empty(),
        pumping_pairs: pairs.into_iter().collect(),
        violations,
        colorings,
    })
}
