//! Context-free grammars of parse-tree linearizations and their Parikh
//! images.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{check_regular, AnalysisError, Regularity, RuleForm};
use crate::slr::Sid;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// A productive SID rule, by index.
    Terminal(usize),
    Nonterminal(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production {
    pub lhs: String,
    pub rhs: Vec<Symbol>,
    /// The SID rule this production mirrors.
    pub rule: usize,
}

/// Terminals are the productive rules of the SID, nonterminals its
/// predicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg {
    /// Productive rule indices; position `i` is coordinate `i` of Parikh
    /// vectors.
    pub terminals: Vec<usize>,
    pub nonterminals: Vec<String>,
    pub productions: Vec<Production>,
    pub start: String,
}

impl Cfg {
    pub fn dimension(&self) -> usize {
        self.terminals.len()
    }

    /// Coordinate of a productive rule.
    pub fn coordinate(&self, rule: usize) -> Option<usize> {
        self.terminals.iter().position(|&r| r == rule)
    }
}

impl fmt::Display for Cfg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.productions {
            write!(f, "{} ->", p.lhs)?;
            if p.rhs.is_empty() {
                f.write_str(" ε")?;
            }
            for s in &p.rhs {
                match s {
                    Symbol::Terminal(r) => write!(f, " r{r}")?,
                    Symbol::Nonterminal(n) => write!(f, " {n}")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The grammar whose words are the infix linearizations of the parse trees
/// of `pred`.
pub fn sid_to_cfg(sid: &Sid, pred: &str) -> Result<Cfg, AnalysisError> {
    let reg = match check_regular(sid) {
        Regularity::Regular(r) => r,
        Regularity::NotRegular(v) => return Err(AnalysisError::NotRegular(v)),
    };
    if sid.arity(pred).is_none() {
        return Err(AnalysisError::UnknownPredicate(pred.into()));
    }
    let nt = |n: &str| Symbol::Nonterminal(n.into());
    let productions = sid
        .rules()
        .iter()
        .enumerate()
        .map(|(i, rule)| {
            let rhs = match &reg.forms[i] {
                RuleForm::Atom => vec![Symbol::Terminal(i)],
                RuleForm::Productive => core::iter::once(Symbol::Terminal(i))
                    .chain(rule.flat().preds.iter().map(|a| nt(&a.name)))
                    .collect(),
                RuleForm::Recursive { q } => vec![nt(&rule.head), nt(q)],
                RuleForm::Union { qs } => qs.iter().map(|q| nt(q)).collect(),
            };
            Production {
                lhs: rule.head.clone(),
                rhs,
                rule: i,
            }
        })
        .collect();
    Ok(Cfg {
        terminals: reg.productive_rules(),
        nonterminals: sid.predicates().keys().cloned().collect(),
        productions,
        start: pred.into(),
    })
}

/// `base + generators·ℕ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinearSet {
    pub base: Vec<usize>,
    pub generators: Vec<Vec<usize>>,
}

fn norm(v: &[usize]) -> usize {
    v.iter().sum()
}

fn sub(v: &[usize], w: &[usize]) -> Option<Vec<usize>> {
    v.iter().zip(w).map(|(a, b)| a.checked_sub(*b)).collect()
}

fn add(v: &[usize], w: &[usize]) -> Vec<usize> {
    v.iter().zip(w).map(|(a, b)| a + b).collect()
}

/// Whether `v` is a sum of nonzero `gens`, using generators `from..` only.
fn in_span(
    v: &[usize],
    gens: &[Vec<usize>],
    from: usize,
    memo: &mut BTreeSet<(Vec<usize>, usize)>,
) -> bool {
    if v.iter().all(|&x| x == 0) {
        return true;
    }
    if !memo.insert((v.to_vec(), from)) {
        return false;
    }
    (from..gens.len()).any(|i| sub(v, &gens[i]).is_some_and(|rest| in_span(&rest, gens, i, memo)))
}

impl LinearSet {
    pub fn contains(&self, v: &[usize]) -> bool {
        sub(v, &self.base)
            .is_some_and(|rest| in_span(&rest, &self.generators, 0, &mut BTreeSet::new()))
    }

    fn includes(&self, other: &LinearSet) -> bool {
        self.contains(&other.base)
            && other
                .generators
                .iter()
                .all(|g| in_span(g, &self.generators, 0, &mut BTreeSet::new()))
    }
}

impl fmt::Display for LinearSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.base)?;
        for g in &self.generators {
            write!(f, " + {g:?}ℕ")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemilinearSet {
    pub dimension: usize,
    pub sets: Vec<LinearSet>,
}

impl SemilinearSet {
    pub fn contains(&self, v: &[usize]) -> bool {
        v.len() == self.dimension && self.sets.iter().any(|l| l.contains(v))
    }

    /// `max_j |b_j|` over the bases.
    pub fn max_base_norm(&self) -> usize {
        self.sets.iter().map(|l| norm(&l.base)).max().unwrap_or(0)
    }
}

/// Parikh vectors of subtrees, paired with the set of nonterminals used.
type Vectors = BTreeSet<(Vec<usize>, u64)>;

struct Image<'a> {
    cfg: &'a Cfg,
    index: BTreeMap<&'a str, usize>,
    by_lhs: Vec<Vec<&'a Production>>,
    cap: u8,
    bases: BTreeMap<(usize, Vec<u8>), Vectors>,
    free: BTreeMap<(usize, u64), Vectors>,
    /// Elementary pumps of each nonterminal, once computed.
    pumps: Vec<Vectors>,
    gens: BTreeMap<u64, Vec<Vec<usize>>>,
}

impl<'a> Image<'a> {
    fn new(cfg: &'a Cfg) -> Result<Self, AnalysisError> {
        let index: BTreeMap<&str, usize> = cfg
            .nonterminals
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        if cfg.nonterminals.len() > 64 {
            return Err(AnalysisError::TooLarge {
                size: cfg.nonterminals.len(),
                limit: 64,
            });
        }
        let mut by_lhs = vec![Vec::new(); cfg.nonterminals.len()];
        for p in &cfg.productions {
            let i = *index
                .get(p.lhs.as_str())
                .ok_or_else(|| AnalysisError::UnknownPredicate(p.lhs.clone()))?;
            for s in &p.rhs {
                match s {
                    Symbol::Nonterminal(n) if !index.contains_key(n.as_str()) => {
                        return Err(AnalysisError::UnknownPredicate(n.clone()))
                    }
                    Symbol::Terminal(r) if cfg.coordinate(*r).is_none() => {
                        return Err(AnalysisError::UnknownRule(*r))
                    }
                    _ => {}
                }
            }
            by_lhs[i].push(p);
        }
        Ok(Image {
            cfg,
            index,
            by_lhs,
            cap: 0,
            bases: BTreeMap::new(),
            free: BTreeMap::new(),
            pumps: Vec::new(),
            gens: BTreeMap::new(),
        })
    }

    fn reachable(&self, start: usize) -> u64 {
        let mut seen = 1u64 << start;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for p in &self.by_lhs[x] {
                for s in &p.rhs {
                    if let Symbol::Nonterminal(n) = s {
                        let y = self.index[n.as_str()];
                        if seen >> y & 1 == 0 {
                            seen |= 1 << y;
                            stack.push(y);
                        }
                    }
                }
            }
        }
        seen
    }

    fn zero(&self) -> Vec<usize> {
        vec![0; self.cfg.dimension()]
    }

    fn unit(&self, rule: usize) -> Vec<usize> {
        let mut v = self.zero();
        v[self.cfg.coordinate(rule).expect("terminal")] = 1;
        v
    }

    /// Pumps of the nonterminals in `mask` that use no others.
    fn generators(&mut self, mask: u64) -> &[Vec<usize>] {
        if !self.gens.contains_key(&mask) {
            let gens: Vec<Vec<usize>> = (0..self.pumps.len())
                .filter(|x| mask >> x & 1 == 1)
                .flat_map(|x| self.pumps[x].iter())
                .filter(|(_, k)| k & !mask == 0)
                .map(|(v, _)| v.clone())
                .collect();
            self.gens.insert(mask, reduce_generators(gens));
        }
        &self.gens[&mask]
    }

    /// Drops vectors that another vector with the same mask reaches by
    /// adding pumps of that mask: every completion of the dropped one is a
    /// completion of the kept one plus those pumps.
    fn prune(&mut self, set: Vectors) -> Vectors {
        let mut by_mask: BTreeMap<u64, Vec<Vec<usize>>> = BTreeMap::new();
        for (v, m) in set {
            by_mask.entry(m).or_default().push(v);
        }
        let mut out = BTreeSet::new();
        for (m, mut vs) in by_mask {
            vs.sort_by(|a, b| (norm(a), a).cmp(&(norm(b), b)));
            let gens = self.generators(m).to_vec();
            let mut kept: Vec<Vec<usize>> = Vec::new();
            for v in vs {
                let covered = kept.iter().any(|k| {
                    sub(&v, k).is_some_and(|d| in_span(&d, &gens, 0, &mut BTreeSet::new()))
                });
                if !covered {
                    kept.push(v);
                }
            }
            out.extend(kept.into_iter().map(|v| (v, m)));
        }
        out
    }

    /// Combines per-symbol alternatives of one production.
    fn product(
        &mut self,
        p: &Production,
        start: (Vec<usize>, u64),
        prune: bool,
        mut child: impl FnMut(&mut Self, usize) -> Vectors,
    ) -> Vectors {
        let mut acc: Vectors = BTreeSet::from([start]);
        for s in &p.rhs {
            let options: Vectors = match s {
                Symbol::Terminal(r) => BTreeSet::from([(self.unit(*r), 0)]),
                Symbol::Nonterminal(n) => child(self, self.index[n.as_str()]),
            };
            acc = acc
                .iter()
                .flat_map(|(v, m)| options.iter().map(move |(w, k)| (add(v, w), m | k)))
                .collect();
            if acc.is_empty() {
                break;
            }
            if prune {
                acc = self.prune(acc);
            }
        }
        acc
    }

    /// Trees of `x` in which no nonterminal occurs more than `cap` times on
    /// any path, given the occurrences above.
    fn capped(&mut self, x: usize, counts: Vec<u8>) -> Vectors {
        if counts[x] >= self.cap {
            return BTreeSet::new();
        }
        let key = (x, counts);
        if let Some(v) = self.bases.get(&key) {
            return v.clone();
        }
        let mut below = key.1.clone();
        below[x] += 1;
        let mut out = BTreeSet::new();
        for p in self.by_lhs[x].clone() {
            let b = below.clone();
            out.extend(self.product(p, (self.zero(), 1 << x), true, |me, y| {
                me.capped(y, b.clone())
            }));
        }
        let out = self.prune(out);
        self.bases.insert(key, out.clone());
        out
    }

    /// Trees of `x` repeating no nonterminal on any path, below ancestors
    /// `anc`.
    fn repetition_free(&mut self, x: usize, anc: u64) -> Vectors {
        if anc >> x & 1 == 1 {
            return BTreeSet::new();
        }
        if let Some(v) = self.free.get(&(x, anc)) {
            return v.clone();
        }
        let mut out = BTreeSet::new();
        for p in self.by_lhs[x].clone() {
            out.extend(self.product(p, (self.zero(), 1 << x), false, |me, y| {
                me.repetition_free(y, anc | 1 << x)
            }));
        }
        self.free.insert((x, anc), out.clone());
        out
    }

    /// Pumps `root ⇒ u root v` whose spine repeats no nonterminal and whose
    /// other subtrees repeat none on any path; `x` is the current spine node.
    fn elementary_pumps(&mut self, root: usize, x: usize, spine: u64) -> Vectors {
        let mut out = BTreeSet::new();
        for p in self.by_lhs[x].clone() {
            for (j, s) in p.rhs.iter().enumerate() {
                let Symbol::Nonterminal(n) = s else { continue };
                let y = self.index[n.as_str()];
                let rest: Vectors = if y == root {
                    BTreeSet::from([(self.zero(), 1 << y)])
                } else if spine >> y & 1 == 0 {
                    self.elementary_pumps(root, y, spine | 1 << y)
                } else {
                    continue;
                };
                if rest.is_empty() {
                    continue;
                }
                let mut acc: Vectors = BTreeSet::from([(self.zero(), 1 << x)]);
                for (k, t) in p.rhs.iter().enumerate() {
                    let options = if k == j {
                        rest.clone()
                    } else {
                        match t {
                            Symbol::Terminal(r) => BTreeSet::from([(self.unit(*r), 0)]),
                            Symbol::Nonterminal(m) => {
                                let z = self.index[m.as_str()];
                                self.repetition_free(z, 0)
                            }
                        }
                    };
                    acc = acc
                        .iter()
                        .flat_map(|(v, m)| options.iter().map(move |(w, k)| (add(v, w), m | k)))
                        .collect();
                }
                out.extend(acc);
            }
        }
        out
    }
}

/// Drops generators that are sums of the others.
fn reduce_generators(mut gens: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    gens.retain(|g| g.iter().any(|&x| x > 0));
    gens.sort();
    gens.dedup();
    gens.sort_by_key(|g| core::cmp::Reverse(norm(g)));
    let mut i = 0;
    while i < gens.len() {
        let others: Vec<Vec<usize>> = gens
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, g)| g.clone())
            .collect();
        if in_span(&gens[i], &others, 0, &mut BTreeSet::new()) {
            gens.remove(i);
        } else {
            i += 1;
        }
    }
    gens.sort();
    gens
}

/// The Parikh image of the grammar's language.
///
/// Every derivation tree splits into a tree in which no nonterminal occurs
/// more often on a path than there are nonterminals, using the same
/// nonterminals, plus pumps over those nonterminals. Each pump in turn splits
/// into pumps whose spine and side trees repeat no nonterminal.
pub fn parikh_image(cfg: &Cfg) -> Result<SemilinearSet, AnalysisError> {
    let mut im = Image::new(cfg)?;
    let start = *im
        .index
        .get(cfg.start.as_str())
        .ok_or_else(|| AnalysisError::UnknownPredicate(cfg.start.clone()))?;
    let n = cfg.nonterminals.len();
    im.pumps = (0..n).map(|x| im.elementary_pumps(x, x, 1 << x)).collect();
    im.cap = im.reachable(start).count_ones() as u8;
    let trees = im.capped(start, vec![0; n]);
    if trees.is_empty() {
        return Err(AnalysisError::EmptyLanguage);
    }
    let mut sets: Vec<LinearSet> = Vec::new();
    let mut by_mask: BTreeMap<u64, Vec<Vec<usize>>> = BTreeMap::new();
    for (v, m) in &trees {
        by_mask.entry(*m).or_default().push(v.clone());
    }
    for (mask, bases) in by_mask {
        let gens = im.generators(mask).to_vec();
        sets.extend(bases.into_iter().map(|base| LinearSet {
            base,
            generators: gens.clone(),
        }));
    }
    sets.sort_by(|a, b| {
        (norm(&a.base), &a.base, &a.generators).cmp(&(norm(&b.base), &b.base, &b.generators))
    });
    let mut kept: Vec<LinearSet> = Vec::new();
    for l in sets {
        if !kept.iter().any(|k| k.includes(&l)) {
            kept.push(l);
        }
    }
    let mut i = 0;
    while i < kept.len() {
        let covered = (0..kept.len()).any(|j| j != i && kept[j].includes(&kept[i]));
        if covered {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    kept.sort();
    Ok(SemilinearSet {
        dimension: cfg.dimension(),
        sets: kept,
    })
}
