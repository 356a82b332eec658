//! Parse trees of regular SIDs and their enumeration.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{regular, GrammarError};
use crate::analysis::{RegularSid, RuleForm};
use crate::slr::Sid;

/// A parse tree node: a predicate occurrence and the productive rule
/// applications attached to it. Nodes of productive predicates carry exactly
/// one edge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParseTree {
    pub predicate: String,
    pub edges: Vec<TreeEdge>,
}

/// A productive rule application; `children[j]` derives the `j`-th predicate
/// atom of the rule body.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeEdge {
    pub rule: usize,
    pub children: Vec<ParseTree>,
}

impl ParseTree {
    pub fn leaf(predicate: &str) -> Self {
        ParseTree {
            predicate: predicate.into(),
            edges: Vec::new(),
        }
    }

    /// Number of productive edges.
    pub fn size(&self) -> usize {
        self.edges
            .iter()
            .map(|e| 1 + e.children.iter().map(ParseTree::size).sum::<usize>())
            .sum()
    }

    /// Occurrences of every rule, indexed by rule.
    pub fn rule_counts(&self, nrules: usize) -> Vec<usize> {
        let mut out = vec![0; nrules];
        self.count_into(&mut out);
        out
    }

    fn count_into(&self, out: &mut [usize]) {
        for e in &self.edges {
            out[e.rule] += 1;
            for c in &e.children {
                c.count_into(out);
            }
        }
    }

    /// The representative of the tree's isomorphism class: edges at each
    /// node sorted.
    pub fn normalized(&self) -> ParseTree {
        let mut edges: Vec<TreeEdge> = self
            .edges
            .iter()
            .map(|e| TreeEdge {
                rule: e.rule,
                children: e.children.iter().map(ParseTree::normalized).collect(),
            })
            .collect();
        edges.sort();
        ParseTree {
            predicate: self.predicate.clone(),
            edges,
        }
    }

    /// Edges in depth-first pre-order; the position of an edge is its number.
    pub fn edges_preorder(&self) -> Vec<&TreeEdge> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a ParseTree, out: &mut Vec<&'a TreeEdge>) {
            for e in &t.edges {
                out.push(e);
                for c in &e.children {
                    go(c, out);
                }
            }
        }
        go(self, &mut out);
        out
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.predicate)?;
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "r{}(", e.rule)?;
            for (j, c) in e.children.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        f.write_str("]")
    }
}

/// Checks the structural conditions of a parse tree.
pub fn check_parse_tree(sid: &Sid, reg: &RegularSid, tree: &ParseTree) -> Result<(), GrammarError> {
    let bad = |msg: String| Err(GrammarError::InvalidTree(msg));
    let Some(_) = sid.arity(&tree.predicate) else {
        return Err(GrammarError::UnknownPredicate(tree.predicate.clone()));
    };
    let mut heads: Vec<&str> = Vec::new();
    for e in &tree.edges {
        let Some(rule) = sid.rules().get(e.rule) else {
            return bad(alloc::format!("no rule {}", e.rule));
        };
        if !reg.is_productive_rule(e.rule) {
            return bad(alloc::format!("rule {} is not productive", e.rule));
        }
        let preds = rule.flat().preds;
        if preds.len() != e.children.len() {
            return bad(alloc::format!(
                "rule {} expects {} children",
                e.rule,
                preds.len()
            ));
        }
        for (a, c) in preds.iter().zip(&e.children) {
            if a.name != c.predicate {
                return bad(alloc::format!(
                    "child {} where {} is expected",
                    c.predicate,
                    a.name
                ));
            }
            check_parse_tree(sid, reg, c)?;
        }
        heads.push(&rule.head);
    }
    let admissible = if reg.productive.contains(&tree.predicate) {
        heads.len() == 1 && heads[0] == tree.predicate
    } else {
        admissible_multiset(sid, reg, &tree.predicate, &heads)
    };
    if admissible {
        Ok(())
    } else {
        bad(alloc::format!(
            "edges of a {} node are not derivable",
            tree.predicate
        ))
    }
}

/// Whether an unproductive node of `pred` may carry edges defining `heads`:
/// the heads of one union rule plus any number of recursively added ones.
fn admissible_multiset(sid: &Sid, reg: &RegularSid, pred: &str, heads: &[&str]) -> bool {
    let mut count: BTreeMap<&str, usize> = BTreeMap::new();
    for h in heads {
        *count.entry(h).or_default() += 1;
    }
    let rules: Vec<&RuleForm> = sid.rules_of(pred).map(|i| &reg.forms[i]).collect();
    let recursive: Vec<&str> = rules
        .iter()
        .filter_map(|f| match f {
            RuleForm::Recursive { q } => Some(q.as_str()),
            _ => None,
        })
        .collect();
    rules.iter().any(|f| {
        let RuleForm::Union { qs } = f else {
            return false;
        };
        let mut rest = count.clone();
        for q in qs {
            match rest.get_mut(q.as_str()) {
                Some(n) if *n > 0 => *n -= 1,
                _ => return false,
            }
        }
        rest.iter().all(|(q, &n)| n == 0 || recursive.contains(q))
    })
}

/// A tree with its relation atom counts per label.
#[derive(Clone)]
struct Counted {
    tree: ParseTree,
    atoms: Vec<usize>,
}

struct Enumerator<'a> {
    sid: &'a Sid,
    reg: RegularSid,
    labels: Vec<String>,
    limits: Vec<usize>,
    /// Relation atom counts of every rule.
    rule_atoms: Vec<Vec<usize>>,
    memo: BTreeMap<(String, usize), Vec<Counted>>,
}

fn add(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl Enumerator<'_> {
    fn within(&self, atoms: &[usize]) -> bool {
        atoms.iter().zip(&self.limits).all(|(a, l)| a <= l)
    }

    fn trees(&mut self, pred: &str, size: usize) -> Vec<Counted> {
        let key = (String::from(pred), size);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let out = if self.reg.productive.contains(pred) {
            self.productive_trees(pred, size)
        } else {
            self.unproductive_trees(pred, size)
        };
        self.memo.insert(key, out.clone());
        out
    }

    fn productive_trees(&mut self, pred: &str, size: usize) -> Vec<Counted> {
        let mut out = Vec::new();
        if size == 0 {
            return out;
        }
        let sid = self.sid;
        for r in sid.rules_of(pred) {
            let children: Vec<String> = sid.rules()[r]
                .flat()
                .preds
                .into_iter()
                .map(|a| a.name)
                .collect();
            let base = self.rule_atoms[r].clone();
            if !self.within(&base) {
                continue;
            }
            for edge in self.edge_combos(&children, size - 1, base) {
                out.push(Counted {
                    tree: ParseTree {
                        predicate: pred.into(),
                        edges: vec![TreeEdge {
                            rule: r,
                            children: edge.0,
                        }],
                    },
                    atoms: edge.1,
                });
            }
        }
        out.sort_by(|a, b| a.tree.cmp(&b.tree));
        out
    }

    /// Child tuples for the predicates `preds` with total size `size`.
    fn edge_combos(
        &mut self,
        preds: &[String],
        size: usize,
        atoms: Vec<usize>,
    ) -> Vec<(Vec<ParseTree>, Vec<usize>)> {
        let Some((first, rest)) = preds.split_first() else {
            return if size == 0 {
                vec![(Vec::new(), atoms)]
            } else {
                Vec::new()
            };
        };
        let mut out = Vec::new();
        for s in 0..=size {
            let heads = self.trees(first, s);
            if heads.is_empty() {
                continue;
            }
            for h in heads {
                let acc = add(&atoms, &h.atoms);
                if !self.within(&acc) {
                    continue;
                }
                for (mut tail, tail_atoms) in self.edge_combos(rest, size - s, acc) {
                    tail.insert(0, h.tree.clone());
                    out.push((tail, tail_atoms));
                }
            }
        }
        out
    }

    fn unproductive_trees(&mut self, pred: &str, size: usize) -> Vec<Counted> {
        let sid = self.sid;
        let mut candidates: Vec<String> = Vec::new();
        for r in sid.rules_of(pred) {
            match &self.reg.forms[r] {
                RuleForm::Recursive { q } => candidates.push(q.clone()),
                RuleForm::Union { qs } => candidates.extend(qs.iter().cloned()),
                _ => {}
            }
        }
        candidates.sort();
        candidates.dedup();
        let mut items: Vec<(usize, Counted)> = Vec::new();
        for q in &candidates {
            for s in 1..=size {
                items.extend(self.trees(q, s).into_iter().map(|t| (s, t)));
            }
        }
        let mut picks = Vec::new();
        let zero = vec![0; self.labels.len()];
        self.multisets(&items, 0, size, zero, &mut Vec::new(), &mut picks);
        let mut out: Vec<Counted> = picks
            .into_iter()
            .filter_map(|(chosen, atoms)| {
                let heads: Vec<&str> = chosen
                    .iter()
                    .map(|&i| items[i].1.tree.predicate.as_str())
                    .collect();
                if !admissible_multiset(sid, &self.reg, pred, &heads) {
                    return None;
                }
                let mut edges: Vec<TreeEdge> = chosen
                    .iter()
                    .flat_map(|&i| items[i].1.tree.edges.iter().cloned())
                    .collect();
                edges.sort();
                Some(Counted {
                    tree: ParseTree {
                        predicate: pred.into(),
                        edges,
                    },
                    atoms,
                })
            })
            .collect();
        out.sort_by(|a, b| a.tree.cmp(&b.tree));
        out
    }

    /// Non-decreasing index sequences into `items` of total size `left`.
    fn multisets(
        &self,
        items: &[(usize, Counted)],
        from: usize,
        left: usize,
        atoms: Vec<usize>,
        chosen: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, Vec<usize>)>,
    ) {
        if left == 0 {
            out.push((chosen.clone(), atoms));
            return;
        }
        for i in from..items.len() {
            let (s, t) = &items[i];
            if *s > left {
                continue;
            }
            let acc = add(&atoms, &t.atoms);
            if !self.within(&acc) {
                continue;
            }
            chosen.push(i);
            self.multisets(items, i, left - s, acc, chosen, out);
            chosen.pop();
        }
    }
}

/// Every `(Δ, pred)`-parse tree with at most `max_edges` productive edges,
/// ordered by size and then structurally.
pub fn enumerate_parse_trees(
    sid: &Sid,
    pred: &str,
    max_edges: usize,
) -> Result<Vec<ParseTree>, GrammarError> {
    enumerate_parse_trees_within(sid, pred, max_edges, &BTreeMap::new())
}

/// As [`enumerate_parse_trees`], keeping only trees with at most
/// `atom_limits[a]` relation atoms labelled `a`.
pub fn enumerate_parse_trees_within(
    sid: &Sid,
    pred: &str,
    max_edges: usize,
    atom_limits: &BTreeMap<String, usize>,
) -> Result<Vec<ParseTree>, GrammarError> {
    let reg = regular(sid)?;
    if sid.arity(pred).is_none() {
        return Err(GrammarError::UnknownPredicate(pred.into()));
    }
    let labels: Vec<String> = sid.alphabet().labels().map(|l| l.name).collect();
    let limits = labels
        .iter()
        .map(|l| atom_limits.get(l).copied().unwrap_or(usize::MAX))
        .collect();
    let rule_atoms = sid
        .rules()
        .iter()
        .map(|r| {
            let rels = r.flat().rels;
            labels
                .iter()
                .map(|l| rels.iter().filter(|a| &a.name == l).count())
                .collect()
        })
        .collect();
    let mut en = Enumerator {
        sid,
        reg,
        labels,
        limits,
        rule_atoms,
        memo: BTreeMap::new(),
    };
    let mut out = Vec::new();
    for s in 0..=max_edges {
        out.extend(en.trees(pred, s).into_iter().map(|c| c.tree));
    }
    Ok(out)
}
