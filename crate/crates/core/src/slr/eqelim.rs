//! Removal of equality atoms from a SID.
//!
//! Equalities among a rule's variables are substituted away. Equalities that
//! identify parameters become variants `P_eq_<blocks>` of the predicate whose
//! parameters are merged, and callers guess which arguments coincide.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;

use super::{Atom, FlatBody, Pure, Rule, Sid, Var};

/// True iff no rule contains an equality atom or a predicate atom repeating a
/// variable.
pub fn is_equality_free(sid: &Sid) -> bool {
    sid.rules().iter().all(|r| {
        let body = r.flat();
        !body.pure.iter().any(|p| matches!(p, Pure::Eq(..)))
            && body.preds.iter().all(|a| is_identity(&rgs(&a.args)))
    })
}

/// Restricted growth string of a sequence: equal items get equal block numbers.
fn rgs<T: PartialEq>(items: &[T]) -> Vec<usize> {
    let mut firsts: Vec<&T> = Vec::new();
    items
        .iter()
        .map(|x| match firsts.iter().position(|f| *f == x) {
            Some(i) => i,
            None => {
                firsts.push(x);
                firsts.len() - 1
            }
        })
        .collect()
}

fn is_identity(part: &[usize]) -> bool {
    part.iter().enumerate().all(|(i, &b)| i == b)
}

/// `part` identifies everything `finer` identifies.
fn coarsens(part: &[usize], finer: &[usize]) -> bool {
    (0..part.len()).all(|i| (0..i).all(|j| finer[i] != finer[j] || part[i] == part[j]))
}

fn variant_name(pred: &str, part: &[usize]) -> String {
    if is_identity(part) {
        return pred.into();
    }
    let sep = if part.iter().any(|&b| b > 9) { "_" } else { "" };
    let digits: Vec<String> = part.iter().map(|b| alloc::format!("{b}")).collect();
    alloc::format!("{pred}_eq_{}", digits.join(sep))
}

/// A rule with its equalities substituted away.
struct PreRule {
    head: String,
    /// Partition of parameter positions forced by the rule's equalities.
    part: Vec<usize>,
    /// Parameters after substitution, one name per position.
    params: Vec<Var>,
    body: FlatBody,
}

fn substitute(body: &FlatBody, sigma: &dyn Fn(&Var) -> Var) -> Option<FlatBody> {
    let mut pure = Vec::new();
    for p in &body.pure {
        match p {
            Pure::Eq(..) => {}
            Pure::Neq(x, y) => {
                let (x, y) = (sigma(x), sigma(y));
                if x == y {
                    return None;
                }
                pure.push(Pure::Neq(x, y));
            }
        }
    }
    let map = |a: &Atom| Atom {
        name: a.name.clone(),
        args: a.args.iter().map(sigma).collect(),
    };
    let existentials: Vec<Var> = body
        .existentials
        .iter()
        .filter(|y| sigma(y) == **y)
        .cloned()
        .collect();
    Some(FlatBody {
        existentials,
        pure,
        rels: body.rels.iter().map(map).collect(),
        preds: body.preds.iter().map(map).collect(),
    })
}

/// Substitutes a partition of `order` given as block numbers; each block maps
/// to its first member.
fn apply_blocks(body: &FlatBody, order: &[Var], block: &[usize]) -> Option<FlatBody> {
    let mut rep: BTreeMap<usize, &Var> = BTreeMap::new();
    for (v, &b) in order.iter().zip(block) {
        rep.entry(b).or_insert(v);
    }
    let sigma = |v: &Var| match order.iter().position(|o| o == v) {
        Some(i) => rep[&block[i]].clone(),
        None => v.clone(),
    };
    substitute(body, &sigma)
}

fn pre_rule(rule: &Rule) -> Option<PreRule> {
    let body = rule.flat();
    let order: Vec<Var> = rule
        .params
        .iter()
        .chain(&body.existentials)
        .cloned()
        .collect();
    let mut parent: Vec<usize> = (0..order.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for p in &body.pure {
        if let Pure::Eq(x, y) = p {
            let i = order.iter().position(|o| o == x).expect("bound");
            let j = order.iter().position(|o| o == y).expect("bound");
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
    let block: Vec<usize> = (0..order.len()).map(|i| find(&mut parent, i)).collect();
    let body = apply_blocks(&body, &order, &block)?;
    let params: Vec<Var> = (0..rule.params.len())
        .map(|i| order[block[i]].clone())
        .collect();
    Some(PreRule {
        head: rule.head.clone(),
        part: rgs(&params),
        params,
        body,
    })
}

/// All restricted growth strings of length `n`.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn go(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let next = cur.iter().max().map_or(0, |m| m + 1);
        for b in 0..=next {
            cur.push(b);
            go(n, cur, out);
            cur.pop();
        }
    }
    go(n, &mut cur, &mut out);
    out
}

/// An equivalent SID without equality atoms. Equality-free input is returned
/// unchanged.
///
/// Existentials occurring in no relation atom lose their domain condition when
/// substituted by another variable.
pub fn equality_eliminate(sid: &Sid) -> Sid {
    if is_equality_free(sid) {
        return sid.clone();
    }
    let pre: Vec<PreRule> = sid.rules().iter().filter_map(pre_rule).collect();
    let mut sensitive: BTreeSet<&str> = pre
        .iter()
        .filter(|r| !is_identity(&r.part))
        .map(|r| r.head.as_str())
        .collect();
    loop {
        let before = sensitive.len();
        for r in &pre {
            if r.body
                .preds
                .iter()
                .any(|a| sensitive.contains(a.name.as_str()))
            {
                sensitive.insert(r.head.as_str());
            }
        }
        if sensitive.len() == before {
            break;
        }
    }

    let mut queue: VecDeque<(String, Vec<usize>)> = sid
        .predicates()
        .iter()
        .map(|(p, &ar)| (p.clone(), (0..ar).collect()))
        .collect();
    let mut seen: BTreeSet<(String, Vec<usize>)> = queue.iter().cloned().collect();
    let mut declared: Vec<(String, usize)> = Vec::new();
    let mut rules: Vec<Rule> = Vec::new();
    while let Some((pred, part)) = queue.pop_front() {
        let nblocks = part.iter().max().map_or(0, |m| m + 1);
        declared.push((variant_name(&pred, &part), nblocks));
        for r in pre.iter().filter(|r| r.head == pred) {
            if !coarsens(&part, &r.part) {
                continue;
            }
            // one parameter name per block of `part`
            let mut block_param: Vec<Var> = Vec::new();
            for (i, &b) in part.iter().enumerate() {
                if b == block_param.len() {
                    block_param.push(r.params[i].clone());
                }
            }
            let order: Vec<Var> = r.params.clone();
            let Some(body) = apply_blocks(&r.body, &order, &part) else {
                continue;
            };
            let mut guessable: Vec<Var> = Vec::new();
            for a in body
                .preds
                .iter()
                .filter(|a| sensitive.contains(a.name.as_str()))
            {
                for x in &a.args {
                    if !guessable.contains(x) {
                        guessable.push(x.clone());
                    }
                }
            }
            for guess in partitions(guessable.len()) {
                let merges_params = (0..guessable.len()).any(|i| {
                    (0..i).any(|j| {
                        guess[i] == guess[j]
                            && block_param.contains(&guessable[i])
                            && block_param.contains(&guessable[j])
                    })
                });
                if merges_params {
                    continue;
                }
                // params first so that blocks containing one keep its name
                let mut order: Vec<Var> = Vec::new();
                let mut blocks: Vec<usize> = Vec::new();
                let mut ranked: Vec<usize> = (0..guessable.len()).collect();
                ranked.sort_by_key(|&i| !block_param.contains(&guessable[i]));
                for i in ranked {
                    order.push(guessable[i].clone());
                    blocks.push(guess[i]);
                }
                let Some(mut body) = apply_blocks(&body, &order, &blocks) else {
                    continue;
                };
                for a in body.preds.iter_mut() {
                    let pattern = rgs(&a.args);
                    let mut distinct: Vec<Var> = Vec::new();
                    for x in &a.args {
                        if !distinct.contains(x) {
                            distinct.push(x.clone());
                        }
                    }
                    let key = (a.name.clone(), pattern);
                    a.name = variant_name(&key.0, &key.1);
                    a.args = distinct;
                    if seen.insert(key.clone()) {
                        queue.push_back(key);
                    }
                }
                rules.push(Rule {
                    head: variant_name(&pred, &part),
                    params: block_param.clone(),
                    body: body.to_formula(),
                });
            }
        }
    }
    let extra: Vec<(&str, usize)> = declared.iter().map(|(n, a)| (n.as_str(), *a)).collect();
    Sid::with_predicates(sid.alphabet().clone(), &extra, rules)
        .expect("equality elimination preserves well-formedness")
}
