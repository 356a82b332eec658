//! Hyperedge replacement grammars and the translation of regular SIDs.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::tree::{ParseTree, TreeEdge};
use super::{regular, GrammarError};
use crate::graph::{parallel, substitute, CGraph, Label};
use crate::slr::{is_equality_free, Sid};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HrRule {
    /// `lhs → (graph, f1..fl)`; `nonterminals` lists the ids of the
    /// nonterminal edges `f1..fl` of `graph`.
    Productive {
        lhs: String,
        graph: CGraph,
        nonterminals: Vec<String>,
    },
    /// `lhs → rhs[0] ∥ .. ∥ rhs[k-1]`.
    Unproductive { lhs: String, rhs: Vec<String> },
}

impl HrRule {
    pub fn lhs(&self) -> &str {
        match self {
            HrRule::Productive { lhs, .. } | HrRule::Unproductive { lhs, .. } => lhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HrGrammar {
    /// Nonterminals with their arities.
    pub nonterminals: BTreeMap<String, usize>,
    pub rules: Vec<HrRule>,
}

impl HrGrammar {
    pub fn arity(&self, u: &str) -> Option<usize> {
        self.nonterminals.get(u).copied()
    }
}

/// Translates a regular equality-free SID into a grammar, rule by rule. The
/// returned bijection maps SID rule `i` to grammar rule `gamma[i]`.
pub fn sid_to_grammar(sid: &Sid) -> Result<(HrGrammar, Vec<usize>), GrammarError> {
    let reg = regular(sid)?;
    if !is_equality_free(sid) {
        return Err(GrammarError::NotEqualityFree);
    }
    let mut rules = Vec::new();
    for (i, rule) in sid.rules().iter().enumerate() {
        let body = rule.flat();
        if !reg.is_productive_rule(i) {
            rules.push(HrRule::Unproductive {
                lhs: rule.head.clone(),
                rhs: body.preds.into_iter().map(|a| a.name).collect(),
            });
            continue;
        }
        let mut g = CGraph::new();
        for x in rule.params.iter().chain(&body.existentials) {
            g.add_vertex(x.as_str())?;
        }
        g.set_sources((0..rule.params.len()).collect())?;
        let idx = |g: &CGraph, v: &String| g.vertex_index(v).expect("variable vertex");
        for (j, a) in body.rels.iter().enumerate() {
            let attach = a.args.iter().map(|v| idx(&g, v)).collect();
            let arity = a.args.len();
            g.add_edge(format!("#t{j}"), Label::new(a.name.as_str(), arity), attach)?;
        }
        let mut nonterminals = Vec::new();
        for (j, a) in body.preds.iter().enumerate() {
            let attach = a.args.iter().map(|v| idx(&g, v)).collect();
            let id = format!("#f{j}");
            g.add_edge(
                id.as_str(),
                Label::new(a.name.as_str(), a.args.len()),
                attach,
            )?;
            nonterminals.push(id);
        }
        rules.push(HrRule::Productive {
            lhs: rule.head.clone(),
            graph: g,
            nonterminals,
        });
    }
    let gamma = (0..rules.len()).collect();
    Ok((
        HrGrammar {
            nonterminals: sid.predicates().clone(),
            rules,
        },
        gamma,
    ))
}

/// A derivation tree: every node is labelled by a grammar rule, children
/// follow the rule's nonterminal occurrences.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DerivationTree {
    pub nonterminal: String,
    pub rule: usize,
    pub children: Vec<DerivationTree>,
}

/// Collapses unproductive rule applications into their parent node.
pub fn derivation_normalize(gamma: &HrGrammar, u: &DerivationTree) -> ParseTree {
    ParseTree {
        predicate: u.nonterminal.clone(),
        edges: edges_of(gamma, u),
    }
    .normalized()
}

fn edges_of(gamma: &HrGrammar, u: &DerivationTree) -> Vec<TreeEdge> {
    match &gamma.rules[u.rule] {
        HrRule::Productive { .. } => vec![TreeEdge {
            rule: u.rule,
            children: u
                .children
                .iter()
                .map(|c| derivation_normalize(gamma, c))
                .collect(),
        }],
        HrRule::Unproductive { .. } => u.children.iter().flat_map(|c| edges_of(gamma, c)).collect(),
    }
}

/// A derivation tree normalizing to `tree`, if any.
pub fn derivation_of(gamma: &HrGrammar, tree: &ParseTree) -> Option<DerivationTree> {
    derive(gamma, &tree.predicate, &tree.edges)
}

fn productive_node(gamma: &HrGrammar, u: &str, e: &TreeEdge) -> Option<DerivationTree> {
    let HrRule::Productive {
        lhs,
        graph,
        nonterminals,
    } = gamma.rules.get(e.rule)?
    else {
        return None;
    };
    if lhs != u || nonterminals.len() != e.children.len() {
        return None;
    }
    let children = nonterminals
        .iter()
        .zip(&e.children)
        .map(|(f, c)| {
            let label = &graph.edges()[graph.edge_index(f)?].label.name;
            if *label != c.predicate {
                return None;
            }
            derivation_of(gamma, c)
        })
        .collect::<Option<Vec<_>>>()?;
    Some(DerivationTree {
        nonterminal: u.into(),
        rule: e.rule,
        children,
    })
}

/// Derives the edge multiset `edges` from `u`, trying every rule.
fn derive(gamma: &HrGrammar, u: &str, edges: &[TreeEdge]) -> Option<DerivationTree> {
    if let [e] = edges {
        if let Some(t) = productive_node(gamma, u, e) {
            return Some(t);
        }
    }
    for (r, rule) in gamma.rules.iter().enumerate() {
        let HrRule::Unproductive { lhs, rhs } = rule else {
            continue;
        };
        if lhs != u {
            continue;
        }
        if let Some(children) = split(gamma, rhs, edges) {
            return Some(DerivationTree {
                nonterminal: u.into(),
                rule: r,
                children,
            });
        }
    }
    None
}

/// Distributes `edges` over the nonterminals `rhs`. With two or more
/// nonterminals every share is nonempty, as in regular grammars.
fn split(gamma: &HrGrammar, rhs: &[String], edges: &[TreeEdge]) -> Option<Vec<DerivationTree>> {
    let Some((first, rest)) = rhs.split_first() else {
        return edges.is_empty().then(Vec::new);
    };
    if rest.is_empty() {
        return derive(gamma, first, edges).map(|t| vec![t]);
    }
    let n = edges.len();
    if n >= usize::BITS as usize {
        return None;
    }
    for mask in 0..(1usize << n) {
        let (mine, others): (Vec<_>, Vec<_>) = edges
            .iter()
            .enumerate()
            .partition(|(i, _)| mask >> i & 1 == 1);
        let mine: Vec<TreeEdge> = mine.into_iter().map(|(_, e)| e.clone()).collect();
        let others: Vec<TreeEdge> = others.into_iter().map(|(_, e)| e.clone()).collect();
        if !rest.is_empty() && (mine.is_empty() || others.is_empty()) {
            continue;
        }
        let Some(head) = derive(gamma, first, &mine) else {
            continue;
        };
        if let Some(mut tail) = split(gamma, rest, &others) {
            tail.insert(0, head);
            return Some(tail);
        }
    }
    None
}

/// The value of a grammar parse tree: a c-graph of the root nonterminal's
/// type.
pub fn eval_parse_tree(gamma: &HrGrammar, tree: &ParseTree) -> Result<CGraph, GrammarError> {
    let n = gamma
        .arity(&tree.predicate)
        .ok_or_else(|| GrammarError::UnknownPredicate(tree.predicate.clone()))?;
    let mut acc = CGraph::sources_only(n);
    for (i, e) in tree.edges.iter().enumerate() {
        let v = eval_edge(gamma, e)?.with_prefix(&format!("p{i}."));
        acc = parallel(&acc.renamed_compact(), &v, n)?;
    }
    Ok(acc.renamed_compact())
}

fn eval_edge(gamma: &HrGrammar, e: &TreeEdge) -> Result<CGraph, GrammarError> {
    let invalid = || GrammarError::InvalidTree(format!("rule {} is not productive", e.rule));
    let Some(HrRule::Productive {
        graph,
        nonterminals,
        ..
    }) = gamma.rules.get(e.rule)
    else {
        return Err(invalid());
    };
    if nonterminals.len() != e.children.len() {
        return Err(GrammarError::InvalidTree(format!(
            "rule {} expects {} children",
            e.rule,
            nonterminals.len()
        )));
    }
    let mut g = graph.with_prefix("h.");
    for (j, (f, c)) in nonterminals.iter().zip(&e.children).enumerate() {
        let h = eval_parse_tree(gamma, c)?.with_prefix(&format!("c{j}."));
        g = substitute(&g, &format!("h.{f}"), &h)?;
    }
    Ok(g)
}
