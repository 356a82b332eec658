//! JSON interchange for c-graphs (`.graph.json`), parse trees and grammars.

use serde::{Deserialize, Serialize};
use slrkit_core::grammar::{HrGrammar, HrRule, ParseTree, TreeEdge};
use slrkit_core::graph::{CGraph, GraphError, Label};

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error(transparent)]
    Syntax(#[from] serde_json::Error),
    #[error("type {declared} does not match {found} sources")]
    TypeMismatch { declared: usize, found: usize },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid parse tree: {0}")]
    Tree(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    #[serde(rename = "type")]
    pub type_n: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeJson>,
    pub sources: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeJson {
    pub id: String,
    pub label: String,
    pub attach: Vec<String>,
}

impl From<&CGraph> for GraphJson {
    fn from(g: &CGraph) -> Self {
        let name = |v: &usize| g.vertices()[*v].clone();
        GraphJson {
            type_n: g.type_n(),
            vertices: g.vertices().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeJson {
                    id: e.id.clone(),
                    label: e.label.name.clone(),
                    attach: e.attach.iter().map(name).collect(),
                })
                .collect(),
            sources: g.sources().iter().map(name).collect(),
        }
    }
}

impl TryFrom<&GraphJson> for CGraph {
    type Error = JsonError;

    fn try_from(j: &GraphJson) -> Result<Self, JsonError> {
        if j.type_n != j.sources.len() {
            return Err(JsonError::TypeMismatch {
                declared: j.type_n,
                found: j.sources.len(),
            });
        }
        let mut g = CGraph::new();
        for v in &j.vertices {
            g.add_vertex(v.clone())?;
        }
        let index = |g: &CGraph, v: &String| {
            g.vertex_index(v)
                .ok_or_else(|| JsonError::UnknownVertex(v.clone()))
        };
        for e in &j.edges {
            let attach = e
                .attach
                .iter()
                .map(|v| index(&g, v))
                .collect::<Result<Vec<_>, _>>()?;
            g.add_edge(
                e.id.clone(),
                Label::new(e.label.clone(), attach.len()),
                attach,
            )?;
        }
        let sources = j
            .sources
            .iter()
            .map(|v| index(&g, v))
            .collect::<Result<Vec<_>, _>>()?;
        g.set_sources(sources)?;
        Ok(g)
    }
}

pub fn graph_to_json(g: &CGraph) -> String {
    serde_json::to_string_pretty(&GraphJson::from(g)).expect("graphs serialize")
}

pub fn graph_from_json(text: &str) -> Result<CGraph, JsonError> {
    let j: GraphJson = serde_json::from_str(text)?;
    CGraph::try_from(&j)
}

/// A parse tree as a node list rooted at node 0. Each edge names its rule,
/// its parent node and the nodes deriving the predicate atoms of the rule
/// body, by position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeJson {
    pub nodes: Vec<NodeJson>,
    pub edges: Vec<TreeEdgeJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeJson {
    pub id: usize,
    pub predicate: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeEdgeJson {
    pub rule: usize,
    pub parent: usize,
    pub children: Vec<usize>,
}

impl From<&ParseTree> for TreeJson {
    fn from(t: &ParseTree) -> Self {
        fn go(t: &ParseTree, out: &mut TreeJson) -> usize {
            let id = out.nodes.len();
            out.nodes.push(NodeJson {
                id,
                predicate: t.predicate.clone(),
            });
            for e in &t.edges {
                let children = e.children.iter().map(|c| go(c, out)).collect();
                out.edges.push(TreeEdgeJson {
                    rule: e.rule,
                    parent: id,
                    children,
                });
            }
            id
        }
        let mut out = TreeJson {
            nodes: Vec::new(),
            edges: Vec::new(),
        };
        go(t, &mut out);
        out.edges.sort_by_key(|e| e.parent);
        out
    }
}

impl TryFrom<&TreeJson> for ParseTree {
    type Error = JsonError;

    fn try_from(j: &TreeJson) -> Result<Self, JsonError> {
        let bad = |m: String| JsonError::Tree(m);
        for (i, n) in j.nodes.iter().enumerate() {
            if n.id != i {
                return Err(bad(format!("node at position {i} has id {}", n.id)));
            }
        }
        if j.nodes.is_empty() {
            return Err(bad("no root node".into()));
        }
        let mut parent = vec![None; j.nodes.len()];
        for e in &j.edges {
            if e.parent >= j.nodes.len() {
                return Err(bad(format!("unknown node {}", e.parent)));
            }
            for &c in &e.children {
                match parent.get_mut(c) {
                    _ if c == 0 => {
                        return Err(bad(format!("the root is a child of node {}", e.parent)))
                    }
                    None => return Err(bad(format!("unknown node {c}"))),
                    Some(Some(_)) => return Err(bad(format!("node {c} has two parents"))),
                    Some(p) => *p = Some(e.parent),
                }
            }
        }
        if let Some(orphan) = (1..j.nodes.len()).find(|&i| parent[i].is_none()) {
            return Err(bad(format!("node {orphan} is not reachable from the root")));
        }
        fn build(j: &TreeJson, n: usize, seen: &mut usize) -> Result<ParseTree, JsonError> {
            *seen += 1;
            if *seen > j.nodes.len() {
                return Err(JsonError::Tree("the edges contain a cycle".into()));
            }
            let edges = j
                .edges
                .iter()
                .filter(|e| e.parent == n)
                .map(|e| {
                    Ok(TreeEdge {
                        rule: e.rule,
                        children: e
                            .children
                            .iter()
                            .map(|&c| build(j, c, seen))
                            .collect::<Result<_, JsonError>>()?,
                    })
                })
                .collect::<Result<_, JsonError>>()?;
            Ok(ParseTree {
                predicate: j.nodes[n].predicate.clone(),
                edges,
            })
        }
        let mut seen = 0;
        let tree = build(j, 0, &mut seen)?;
        if seen < j.nodes.len() {
            return Err(bad("some nodes are not reachable from the root".into()));
        }
        Ok(tree)
    }
}

pub fn tree_to_json(t: &ParseTree) -> String {
    serde_json::to_string_pretty(&TreeJson::from(t)).expect("trees serialize")
}

pub fn tree_from_json(text: &str) -> Result<ParseTree, JsonError> {
    let j: TreeJson = serde_json::from_str(text)?;
    ParseTree::try_from(&j)
}

/// A grammar with the right-hand side of every productive rule as an
/// embedded graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrammarJson {
    pub nonterminals: Vec<NonterminalJson>,
    pub rules: Vec<HrRuleJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonterminalJson {
    pub name: String,
    pub arity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum HrRuleJson {
    Productive {
        lhs: String,
        graph: GraphJson,
        nonterminals: Vec<String>,
    },
    Unproductive {
        lhs: String,
        rhs: Vec<String>,
    },
}

impl From<&HrGrammar> for GrammarJson {
    fn from(g: &HrGrammar) -> Self {
        GrammarJson {
            nonterminals: g
                .nonterminals
                .iter()
                .map(|(name, &arity)| NonterminalJson {
                    name: name.clone(),
                    arity,
                })
                .collect(),
            rules: g
                .rules
                .iter()
                .map(|r| match r {
                    HrRule::Productive {
                        lhs,
                        graph,
                        nonterminals,
                    } => HrRuleJson::Productive {
                        lhs: lhs.clone(),
                        graph: graph.into(),
                        nonterminals: nonterminals.clone(),
                    },
                    HrRule::Unproductive { lhs, rhs } => HrRuleJson::Unproductive {
                        lhs: lhs.clone(),
                        rhs: rhs.clone(),
                    },
                })
                .collect(),
        }
    }
}

impl TryFrom<&GrammarJson> for HrGrammar {
    type Error = JsonError;

    fn try_from(j: &GrammarJson) -> Result<Self, JsonError> {
        Ok(HrGrammar {
            nonterminals: j
                .nonterminals
                .iter()
                .map(|n| (n.name.clone(), n.arity))
                .collect(),
            rules: j
                .rules
                .iter()
                .map(|r| {
                    Ok(match r {
                        HrRuleJson::Productive {
                            lhs,
                            graph,
                            nonterminals,
                        } => HrRule::Productive {
                            lhs: lhs.clone(),
                            graph: graph.try_into()?,
                            nonterminals: nonterminals.clone(),
                        },
                        HrRuleJson::Unproductive { lhs, rhs } => HrRule::Unproductive {
                            lhs: lhs.clone(),
                            rhs: rhs.clone(),
                        },
                    })
                })
                .collect::<Result<_, JsonError>>()?,
        })
    }
}

pub fn grammar_to_json(g: &HrGrammar) -> String {
    serde_json::to_string_pretty(&GrammarJson::from(g)).expect("grammars serialize")
}

pub fn grammar_from_json(text: &str) -> Result<HrGrammar, JsonError> {
    let j: GrammarJson = serde_json::from_str(text)?;
    HrGrammar::try_from(&j)
}
