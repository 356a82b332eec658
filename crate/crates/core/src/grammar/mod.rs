//! Hyperedge replacement grammars, parse trees of regular SIDs and canonical
//! models.

mod canonical;
mod hr;
mod tree;

pub use canonical::{
    canonical_models, canonical_models_of, char_formula, rich_canonical_model, CanonicalModels,
    CharFormula, RichCanonicalModel,
};
pub use hr::{
    derivation_normalize, derivation_of, eval_parse_tree, sid_to_grammar, DerivationTree,
    HrGrammar, HrRule,
};
pub use tree::{
    check_parse_tree, enumerate_parse_trees, enumerate_parse_trees_within, ParseTree, TreeEdge,
};

use alloc::string::String;
use alloc::vec::Vec;

use crate::analysis::{check_regular, RegularSid, Regularity, Violation};
use crate::graph::GraphError;
use crate::slr::{Sid, SlrError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    #[error("SID is not regular: {}", .0.first().map(|v| alloc::format!("{v}")).unwrap_or_default())]
    NotRegular(Vec<Violation>),
    #[error("SID is not equality-free")]
    NotEqualityFree,
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("invalid parse tree: {0}")]
    InvalidTree(String),
    #[error(transparent)]
    Slr(#[from] SlrError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub(crate) fn regular(sid: &Sid) -> Result<RegularSid, GrammarError> {
    match check_regular(sid) {
        Regularity::Regular(r) => Ok(r),
        Regularity::NotRegular(v) => Err(GrammarError::NotRegular(v)),
    }
}
