//! Regularity, Parikh images, rigidity, tree-width bounds and bounded
//! entailment.

mod bounds;
mod cfg;
mod entail;
mod regular;
mod rigid;

pub use bounds::{fusion_bound_b, treewidth_bound, BoundsReport};
pub use cfg::{parikh_image, sid_to_cfg, Cfg, LinearSet, Production, SemilinearSet, Symbol};
pub use entail::{
    entails, entails_between, model_cutoff, models_in_order, models_up_to, sorted_models,
    Entailment, MODEL_VERTEX_LIMIT,
};
pub use regular::{check_regular, Condition, RegularSid, Regularity, RuleForm, Violation};
pub use rigid::{
    check_rigid, check_rigid_exhaustive, coloring, is_pumping, Coloring, Pumping, RigidityReport,
    RigidityViolation, EXHAUSTIVE_RIGIDITY_LIMIT,
};

use alloc::string::String;
use alloc::vec::Vec;

use crate::grammar::GrammarError;
use crate::graph::GraphError;
use crate::slr::{Sid, SlrError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("SID is not regular: {}", .0.first().map(|v| alloc::format!("{v}")).unwrap_or_default())]
    NotRegular(Vec<Violation>),
    #[error("SID is not equality-free")]
    NotEqualityFree,
    #[error("SID is not rigid")]
    NotRigid(Vec<RigidityViolation>),
    #[error("the grammar generates no word")]
    EmptyLanguage,
    #[error("rule {0} is not a productive rule")]
    UnknownRule(usize),
    #[error("the rule set is empty")]
    EmptySubset,
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate `{0}` is not nullary")]
    NotNullary(String),
    #[error("size {size} exceeds the limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error(transparent)]
    Grammar(GrammarError),
    #[error(transparent)]
    Slr(#[from] SlrError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl From<GrammarError> for AnalysisError {
    fn from(e: GrammarError) -> Self {
        match e {
            GrammarError::NotRegular(v) => AnalysisError::NotRegular(v),
            GrammarError::NotEqualityFree => AnalysisError::NotEqualityFree,
            GrammarError::UnknownPredicate(p) => AnalysisError::UnknownPredicate(p),
            GrammarError::Slr(e) => AnalysisError::Slr(e),
            GrammarError::Graph(e) => AnalysisError::Graph(e),
            other => AnalysisError::Grammar(other),
        }
    }
}

pub(crate) fn regular(sid: &Sid) -> Result<RegularSid, AnalysisError> {
    match check_regular(sid) {
        Regularity::Regular(r) => Ok(r),
        Regularity::NotRegular(v) => Err(AnalysisError::NotRegular(v)),
    }
}
