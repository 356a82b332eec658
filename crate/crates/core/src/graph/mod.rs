//! Concrete hypergraphs with sources and the graph algebra over them.

mod cgraph;
mod fusion;
mod iso;
mod ops;
mod treewidth;

use alloc::string::String;

pub use cgraph::{Alphabet, CGraph, Edge, Label, DISEQ};
pub use fusion::{
    compatible, fb_of_graph, fission_1, fission_k, for_each_compatible, fusion_all, fusion_k,
    fusions_with_at_most, quotient, VertexEquivalence,
};
pub use iso::{canonical_form, canonical_labeling, isomorphic, CanonicalForm, IsoSet, Isomorphism};
pub use ops::{compose, parallel, project, strip_diseq, substitute};
pub use treewidth::{
    treewidth_exact, treewidth_exact_with_limit, verify_tree_decomposition, TreeDecomposition,
    TREEWIDTH_SOFT_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("duplicate vertex or edge id `{0}`")]
    DuplicateId(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("label `{label}` has arity {expected}, got {found}")]
    ArityMismatch {
        label: String,
        expected: usize,
        found: usize,
    },
    #[error("label `{0}` has arity 0")]
    ZeroArity(String),
    #[error("sources are not injective")]
    NonInjectiveSources,
    #[error("expected a graph of type {expected}, found type {found}")]
    TypeMismatch { expected: usize, found: usize },
    #[error("graphs are not composable: {0}")]
    NotComposable(String),
    #[error("graphs are not disjoint: `{0}` occurs in both")]
    NotDisjoint(String),
    #[error("equivalence is not compatible with the graph")]
    Incompatible,
    #[error("input of size {size} exceeds the limit {limit}")]
    TooLarge { size: usize, limit: usize },
}
