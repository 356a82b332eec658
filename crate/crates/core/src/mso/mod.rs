//! Monadic second-order logic over c-graphs: formulas, evaluation and
//! parameterised transductions.

mod eval;
mod formula;
mod transduce;

pub use eval::{mso_eval, Element, MsoStore, MsoValue, MSO_SET_LIMIT, MSO_SOFT_LIMIT};
pub use formula::{MsoFormula, Sort, VarKind};
pub use transduce::{
    apply_transduction, fission_parameter, fission_scheme, EdgeSlot, TransductionScheme,
};

use alloc::string::String;

use crate::graph::GraphError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MsoError {
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("variable `{0}` is used both as an element and as a set")]
    KindMismatch(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("`{label}` takes {expected} arguments, got {found}")]
    Arity {
        label: String,
        expected: usize,
        found: usize,
    },
    #[error("value of `{0}` is not in the graph")]
    OutOfRange(String),
    #[error("domain of size {size} exceeds the limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("label `{0}` is not in the input alphabet of the scheme")]
    AlphabetMismatch(String),
    #[error("scheme is not functional on edge `{edge}`: {reason}")]
    NonFunctionalScheme { edge: String, reason: String },
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error("source `{0}` has no copy in the first layer")]
    SourceNotCopied(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
