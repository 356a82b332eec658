//! Separation Logic of Relations: formulas, inductive definitions, model
//! checking and model generation.

mod brute;
mod check;
pub(crate) mod compiled;
mod eqelim;
mod formula;
mod qpf;
mod sid;

pub use brute::{enumerate_models_bruteforce, enumerate_models_bruteforce_with, BRUTEFORCE_LIMIT};
pub use check::{default_fuel, least_unfoldings, slr_models, Store, Verdict};
pub use eqelim::{equality_eliminate, is_equality_free};
pub use formula::{Atom, FlatBody, Pure, SlrFormula, Var};
pub use qpf::{qpf_model, sat_qpf, QpfModel};
pub use sid::{Rule, Sid};

use alloc::string::String;

use crate::graph::GraphError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SlrError {
    #[error("the label `d__` is reserved")]
    ReservedLabel,
    #[error("`{0}` is used both as a relation symbol and as a predicate")]
    NameClash(String),
    #[error("`{symbol}` has arity {expected}, used with {found} arguments")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("rule {rule} repeats a parameter")]
    DuplicateParameter { rule: usize },
    #[error("rule {rule} has free variable `{var}`")]
    FreeVariable { rule: usize, var: Var },
    #[error("variable `{0}` is not bound")]
    UnboundVariable(Var),
    #[error("formula is not quantifier- and predicate-free")]
    NotQpf,
    #[error("predicate `{0}` is not nullary")]
    NotNullary(String),
    #[error("graph is not simple")]
    NotSimple,
    #[error("size {size} exceeds the limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}
