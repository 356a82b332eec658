//! Separation Logic of Relations: inductive definitions, c-graphs, hyperedge
//! replacement parse trees, MSO evaluation and tree-width analysis.
#![no_std]
extern crate alloc;

pub mod analysis;
pub mod grammar;
pub mod graph;
pub mod mso;
pub mod slr;
