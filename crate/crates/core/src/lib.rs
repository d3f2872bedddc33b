//! Model checking for second-order hyperproperties (HyperLTL with quantification over
//! sets of traces) on tree-shaped and acyclic Kripke structures.
//!
//! Modules:
//! - [`formula`]: syntax, parser, sugar expansion, prenexing, classification
//! - [`kripke`]: structures, shape checks, trace extraction, unrolling
//! - [`semantics`]: the checker, fixpoint computation and brute-force oracles
//! - [`reductions`]: Horn-SAT and QBF instance generators with independent oracles

pub mod error;
pub mod formula;
pub mod kripke;
pub mod reductions;
pub mod semantics;

pub use error::{Error, Result};
