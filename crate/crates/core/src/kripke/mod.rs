//! Kripke structures, their shapes and traces.

mod format;
mod model;
mod shape;
mod traces;
mod unroll;

pub use format::{parse_kripke, print_kripke};
pub use model::{letter_props, KripkeStructure, Letter, Trace, TraceSet, MAX_PROPS};
pub use shape::{is_acyclic, is_tree_shaped, leaves};
pub use traces::extract_traces;
pub use unroll::unroll_to_tree;
