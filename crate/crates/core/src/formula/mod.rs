//! Abstract syntax, parsing, printing and syntactic transformations of formulas.

mod ast;
mod classify;
mod parser;
mod prenex;
mod printer;
mod sugar;

pub use ast::*;
pub use classify::{classify_fragment, count_so_alternations, dualize, Fragment};
pub use parser::{parse_body, parse_formula, reserved_words};
pub use prenex::{negate, prenex, uniquify};
pub use sugar::{desugar_qformula, expand_sugar, expand_sugar_with, subst_trace, trace_eq_body};
