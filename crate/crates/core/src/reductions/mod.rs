//! Instance generators for the Horn-satisfiability and QBF reductions, and the naive
//! oracles used as ground truth for them.

mod horn;
mod qbf;

pub use horn::{
    horn_formula, horn_oracle, horn_to_instance, horn_to_instance_with, parse_horn, HornFormula,
    HornLit, HORN_APS,
};
pub use qbf::{
    parse_qbf, qbf_formula, qbf_oracle, qbf_to_instance, qbf_to_instance_with, Block, QbfExpr, QbfFormula,
    QbfOptions, QBF_APS,
};

use crate::error::Result;
use crate::formula::Formula;
use crate::kripke::KripkeStructure;

/// A generated model-checking problem.
#[derive(Clone, Debug)]
pub struct Instance {
    pub structure: KripkeStructure,
    pub formula: Formula,
    /// Ordered `key: value` metadata.
    pub meta: Vec<(String, String)>,
}

impl Instance {
    pub fn meta_get(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// The metadata sidecar, one `key: value` per line.
    pub fn meta_text(&self) -> String {
        self.meta
            .iter()
            .map(|(k, v)| format!("{k}: {v}\n"))
            .collect()
    }
}

/// A root with no label fanning out into non-branching paths; `branches[i]` holds the
/// names prefix and the labels of the branch states. The last state of each branch
/// gets a self-loop.
pub(crate) fn branch_tree(
    aps: &[&str],
    root: &str,
    branches: &[(String, Vec<Vec<&str>>)],
) -> Result<KripkeStructure> {
    let mut names = vec![root.to_string()];
    let mut labels: Vec<Vec<String>> = vec![vec![]];
    let mut edges = Vec::new();
    for (prefix, states) in branches {
        let mut prev = 0;
        for (j, l) in states.iter().enumerate() {
            let id = names.len();
            names.push(format!("{prefix}_{}", j + 1));
            labels.push(l.iter().map(|s| s.to_string()).collect());
            edges.push((prev, id));
            prev = id;
        }
        edges.push((prev, prev));
    }
    KripkeStructure::new(
        aps.iter().map(|s| s.to_string()).collect(),
        names,
        labels,
        &edges,
        0,
    )
}

/// `ceil(log2(n))` for `n >= 1`.
pub(crate) fn ceil_log2(n: usize) -> usize {
    let mut b = 0;
    while (1usize << b) < n {
        b += 1;
    }
    b
}
