use std::collections::BTreeSet;

use super::model::{KripkeStructure, Letter, Trace, TraceSet};
use super::shape::is_acyclic;
use crate::error::{Error, Result};

/// Label sequences of all paths from the initial state into a self-loop, canonicalized
/// and deduplicated. Requires an acyclic structure.
pub fn extract_traces(k: &KripkeStructure) -> Result<TraceSet> {
    if !is_acyclic(k) {
        return Err(Error::NotAcyclic);
    }
    let mut memo: Vec<Option<BTreeSet<Vec<Letter>>>> = vec![None; k.num_states()];
    fill(k, k.initial(), &mut memo);
    let words = memo[k.initial()].take().unwrap();
    Ok(TraceSet::new(
        k.aps().to_vec(),
        words.into_iter().map(Trace::new),
    ))
}

/// Fills `memo[s]` with the canonical words readable from `s`. The recursion depth is
/// bounded by the longest path.
fn fill(k: &KripkeStructure, s: usize, memo: &mut Vec<Option<BTreeSet<Vec<Letter>>>>) {
    if memo[s].is_some() {
        return;
    }
    let l = k.label(s);
    let mut out = BTreeSet::new();
    if k.has_self_loop(s) {
        out.insert(vec![l]);
    } else {
        for &t in k.successors(s) {
            fill(k, t, memo);
            for w in memo[t].as_ref().unwrap() {
                let mut v = Vec::with_capacity(w.len() + 1);
                v.push(l);
                v.extend_from_slice(w);
                out.insert(Trace::new(v).word().to_vec());
            }
        }
    }
    memo[s] = Some(out);
}
