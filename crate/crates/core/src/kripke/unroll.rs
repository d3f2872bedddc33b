use super::model::{letter_props, KripkeStructure};
use super::traces::extract_traces;
use crate::error::Result;

/// Tree with the same traces as the acyclic structure `k`: a root labeled like the
/// initial state, and below it one linear branch per trace ending in a self-loop.
pub fn unroll_to_tree(k: &KripkeStructure) -> Result<KripkeStructure> {
    let traces = extract_traces(k)?;
    let aps = k.aps().to_vec();
    let root_label = k.label(k.initial());
    let mut names = vec!["r".to_string()];
    let mut labels = vec![letter_props(&aps, root_label)
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>()];
    let mut edges = Vec::new();
    for (i, t) in traces.iter().enumerate() {
        // a trace that never changes still needs one state to carry the self-loop
        let letters: Vec<_> = if t.len() == 1 {
            vec![t.word()[0]]
        } else {
            t.word()[1..].to_vec()
        };
        let mut prev = 0;
        for (j, &l) in letters.iter().enumerate() {
            let id = names.len();
            names.push(format!("t{i}_{}", j + 1));
            labels.push(letter_props(&aps, l).into_iter().map(String::from).collect());
            edges.push((prev, id));
            prev = id;
        }
        edges.push((prev, prev));
    }
    KripkeStructure::new(aps, names, labels, &edges, 0)
}
