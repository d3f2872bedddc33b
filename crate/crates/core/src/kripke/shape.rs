use super::model::KripkeStructure;

/// The graph without self-loops is acyclic, and a state with a self-loop has no other
/// successor.
pub fn is_acyclic(k: &KripkeStructure) -> bool {
    let n = k.num_states();
    if (0..n).any(|s| k.has_self_loop(s) && k.successors(s).len() > 1) {
        return false;
    }
    // iterative three-colour DFS over every state, reachable or not
    let mut colour = vec![0u8; n];
    for root in 0..n {
        if colour[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        colour[root] = 1;
        while let Some(&mut (s, ref mut next)) = stack.last_mut() {
            let succ = k.successors(s);
            if *next == succ.len() {
                colour[s] = 2;
                stack.pop();
                continue;
            }
            let t = succ[*next];
            *next += 1;
            if t == s {
                continue;
            }
            match colour[t] {
                0 => {
                    colour[t] = 1;
                    stack.push((t, 0));
                }
                1 => return false,
                _ => {}
            }
        }
    }
    true
}

/// Tree shape: every non-initial state has exactly one parent other than itself, the
/// initial state has no parent other than itself, and a state has a self-loop iff it has
/// no other successor. Acyclicity is required as well, so a tree is always acyclic.
pub fn is_tree_shaped(k: &KripkeStructure) -> bool {
    let n = k.num_states();
    let mut parents = vec![0usize; n];
    for (s, t) in k.edges() {
        if s != t {
            parents[t] += 1;
        }
    }
    for s in 0..n {
        let want = if s == k.initial() { 0 } else { 1 };
        if parents[s] != want {
            return false;
        }
        let loops = k.has_self_loop(s);
        let others = k.successors(s).iter().any(|&t| t != s);
        if loops == others {
            return false;
        }
    }
    is_acyclic(k)
}

/// States with a self-loop.
pub fn leaves(k: &KripkeStructure) -> Vec<usize> {
    (0..k.num_states()).filter(|&s| k.has_self_loop(s)).collect()
}
