//! Random generators shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use h2mc_core::formula::{Body, FixpointBinder, FixpointConjunct, Formula, Quantifier, SetVar, TraceVar};
use h2mc_core::kripke::{KripkeStructure, Trace, TraceSet};
use h2mc_core::reductions::{Block, HornFormula, HornLit, QbfExpr, QbfFormula};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A temporal body of at most `size` operator nodes over the given traces.
pub fn body(rng: &mut Rng8, traces: &[String], props: &[String], size: usize) -> Body {
    if size == 0 || traces.is_empty() {
        return match (traces.is_empty(), rng.gen_range(0..10)) {
            (_, 0) => Body::True,
            (_, 1) => Body::False,
            (true, _) => Body::True,
            _ => Body::atom(
                props.choose(rng).unwrap().clone(),
                traces.choose(rng).unwrap().clone(),
            ),
        };
    }
    let split = |rng: &mut Rng8| {
        let l = rng.gen_range(0..size);
        (l, size - 1 - l)
    };
    match rng.gen_range(0..9) {
        0 => Body::not(body(rng, traces, props, size - 1)),
        1 => Body::next(body(rng, traces, props, size - 1)),
        2 => Body::eventually(body(rng, traces, props, size - 1)),
        3 => Body::globally(body(rng, traces, props, size - 1)),
        op => {
            let (l, r) = split(rng);
            let (a, b) = (body(rng, traces, props, l), body(rng, traces, props, r));
            match op {
                4 => Body::and(a, b),
                5 => Body::or(a, b),
                6 => Body::implies(a, b),
                7 => Body::iff(a, b),
                _ => Body::until(a, b),
            }
        }
    }
}

/// A Boolean skeleton whose leaves are temporal bodies or (when `sugar` is set)
/// membership and trace equality.
pub fn skeleton(
    rng: &mut Rng8,
    traces: &[String],
    sets: &[String],
    props: &[String],
    depth: usize,
    sugar: bool,
) -> Body {
    if depth == 0 || rng.gen_bool(0.3) {
        if sugar && !traces.is_empty() {
            match rng.gen_range(0..6) {
                0 if !sets.is_empty() => {
                    return Body::member(
                        traces.choose(rng).unwrap().clone(),
                        sets.choose(rng).unwrap().clone(),
                    )
                }
                1 => {
                    return Body::trace_eq(
                        traces.choose(rng).unwrap().clone(),
                        traces.choose(rng).unwrap().clone(),
                    )
                }
                2 if !sets.is_empty() => {
                    return Body::InSet {
                        trace: TraceVar::new(traces.choose(rng).unwrap().clone()),
                        set: SetVar::new(sets.choose(rng).unwrap().clone()),
                    }
                }
                _ => {}
            }
        }
        let size = rng.gen_range(0..=3);
        return body(rng, traces, props, size);
    }
    let a = skeleton(rng, traces, sets, props, depth - 1, sugar);
    let b = skeleton(rng, traces, sets, props, depth - 1, sugar);
    match rng.gen_range(0..5) {
        0 => Body::not(a),
        1 => Body::and(a, b),
        2 => Body::or(a, b),
        3 => Body::implies(a, b),
        _ => Body::iff(a, b),
    }
}

/// A random fixpoint binder for `set`; binder domains are drawn from `outer` sets,
/// `ALL` and `set` itself. `outer_traces` may occur free in the steps.
pub fn fixpoint(
    rng: &mut Rng8,
    set: &str,
    outer: &[String],
    outer_traces: &[String],
    props: &[String],
    local_prefix: &str,
) -> FixpointBinder {
    let n = rng.gen_range(1..=2);
    let mut conjuncts = Vec::new();
    for c in 0..n {
        let arity = rng.gen_range(1..=2);
        let mut doms: Vec<String> = vec!["ALL".into(), set.into()];
        doms.extend(outer.iter().cloned());
        let binders: Vec<(TraceVar, SetVar)> = (0..arity)
            .map(|i| {
                (
                    TraceVar::new(format!("{local_prefix}{c}_{i}")),
                    SetVar::new(doms.choose(rng).unwrap().clone()),
                )
            })
            .collect();
        let mut vars: Vec<String> = binders.iter().map(|(p, _)| p.0.clone()).collect();
        vars.extend(outer_traces.iter().cloned());
        let size = rng.gen_range(0..=4);
        let step = body(rng, &vars, props, size);
        conjuncts.push(FixpointConjunct {
            binders,
            step,
            target: rng.gen_range(0..arity),
        });
    }
    FixpointBinder {
        set: SetVar::new(set),
        conjuncts,
    }
}

pub struct FormulaShape {
    pub so_items: usize,
    pub fix_items: usize,
    pub fo_items: usize,
    pub unique: bool,
    pub sugar: bool,
    pub body_depth: usize,
}

/// A closed prenex formula; prefix items are shuffled subject to scoping.
pub fn formula(rng: &mut Rng8, shape: &FormulaShape, props: &[String]) -> Formula {
    let mut kinds: Vec<u8> = std::iter::repeat(0)
        .take(shape.so_items)
        .chain(std::iter::repeat(1).take(shape.fix_items))
        .chain(std::iter::repeat(2).take(shape.fo_items))
        .collect();
    kinds.shuffle(rng);
    let mut prefix = Vec::new();
    let mut sets: Vec<String> = Vec::new();
    let mut traces: Vec<String> = Vec::new();
    let mut unique_left = shape.unique;
    for (i, k) in kinds.into_iter().enumerate() {
        match k {
            0 => {
                let x = format!("S{i}");
                prefix.push(if rng.gen_bool(0.5) {
                    Quantifier::SoExists(SetVar::new(&x))
                } else {
                    Quantifier::SoForall(SetVar::new(&x))
                });
                sets.push(x);
            }
            1 => {
                let x = format!("Y{i}");
                prefix.push(Quantifier::Fixpoint(fixpoint(
                    rng,
                    &x,
                    &sets,
                    &traces,
                    props,
                    &format!("l{i}_"),
                )));
                sets.push(x);
            }
            _ => {
                let p = format!("p{i}");
                let mut doms = vec!["ALL".to_string()];
                doms.extend(sets.iter().cloned());
                let x = SetVar::new(doms.choose(rng).unwrap().clone());
                let q = if unique_left && rng.gen_bool(0.5) {
                    unique_left = false;
                    Quantifier::FoExistsUnique(TraceVar::new(&p), x)
                } else if rng.gen_bool(0.5) {
                    Quantifier::FoExists(TraceVar::new(&p), x)
                } else {
                    Quantifier::FoForall(TraceVar::new(&p), x)
                };
                prefix.push(q);
                traces.push(p);
            }
        }
    }
    let b = skeleton(rng, &traces, &sets, props, shape.body_depth, shape.sugar);
    Formula::new(prefix, b)
}

pub fn letter(rng: &mut Rng8, nprops: usize) -> u64 {
    rng.gen_range(0..(1u64 << nprops))
}

pub fn trace_set(rng: &mut Rng8, n: usize, max_len: usize, props: &[String]) -> TraceSet {
    let traces = (0..n).map(|_| {
        let len = rng.gen_range(1..=max_len);
        Trace::new((0..len).map(|_| letter(rng, props.len())).collect())
    });
    TraceSet::new(props.to_vec(), traces)
}

fn labels_of(aps: &[String], l: u64) -> Vec<String> {
    aps.iter()
        .enumerate()
        .filter(|(i, _)| l >> i & 1 == 1)
        .map(|(_, a)| a.clone())
        .collect()
}

/// A random tree with at most `max_leaves` leaves and depth at most `max_depth`.
pub fn tree(rng: &mut Rng8, max_leaves: usize, max_depth: usize, aps: &[String]) -> KripkeStructure {
    // grow by attaching children to random non-leaf-capped nodes
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut depth = vec![0];
    let mut children = vec![0usize];
    let target = rng.gen_range(1..=max_leaves);
    let leaves = |children: &[usize]| children.iter().filter(|&&c| c == 0).count();
    let mut guard = 0;
    while guard < 200 {
        guard += 1;
        let v = rng.gen_range(0..parent.len());
        if depth[v] >= max_depth {
            continue;
        }
        // adding a child to a leaf keeps the leaf count, elsewhere it adds one
        let grows = children[v] > 0;
        if grows && leaves(&children) >= target {
            if rng.gen_bool(0.3) {
                break;
            }
            continue;
        }
        parent.push(Some(v));
        depth.push(depth[v] + 1);
        children.push(0);
        children[v] += 1;
        if leaves(&children) >= target && rng.gen_bool(0.4) {
            break;
        }
    }
    let n = parent.len();
    let names = names("s", n);
    let labels = (0..n).map(|_| labels_of(aps, letter(rng, aps.len()))).collect();
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (parent[i].unwrap(), i)).collect();
    for v in 0..n {
        if children[v] == 0 {
            edges.push((v, v));
        }
    }
    KripkeStructure::new(aps.to_vec(), names, labels, &edges, 0).unwrap()
}

/// A random acyclic structure: forward edges only, sinks get self-loops.
pub fn acyclic(rng: &mut Rng8, max_states: usize, aps: &[String]) -> KripkeStructure {
    let n = rng.gen_range(1..=max_states);
    let mut edges = Vec::new();
    for i in 0..n {
        let mut any = false;
        for j in i + 1..n {
            if rng.gen_bool(0.35) {
                edges.push((i, j));
                any = true;
            }
        }
        if !any {
            edges.push((i, i));
        }
    }
    let labels = (0..n).map(|_| labels_of(aps, letter(rng, aps.len()))).collect();
    KripkeStructure::new(aps.to_vec(), names("s", n), labels, &edges, 0).unwrap()
}

pub fn horn(rng: &mut Rng8, max_k: usize, max_n: usize) -> HornFormula {
    let k = rng.gen_range(1..=max_k);
    let n = rng.gen_range(0..=max_n);
    let lit = |rng: &mut Rng8, pos: bool| {
        // `T` premises and `F` conclusions keep the corpus balanced
        let special = if pos { 0.25 } else { 0.2 };
        if rng.gen_bool(special) {
            if pos {
                HornLit::Bot
            } else {
                HornLit::Top
            }
        } else {
            HornLit::Var(rng.gen_range(1..=k))
        }
    };
    let clauses = (0..n)
        .map(|_| [lit(rng, false), lit(rng, false), lit(rng, true)])
        .collect();
    HornFormula::new(k, clauses).unwrap()
}

fn qbf_expr(rng: &mut Rng8, vars: &[u32], ops: usize) -> QbfExpr {
    if ops == 0 {
        return QbfExpr::Var(*vars.choose(rng).unwrap());
    }
    match rng.gen_range(0..3) {
        0 => QbfExpr::not(qbf_expr(rng, vars, ops - 1)),
        c => {
            let l = rng.gen_range(0..ops);
            let a = qbf_expr(rng, vars, l);
            let b = qbf_expr(rng, vars, ops - 1 - l);
            if c == 1 {
                QbfExpr::and(a, b)
            } else {
                QbfExpr::or(a, b)
            }
        }
    }
}

/// At most one alternation, `max_vars` variables and `max_ops` operators (at least one).
pub fn qbf(rng: &mut Rng8, max_vars: u32, max_ops: usize) -> QbfFormula {
    let nv = rng.gen_range(1..=max_vars);
    let two = nv > 1 && rng.gen_bool(0.6);
    let split = if two { rng.gen_range(1..nv) } else { nv };
    let first = rng.gen_bool(0.5);
    let mut blocks = vec![Block {
        exists: first,
        vars: (1..=split).collect(),
    }];
    if two {
        blocks.push(Block {
            exists: !first,
            vars: (split + 1..=nv).collect(),
        });
    }
    let vars: Vec<u32> = (1..=nv).collect();
    let ops = rng.gen_range(1..=max_ops);
    QbfFormula::new(blocks, qbf_expr(rng, &vars, ops)).unwrap()
}
