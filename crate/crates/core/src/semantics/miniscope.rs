//! Pushes prenex quantifiers as far inward as exact equivalences allow.
//!
//! The matrix is put into negation normal form with flattened `&`/`|`; quantifiers are
//! then inserted innermost first. All rewrites are equivalences over the semantics with
//! possibly empty set variables:
//!
//! - `forall` over `&` and `exists` over `|` distribute;
//! - `forall` over `|` and `exists` over `&` only wrap the children that mention the
//!   variable;
//! - a first-order quantifier over `X != ALL` whose variable is unused becomes an
//!   emptiness test on `X`; otherwise an unused quantifier disappears (`ALL` and the
//!   powerset are never empty);
//! - `isin` guards introduced by prenexing are folded back into the domain;
//! - quantifiers commute into a fixpoint binder that does not depend on them.

use std::collections::BTreeSet;

use crate::formula::{Body, FixpointBinder, Quantifier, SetVar, TraceVar};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum MNode {
    Leaf(Body),
    And(Vec<MNode>),
    Or(Vec<MNode>),
    Quant(Quantifier, Box<MNode>),
    /// `exists: false` means "`set` is empty or `child`", `true` means "`set` is nonempty
    /// and `child`".
    Vacuous {
        exists: bool,
        set: SetVar,
        child: Box<MNode>,
    },
}

#[derive(Default)]
struct Free {
    traces: BTreeSet<TraceVar>,
    sets: BTreeSet<SetVar>,
}

fn binder_free(fb: &FixpointBinder) -> Free {
    let mut f = Free::default();
    for c in &fb.conjuncts {
        let local: BTreeSet<&TraceVar> = c.binders.iter().map(|(p, _)| p).collect();
        f.traces
            .extend(c.step.trace_vars().into_iter().filter(|v| !local.contains(v)));
        f.sets.extend(
            c.binders
                .iter()
                .map(|(_, x)| x.clone())
                .filter(|x| *x != fb.set && !x.is_all()),
        );
    }
    f
}

fn free(n: &MNode) -> Free {
    match n {
        MNode::Leaf(b) => Free {
            traces: b.trace_vars(),
            sets: b.set_vars().into_iter().filter(|x| !x.is_all()).collect(),
        },
        MNode::And(cs) | MNode::Or(cs) => {
            let mut f = Free::default();
            for c in cs {
                let g = free(c);
                f.traces.extend(g.traces);
                f.sets.extend(g.sets);
            }
            f
        }
        MNode::Vacuous { set, child, .. } => {
            let mut f = free(child);
            f.sets.insert(set.clone());
            f
        }
        MNode::Quant(q, child) => {
            let mut f = free(child);
            match q {
                Quantifier::Fixpoint(fb) => {
                    let g = binder_free(fb);
                    f.traces.extend(g.traces);
                    f.sets.extend(g.sets);
                    f.sets.remove(&fb.set);
                }
                Quantifier::SoExists(x) | Quantifier::SoForall(x) => {
                    f.sets.remove(x);
                }
                Quantifier::FoExists(p, x)
                | Quantifier::FoForall(p, x)
                | Quantifier::FoExistsUnique(p, x) => {
                    f.traces.remove(p);
                    if !x.is_all() {
                        f.sets.insert(x.clone());
                    }
                }
            }
            f
        }
    }
}

fn mentions(q: &Quantifier, f: &Free) -> bool {
    match q {
        Quantifier::FoExists(p, _) | Quantifier::FoForall(p, _) | Quantifier::FoExistsUnique(p, _) => {
            f.traces.contains(p)
        }
        Quantifier::SoExists(x) | Quantifier::SoForall(x) => f.sets.contains(x),
        Quantifier::Fixpoint(fb) => f.sets.contains(&fb.set),
    }
}

pub(crate) fn mk_and(cs: Vec<MNode>) -> MNode {
    mk_junction(cs, true)
}

pub(crate) fn mk_or(cs: Vec<MNode>) -> MNode {
    mk_junction(cs, false)
}

fn mk_junction(cs: Vec<MNode>, is_and: bool) -> MNode {
    let (unit, zero) = if is_and {
        (Body::True, Body::False)
    } else {
        (Body::False, Body::True)
    };
    let mut out = Vec::with_capacity(cs.len());
    for c in cs {
        match c {
            MNode::And(inner) if is_and => out.extend(inner),
            MNode::Or(inner) if !is_and => out.extend(inner),
            MNode::Leaf(ref b) if *b == unit => {}
            MNode::Leaf(ref b) if *b == zero => return MNode::Leaf(zero),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => MNode::Leaf(unit),
        1 => out.pop().unwrap(),
        _ if is_and => MNode::And(out),
        _ => MNode::Or(out),
    }
}

/// Negation normal form of a quantifier-free body, split at `&`, `|` and `->`.
pub(crate) fn nnf(b: &Body, neg: bool) -> MNode {
    match b {
        Body::True | Body::False => {
            let v = (*b == Body::True) != neg;
            MNode::Leaf(if v { Body::True } else { Body::False })
        }
        Body::Not(x) => nnf(x, !neg),
        Body::And(l, r) if !neg => mk_and(vec![nnf(l, false), nnf(r, false)]),
        Body::And(l, r) => mk_or(vec![nnf(l, true), nnf(r, true)]),
        Body::Or(l, r) if !neg => mk_or(vec![nnf(l, false), nnf(r, false)]),
        Body::Or(l, r) => mk_and(vec![nnf(l, true), nnf(r, true)]),
        Body::Implies(l, r) if !neg => mk_or(vec![nnf(l, true), nnf(r, false)]),
        Body::Implies(l, r) => mk_and(vec![nnf(l, false), nnf(r, true)]),
        other if neg => MNode::Leaf(Body::not(other.clone())),
        other => MNode::Leaf(other.clone()),
    }
}

fn is_guard(n: &MNode, p: &TraceVar, negated: bool) -> Option<SetVar> {
    let b = match n {
        MNode::Leaf(b) => b,
        _ => return None,
    };
    let inner = match (negated, b) {
        (true, Body::Not(x)) => &**x,
        (false, x) => x,
        _ => return None,
    };
    match inner {
        Body::InSet { trace, set } if trace == p => Some(set.clone()),
        _ => None,
    }
}

fn children(n: MNode, is_and: bool) -> Vec<MNode> {
    match n {
        MNode::And(cs) if is_and => cs,
        MNode::Or(cs) if !is_and => cs,
        other => vec![other],
    }
}

/// Places `q` over `node` as deep as possible.
pub(crate) fn push(q: &Quantifier, node: MNode) -> MNode {
    let f = free(&node);
    if !mentions(q, &f) {
        return match q {
            Quantifier::FoForall(_, x) | Quantifier::FoExists(_, x) if !x.is_all() => {
                MNode::Vacuous {
                    exists: matches!(q, Quantifier::FoExists(..)),
                    set: x.clone(),
                    child: Box::new(node),
                }
            }
            _ => node,
        };
    }
    if let Quantifier::Fixpoint(_) = q {
        return match node {
            MNode::And(cs) => wrap_mentioning(q, cs, true),
            MNode::Or(cs) => wrap_mentioning(q, cs, false),
            other => MNode::Quant(q.clone(), Box::new(other)),
        };
    }
    if let MNode::Quant(Quantifier::Fixpoint(fb), child) = &node {
        if !mentions(q, &binder_free(fb)) {
            let inner = push(q, (**child).clone());
            return MNode::Quant(Quantifier::Fixpoint(fb.clone()), Box::new(inner));
        }
    }
    let universal = matches!(q, Quantifier::FoForall(..) | Quantifier::SoForall(_));
    match node {
        MNode::And(cs) if universal => mk_and(cs.into_iter().map(|c| push(q, c)).collect()),
        MNode::Or(cs) if !universal => mk_or(cs.into_iter().map(|c| push(q, c)).collect()),
        node @ (MNode::And(_) | MNode::Or(_) | MNode::Leaf(_)) => {
            // universal over `|`, existential over `&`
            let is_and = !universal;
            let mut cs = children(node, is_and);
            match q {
                Quantifier::FoExists(p, x) | Quantifier::FoForall(p, x) if x.is_all() => {
                    if let Some((i, set)) = cs
                        .iter()
                        .enumerate()
                        .find_map(|(i, c)| is_guard(c, p, universal).map(|s| (i, s)))
                    {
                        cs.remove(i);
                        let narrowed = if universal {
                            Quantifier::FoForall(p.clone(), set)
                        } else {
                            Quantifier::FoExists(p.clone(), set)
                        };
                        return push(&narrowed, mk_junction(cs, is_and));
                    }
                }
                _ => {}
            }
            wrap_mentioning(q, cs, is_and)
        }
        other => MNode::Quant(q.clone(), Box::new(other)),
    }
}

/// `q` over the children that mention its variable; the others stay outside.
fn wrap_mentioning(q: &Quantifier, cs: Vec<MNode>, is_and: bool) -> MNode {
    let (mut m, rest): (Vec<_>, Vec<_>) = cs.into_iter().partition(|c| mentions(q, &free(c)));
    let wrapped = if m.len() == 1 && !matches!(m[0], MNode::Leaf(_)) {
        push(q, m.pop().unwrap())
    } else {
        MNode::Quant(q.clone(), Box::new(mk_junction(m, is_and)))
    };
    if rest.is_empty() {
        return wrapped;
    }
    let mut all = rest;
    all.push(wrapped);
    mk_junction(all, is_and)
}

/// The miniscoped tree of a prenex formula.
pub(crate) fn miniscope(prefix: &[Quantifier], body: &Body) -> MNode {
    prefix
        .iter()
        .rev()
        .fold(nnf(body, false), |node, q| push(q, node))
}
