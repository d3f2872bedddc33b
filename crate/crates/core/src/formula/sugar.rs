use std::collections::BTreeSet;

use super::ast::*;
use super::prenex::{all_names, prenex, Fresh};
use crate::error::Result;

/// `p =_AP q`: global agreement on every proposition of `alphabet`.
pub fn trace_eq_body(p: &TraceVar, q: &TraceVar, alphabet: &BTreeSet<String>) -> Body {
    Body::and_all(alphabet.iter().map(|a| {
        Body::globally(Body::iff(
            Body::Atom {
                prop: a.clone(),
                trace: p.clone(),
            },
            Body::Atom {
                prop: a.clone(),
                trace: q.clone(),
            },
        ))
    }))
}

/// Removes all sugar, using the formula's own alphabet for trace equality.
pub fn expand_sugar(f: &Formula) -> Result<Formula> {
    expand_sugar_with(f, &BTreeSet::new())
}

/// Removes all sugar; trace equality ranges over the formula's alphabet extended by
/// `extra` (typically the propositions of the structure being checked, so that `==`
/// coincides with equality of traces).
///
/// A formula without sugar is returned unchanged.
pub fn expand_sugar_with(f: &Formula, extra: &BTreeSet<String>) -> Result<Formula> {
    let mut alphabet = f.alphabet.clone();
    alphabet.extend(extra.iter().cloned());
    if !f.has_sugar() {
        return Ok(Formula {
            alphabet,
            ..f.clone()
        });
    }
    let q = QFormula::from_formula(f);
    let plain = desugar_qformula(&q, &alphabet);
    let mut out = prenex(&plain)?;
    out.alphabet = alphabet;
    Ok(out)
}

/// Rewrites `exists!`, membership and trace equality into plain quantifiers and bodies.
pub fn desugar_qformula(q: &QFormula, alphabet: &BTreeSet<String>) -> QFormula {
    let mut taken = all_names(q);
    taken.insert(ALL.to_string());
    let mut fresh = Fresh::new(taken);
    desugar(q, alphabet, &mut fresh)
}

fn desugar(q: &QFormula, ap: &BTreeSet<String>, fresh: &mut Fresh) -> QFormula {
    match q {
        QFormula::Body(b) => lift_body(b, ap, fresh),
        QFormula::Not(a) => QFormula::not(desugar(a, ap, fresh)),
        QFormula::And(a, b) => QFormula::and(desugar(a, ap, fresh), desugar(b, ap, fresh)),
        QFormula::Or(a, b) => QFormula::or(desugar(a, ap, fresh), desugar(b, ap, fresh)),
        QFormula::Implies(a, b) => {
            QFormula::implies(desugar(a, ap, fresh), desugar(b, ap, fresh))
        }
        QFormula::Quant(Quantifier::FoExistsUnique(p, x), inner) => {
            // exists p in X. inner(p) & forall p' in X. (inner(p') -> p = p')
            let inner = desugar(inner, ap, fresh);
            let p2 = TraceVar(fresh.fresh(&format!("{}'", p.0)));
            let renamed = subst_trace(&inner, p, &p2);
            QFormula::quant(
                Quantifier::FoExists(p.clone(), x.clone()),
                QFormula::and(
                    inner,
                    QFormula::quant(
                        Quantifier::FoForall(p2.clone(), x.clone()),
                        QFormula::implies(renamed, QFormula::Body(trace_eq_body(p, &p2, ap))),
                    ),
                ),
            )
        }
        QFormula::Quant(Quantifier::Fixpoint(fb), inner) => {
            let fb = FixpointBinder {
                set: fb.set.clone(),
                conjuncts: fb
                    .conjuncts
                    .iter()
                    .map(|c| FixpointConjunct {
                        step: expand_eq(&c.step, ap),
                        ..c.clone()
                    })
                    .collect(),
            };
            QFormula::quant(Quantifier::Fixpoint(fb), desugar(inner, ap, fresh))
        }
        QFormula::Quant(quant, inner) => QFormula::quant(quant.clone(), desugar(inner, ap, fresh)),
    }
}

fn expand_eq(b: &Body, ap: &BTreeSet<String>) -> Body {
    match b {
        Body::TraceEq(p, q) => trace_eq_body(p, q, ap),
        _ => b.map_children(|c| expand_eq(c, ap)),
    }
}

fn contains_member(b: &Body) -> bool {
    match b {
        Body::Member { .. } => true,
        _ => b.children().into_iter().any(contains_member),
    }
}

/// Turns membership nodes (which only occur in the Boolean skeleton) into existential
/// quantifiers over the set with an equality body.
fn lift_body(b: &Body, ap: &BTreeSet<String>, fresh: &mut Fresh) -> QFormula {
    if !contains_member(b) {
        return QFormula::Body(expand_eq(b, ap));
    }
    match b {
        Body::Member { trace, set } => {
            let w = TraceVar(fresh.fresh(&format!("{}_w", trace.0)));
            let eq = trace_eq_body(&w, trace, ap);
            QFormula::quant(
                Quantifier::FoExists(w, set.clone()),
                QFormula::Body(eq),
            )
        }
        Body::Not(a) => QFormula::not(lift_body(a, ap, fresh)),
        Body::And(l, r) => QFormula::and(lift_body(l, ap, fresh), lift_body(r, ap, fresh)),
        Body::Or(l, r) => QFormula::or(lift_body(l, ap, fresh), lift_body(r, ap, fresh)),
        Body::Implies(l, r) => {
            QFormula::implies(lift_body(l, ap, fresh), lift_body(r, ap, fresh))
        }
        Body::Iff(l, r) => QFormula::and(
            QFormula::implies(lift_body(l, ap, fresh), lift_body(r, ap, fresh)),
            QFormula::implies(lift_body(r, ap, fresh), lift_body(l, ap, fresh)),
        ),
        // the parser rejects membership below temporal operators
        _ => QFormula::Body(expand_eq(b, ap)),
    }
}

/// Replaces free occurrences of trace variable `from` by `to`.
pub fn subst_trace(q: &QFormula, from: &TraceVar, to: &TraceVar) -> QFormula {
    let ren = |b: &Body| b.rename_traces(&|v| if v == from { to.clone() } else { v.clone() });
    match q {
        QFormula::Body(b) => QFormula::Body(ren(b)),
        QFormula::Not(a) => QFormula::not(subst_trace(a, from, to)),
        QFormula::And(a, b) => QFormula::and(subst_trace(a, from, to), subst_trace(b, from, to)),
        QFormula::Or(a, b) => QFormula::or(subst_trace(a, from, to), subst_trace(b, from, to)),
        QFormula::Implies(a, b) => {
            QFormula::implies(subst_trace(a, from, to), subst_trace(b, from, to))
        }
        QFormula::Quant(quant, inner) => {
            if quant.bound_trace().map(|(p, _)| p) == Some(from) {
                return q.clone();
            }
            let quant = match quant {
                Quantifier::Fixpoint(fb) => Quantifier::Fixpoint(FixpointBinder {
                    set: fb.set.clone(),
                    conjuncts: fb
                        .conjuncts
                        .iter()
                        .map(|c| {
                            if c.binders.iter().any(|(p, _)| p == from) {
                                c.clone()
                            } else {
                                FixpointConjunct {
                                    step: ren(&c.step),
                                    ..c.clone()
                                }
                            }
                        })
                        .collect(),
                }),
                other => other.clone(),
            };
            QFormula::quant(quant, subst_trace(inner, from, to))
        }
    }
}
