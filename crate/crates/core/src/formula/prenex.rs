//! Prenexing of Boolean combinations of quantified formulas.
//!
//! Classical prenexing is only sound when every first-order domain that a quantifier is
//! pulled across is nonempty. Set variables may denote the empty set, so a universal
//! quantifier under a conjunction (or an existential under a disjunction) over a set
//! other than `ALL` is first relativized to `ALL` with an `isin` guard. `ALL` is never
//! empty since every (total) structure has a trace, and second-order domains always
//! contain at least the empty set.

use std::collections::{BTreeSet, HashMap};

use super::ast::*;
use crate::error::{Error, Result};

/// Pulls all quantifiers of `q` to the front.
///
/// The result is equivalent to `q` on every structure. Bound variables are renamed apart
/// where necessary. Fails if `q` contains `exists!` (expand sugar first).
pub fn prenex(q: &QFormula) -> Result<Formula> {
    let unique = uniquify(q);
    let nnf = to_nnf(&unique, false)?;
    let rel = relativize(&nnf, false, false);
    let (prefix, body) = pull(&rel);
    let alphabet = q.props();
    Ok(Formula {
        prefix,
        body,
        alphabet,
    })
}

/// Picks unused names; `taken` holds every name that already occurs.
pub(crate) struct Fresh {
    taken: BTreeSet<String>,
}

impl Fresh {
    pub(crate) fn new(taken: BTreeSet<String>) -> Self {
        Fresh { taken }
    }

    pub(crate) fn fresh(&mut self, base: &str) -> String {
        let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
        let stem = if stem.is_empty() { "v" } else { stem };
        (1..)
            .map(|i| format!("{stem}_{i}"))
            .find(|n| self.taken.insert(n.clone()))
            .unwrap()
    }
}

/// Every trace and set variable name occurring in `q`.
pub(crate) fn all_names(q: &QFormula) -> BTreeSet<String> {
    fn body_names(b: &Body, out: &mut BTreeSet<String>) {
        out.extend(b.trace_vars().into_iter().map(|v| v.0));
        out.extend(b.set_vars().into_iter().map(|v| v.0));
    }
    fn walk(q: &QFormula, out: &mut BTreeSet<String>) {
        match q {
            QFormula::Body(b) => body_names(b, out),
            QFormula::Not(a) => walk(a, out),
            QFormula::And(a, b) | QFormula::Or(a, b) | QFormula::Implies(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            QFormula::Quant(q, a) => {
                match q {
                    Quantifier::Fixpoint(fb) => {
                        out.insert(fb.set.0.clone());
                        for c in &fb.conjuncts {
                            for (p, x) in &c.binders {
                                out.insert(p.0.clone());
                                out.insert(x.0.clone());
                            }
                            body_names(&c.step, out);
                        }
                    }
                    other => {
                        if let Some(x) = other.bound_set() {
                            out.insert(x.0.clone());
                        }
                        if let Some((p, x)) = other.bound_trace() {
                            out.insert(p.0.clone());
                            out.insert(x.0.clone());
                        }
                    }
                }
                walk(a, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(q, &mut out);
    out
}

type Renaming = HashMap<String, String>;

fn lookup(map: &Renaming, name: &str) -> String {
    map.get(name).cloned().unwrap_or_else(|| name.to_string())
}

fn rename_body(b: &Body, tmap: &Renaming, smap: &Renaming) -> Body {
    b.rename_traces(&|v| TraceVar(lookup(tmap, &v.0)))
        .rename_sets(&|x| SetVar(lookup(smap, &x.0)))
}

/// Renames bound variables so that no name is bound twice anywhere in the formula.
pub fn uniquify(q: &QFormula) -> QFormula {
    struct St {
        fresh: Fresh,
        bound: BTreeSet<String>,
    }
    impl St {
        fn bind(&mut self, name: &str) -> String {
            if self.bound.insert(name.to_string()) {
                name.to_string()
            } else {
                let n = self.fresh.fresh(name);
                self.bound.insert(n.clone());
                n
            }
        }
    }
    fn walk(q: &QFormula, tmap: &Renaming, smap: &Renaming, st: &mut St) -> QFormula {
        match q {
            QFormula::Body(b) => QFormula::Body(rename_body(b, tmap, smap)),
            QFormula::Not(a) => QFormula::not(walk(a, tmap, smap, st)),
            QFormula::And(a, b) => {
                QFormula::and(walk(a, tmap, smap, st), walk(b, tmap, smap, st))
            }
            QFormula::Or(a, b) => QFormula::or(walk(a, tmap, smap, st), walk(b, tmap, smap, st)),
            QFormula::Implies(a, b) => {
                QFormula::implies(walk(a, tmap, smap, st), walk(b, tmap, smap, st))
            }
            QFormula::Quant(quant, inner) => {
                let mut tmap = tmap.clone();
                let mut smap = smap.clone();
                let nq = match quant {
                    Quantifier::SoExists(x) | Quantifier::SoForall(x) => {
                        let n = SetVar(st.bind(&x.0));
                        smap.insert(x.0.clone(), n.0.clone());
                        if matches!(quant, Quantifier::SoExists(_)) {
                            Quantifier::SoExists(n)
                        } else {
                            Quantifier::SoForall(n)
                        }
                    }
                    Quantifier::FoExists(p, x)
                    | Quantifier::FoForall(p, x)
                    | Quantifier::FoExistsUnique(p, x) => {
                        let x = SetVar(lookup(&smap, &x.0));
                        let n = TraceVar(st.bind(&p.0));
                        tmap.insert(p.0.clone(), n.0.clone());
                        match quant {
                            Quantifier::FoExists(..) => Quantifier::FoExists(n, x),
                            Quantifier::FoForall(..) => Quantifier::FoForall(n, x),
                            _ => Quantifier::FoExistsUnique(n, x),
                        }
                    }
                    Quantifier::Fixpoint(fb) => {
                        let n = SetVar(st.bind(&fb.set.0));
                        smap.insert(fb.set.0.clone(), n.0.clone());
                        let conjuncts = fb
                            .conjuncts
                            .iter()
                            .map(|c| {
                                let mut local = tmap.clone();
                                let binders = c
                                    .binders
                                    .iter()
                                    .map(|(p, x)| {
                                        let np = st.bind(&p.0);
                                        local.insert(p.0.clone(), np.clone());
                                        (TraceVar(np), SetVar(lookup(&smap, &x.0)))
                                    })
                                    .collect();
                                FixpointConjunct {
                                    binders,
                                    step: rename_body(&c.step, &local, &smap),
                                    target: c.target,
                                }
                            })
                            .collect();
                        Quantifier::Fixpoint(FixpointBinder { set: n, conjuncts })
                    }
                };
                QFormula::quant(nq, walk(inner, &tmap, &smap, st))
            }
        }
    }
    let mut taken = all_names(q);
    taken.insert(ALL.to_string());
    let mut st = St {
        fresh: Fresh::new(taken),
        bound: BTreeSet::new(),
    };
    st.bound.insert(ALL.to_string());
    walk(q, &Renaming::new(), &Renaming::new(), &mut st)
}

/// Negation normal form at the quantifier level: `Not` and `Implies` are eliminated
/// above bodies, flipping quantifiers under negation.
fn to_nnf(q: &QFormula, neg: bool) -> Result<QFormula> {
    Ok(match q {
        QFormula::Body(b) => QFormula::Body(if neg { negate(b) } else { b.clone() }),
        QFormula::Not(a) => to_nnf(a, !neg)?,
        QFormula::And(a, b) => {
            let (a, b) = (to_nnf(a, neg)?, to_nnf(b, neg)?);
            if neg {
                QFormula::or(a, b)
            } else {
                QFormula::and(a, b)
            }
        }
        QFormula::Or(a, b) => {
            let (a, b) = (to_nnf(a, neg)?, to_nnf(b, neg)?);
            if neg {
                QFormula::and(a, b)
            } else {
                QFormula::or(a, b)
            }
        }
        QFormula::Implies(a, b) => {
            let (a, b) = (to_nnf(a, !neg)?, to_nnf(b, neg)?);
            if neg {
                QFormula::and(a, b)
            } else {
                QFormula::or(a, b)
            }
        }
        QFormula::Quant(Quantifier::FoExistsUnique(p, _), _) => {
            return Err(Error::IllFormed(format!(
                "`exists! {p}` must be expanded before prenexing"
            )))
        }
        QFormula::Quant(quant, inner) => {
            let quant = if neg { quant.flipped() } else { quant.clone() };
            QFormula::quant(quant, to_nnf(inner, neg)?)
        }
    })
}

/// Negation that strips an existing top-level `Not` instead of stacking another.
pub fn negate(b: &Body) -> Body {
    match b {
        Body::Not(inner) => (**inner).clone(),
        Body::True => Body::False,
        Body::False => Body::True,
        other => Body::not(other.clone()),
    }
}

fn relativize(q: &QFormula, under_and: bool, under_or: bool) -> QFormula {
    match q {
        QFormula::Body(_) => q.clone(),
        QFormula::And(a, b) => QFormula::and(
            relativize(a, true, under_or),
            relativize(b, true, under_or),
        ),
        QFormula::Or(a, b) => QFormula::or(
            relativize(a, under_and, true),
            relativize(b, under_and, true),
        ),
        QFormula::Quant(Quantifier::FoForall(p, x), inner) if under_and && !x.is_all() => {
            QFormula::quant(
                Quantifier::FoForall(p.clone(), SetVar::all()),
                QFormula::or(
                    QFormula::Body(guard(p, x).negated()),
                    relativize(inner, under_and, true),
                ),
            )
        }
        QFormula::Quant(Quantifier::FoExists(p, x), inner) if under_or && !x.is_all() => {
            QFormula::quant(
                Quantifier::FoExists(p.clone(), SetVar::all()),
                QFormula::and(
                    QFormula::Body(guard(p, x)),
                    relativize(inner, true, under_or),
                ),
            )
        }
        QFormula::Quant(quant, inner) => {
            QFormula::quant(quant.clone(), relativize(inner, under_and, under_or))
        }
        // eliminated by `to_nnf`
        QFormula::Not(_) | QFormula::Implies(..) => unreachable!("relativize expects NNF"),
    }
}

fn guard(p: &TraceVar, x: &SetVar) -> Body {
    Body::InSet {
        trace: p.clone(),
        set: x.clone(),
    }
}

impl Body {
    fn negated(self) -> Body {
        Body::not(self)
    }
}

fn pull(q: &QFormula) -> (Vec<Quantifier>, Body) {
    match q {
        QFormula::Body(b) => (vec![], b.clone()),
        QFormula::And(a, b) | QFormula::Or(a, b) => {
            let (mut pa, ba) = pull(a);
            let (pb, bb) = pull(b);
            pa.extend(pb);
            let body = if matches!(q, QFormula::And(..)) {
                Body::and(ba, bb)
            } else {
                Body::or(ba, bb)
            };
            (pa, body)
        }
        QFormula::Quant(quant, inner) => {
            let (mut p, b) = pull(inner);
            p.insert(0, quant.clone());
            (p, b)
        }
        QFormula::Not(_) | QFormula::Implies(..) => unreachable!("pull expects NNF"),
    }
}
