//! Straightforward recursive evaluators over named assignments. They serve as
//! references for the optimized checker and accept non-prenex input.

use std::collections::HashMap;

use super::body::{CompiledBody, Env, Names};
use super::fixpoint::{compute_fixpoint, SetAssignment, TraceAssignment};
use super::subset::TraceSubset;
use crate::error::{Error, Result};
use crate::formula::{Body, QFormula, Quantifier, SetVar};
use crate::kripke::TraceSet;

/// Value of a quantifier-free, sugar-free body at position `pos`.
pub fn eval_body(
    ts: &TraceSet,
    pi: &TraceAssignment,
    delta: &SetAssignment,
    b: &Body,
    pos: usize,
) -> Result<bool> {
    let traces: HashMap<String, usize> = pi
        .keys()
        .enumerate()
        .map(|(i, v)| (v.0.clone(), i))
        .collect();
    let sets: HashMap<String, usize> = delta
        .keys()
        .filter(|x| !x.is_all())
        .enumerate()
        .map(|(i, x)| (x.0.clone(), i))
        .collect();
    let cb = CompiledBody::compile(
        b,
        &Names {
            traces: &traces,
            sets: &sets,
            aps: ts.aps(),
        },
    )?;
    let mut env = Env::new(ts.len(), traces.len(), sets.len());
    for (v, &t) in pi {
        if t >= ts.len() {
            return Err(Error::UnmappedTrace(v.0.clone()));
        }
        env.traces[traces[&v.0]] = t;
    }
    for (x, a) in delta {
        if let Some(&s) = sets.get(&x.0) {
            env.sets[s] = a.clone();
        }
    }
    Ok(cb.eval(ts, &env, pos, &mut Vec::new()))
}

/// Direct evaluation of a Boolean combination of quantified formulas: quantifiers are
/// expanded where they occur, second-order ones over all subsets, `exists!` by counting.
pub fn eval_qformula(
    ts: &TraceSet,
    pi: &TraceAssignment,
    delta: &SetAssignment,
    q: &QFormula,
) -> Result<bool> {
    let mut pi = pi.clone();
    let mut delta = delta.clone();
    delta.insert(SetVar::all(), TraceSubset::full(ts.len()));
    eval_q(ts, &mut pi, &mut delta, q)
}

fn eval_q(
    ts: &TraceSet,
    pi: &mut TraceAssignment,
    delta: &mut SetAssignment,
    q: &QFormula,
) -> Result<bool> {
    Ok(match q {
        QFormula::Body(b) => eval_body(ts, pi, delta, b, 0)?,
        QFormula::Not(a) => !eval_q(ts, pi, delta, a)?,
        QFormula::And(a, b) => eval_q(ts, pi, delta, a)? && eval_q(ts, pi, delta, b)?,
        QFormula::Or(a, b) => eval_q(ts, pi, delta, a)? || eval_q(ts, pi, delta, b)?,
        QFormula::Implies(a, b) => !eval_q(ts, pi, delta, a)? || eval_q(ts, pi, delta, b)?,
        QFormula::Quant(quant, inner) => match quant {
            Quantifier::FoExists(p, x)
            | Quantifier::FoForall(p, x)
            | Quantifier::FoExistsUnique(p, x) => {
                let dom = delta
                    .get(x)
                    .ok_or_else(|| Error::UnmappedSet(x.0.clone()))?
                    .clone();
                let saved = pi.get(p).copied();
                let mut count = 0;
                let mut all = true;
                for t in dom.iter() {
                    pi.insert(p.clone(), t);
                    if eval_q(ts, pi, delta, inner)? {
                        count += 1;
                    } else {
                        all = false;
                    }
                }
                restore(pi, p, saved);
                match quant {
                    Quantifier::FoExists(..) => count > 0,
                    Quantifier::FoForall(..) => all,
                    _ => count == 1,
                }
            }
            Quantifier::SoExists(x) | Quantifier::SoForall(x) => {
                let n = ts.len();
                if n > 24 {
                    return Err(Error::TooManyTraces(n));
                }
                let saved = delta.get(x).cloned();
                let exists = matches!(quant, Quantifier::SoExists(_));
                let mut result = !exists;
                for mask in 0..(1u64 << n) {
                    delta.insert(x.clone(), TraceSubset::from_mask(n, mask));
                    if eval_q(ts, pi, delta, inner)? == exists {
                        result = exists;
                        break;
                    }
                }
                restore(delta, x, saved);
                result
            }
            Quantifier::Fixpoint(fb) => {
                let a = compute_fixpoint(ts, pi, delta, fb)?;
                let saved = delta.insert(fb.set.clone(), a);
                let v = eval_q(ts, pi, delta, inner)?;
                restore(delta, &fb.set, saved);
                v
            }
        },
    })
}

fn restore<K: Ord + Clone, V>(m: &mut std::collections::BTreeMap<K, V>, k: &K, saved: Option<V>) {
    match saved {
        Some(v) => {
            m.insert(k.clone(), v);
        }
        None => {
            m.remove(k);
        }
    }
}
