use std::collections::{BTreeMap, HashMap};

use super::body::{CompiledBody, Env, Names, SetRef};
use super::stats::Stats;
use super::subset::{masks_by_cardinality, TraceSubset};
use crate::error::{Error, Result};
use crate::formula::{Body, FixpointBinder, SetVar, TraceVar};
use crate::kripke::TraceSet;

/// Partial trace assignment: trace variable to trace index.
pub type TraceAssignment = BTreeMap<TraceVar, usize>;
/// Partial trace-set assignment. `ALL` is implicit and need not be present.
pub type SetAssignment = BTreeMap<SetVar, TraceSubset>;

/// Default limit on the number of traces for [`sol_bruteforce`].
pub const SOL_BOUND: usize = 16;

#[derive(Clone, Copy, Debug)]
enum Dom {
    Own,
    Set(SetRef),
}

#[derive(Clone, Debug)]
struct Conjunct {
    slots: Vec<usize>,
    doms: Vec<Dom>,
    target: usize,
    /// `parts[l]`: top-level conjuncts of the step that can be decided once the first
    /// `l` binders are bound.
    parts: Vec<Vec<CompiledBody>>,
    full: CompiledBody,
}

/// A fixpoint binder resolved against a slot layout.
#[derive(Clone, Debug)]
pub(crate) struct CompiledFix {
    pub set_slot: usize,
    conjuncts: Vec<Conjunct>,
}

fn split_and(b: &Body, out: &mut Vec<Body>) {
    match b {
        Body::And(l, r) => {
            split_and(l, out);
            split_and(r, out);
        }
        other => out.push(other.clone()),
    }
}

impl CompiledFix {
    /// `next_slot` supplies fresh trace slots for the conjunct binders.
    pub fn compile(
        fb: &FixpointBinder,
        set_slot: usize,
        traces: &HashMap<String, usize>,
        sets: &HashMap<String, usize>,
        aps: &[String],
        next_slot: &mut usize,
    ) -> Result<CompiledFix> {
        let mut conjuncts = Vec::new();
        for c in &fb.conjuncts {
            let mut local = traces.clone();
            let mut slots = Vec::new();
            let mut doms = Vec::new();
            for (p, x) in &c.binders {
                let s = *next_slot;
                *next_slot += 1;
                local.insert(p.0.clone(), s);
                slots.push(s);
                doms.push(if *x == fb.set {
                    Dom::Own
                } else {
                    Dom::Set(
                        Names {
                            traces: &local,
                            sets,
                            aps,
                        }
                        .set_ref(&x.0)?,
                    )
                });
            }
            let names = Names {
                traces: &local,
                sets,
                aps,
            };
            let full = CompiledBody::compile(&c.step, &names)?;
            if full.reads_sets {
                return Err(Error::Fixpoint("the step formula must not use `isin`".into()));
            }
            let mut pieces = Vec::new();
            split_and(&c.step, &mut pieces);
            let mut parts = vec![Vec::new(); slots.len() + 1];
            for piece in &pieces {
                let cb = CompiledBody::compile(piece, &names)?;
                let level = slots
                    .iter()
                    .rposition(|s| cb.slots.contains(s))
                    .map_or(0, |i| i + 1);
                parts[level].push(cb);
            }
            conjuncts.push(Conjunct {
                slots,
                doms,
                target: c.target,
                parts,
                full,
            });
        }
        Ok(CompiledFix {
            set_slot,
            conjuncts,
        })
    }

    /// Least fixpoint together with the strictly increasing sequence of rounds.
    ///
    /// With `prune`, rounds are computed semi-naively (every tuple must use a trace added
    /// in the previous round), partial steps are checked as soon as their variables are
    /// bound, and tuples whose target is already present are skipped.
    pub fn least(
        &self,
        ts: &TraceSet,
        env: &mut Env,
        stats: &mut Stats,
        prune: bool,
    ) -> (TraceSubset, Vec<TraceSubset>) {
        let n = ts.len();
        let mut rounds = Vec::new();
        let mut prev = TraceSubset::empty(n);
        let mut cur = TraceSubset::empty(n);
        let mut scratch = Vec::new();
        for round in 1.. {
            stats.fixpoint_rounds += 1;
            let mut next = cur.clone();
            for c in &self.conjuncts {
                let base: Vec<TraceSubset> = c
                    .doms
                    .iter()
                    .map(|d| match d {
                        Dom::Own => cur.clone(),
                        Dom::Set(r) => env.set(*r).clone(),
                    })
                    .collect();
                if !prune {
                    add_tuples(c, 0, &base, ts, env, &mut next, stats, false, &mut scratch);
                    continue;
                }
                let own: Vec<usize> = (0..c.doms.len())
                    .filter(|&i| matches!(c.doms[i], Dom::Own))
                    .collect();
                if own.is_empty() {
                    if round == 1 {
                        add_tuples(c, 0, &base, ts, env, &mut next, stats, true, &mut scratch);
                    }
                    continue;
                }
                if round == 1 {
                    continue;
                }
                let delta = cur.difference(&prev);
                for (k, _) in own.iter().enumerate() {
                    let mut doms = base.clone();
                    for (j, &pos) in own.iter().enumerate() {
                        doms[pos] = match j.cmp(&k) {
                            std::cmp::Ordering::Less => prev.clone(),
                            std::cmp::Ordering::Equal => delta.clone(),
                            std::cmp::Ordering::Greater => cur.clone(),
                        };
                    }
                    add_tuples(c, 0, &doms, ts, env, &mut next, stats, true, &mut scratch);
                }
            }
            if next == cur {
                break;
            }
            rounds.push(next.clone());
            prev = std::mem::replace(&mut cur, next);
        }
        (cur, rounds)
    }

    /// Whether `a` satisfies every implication of the binder.
    pub fn holds(&self, ts: &TraceSet, env: &mut Env, a: &TraceSubset, stats: &mut Stats) -> bool {
        let mut scratch = Vec::new();
        self.conjuncts.iter().all(|c| {
            let doms: Vec<TraceSubset> = c
                .doms
                .iter()
                .map(|d| match d {
                    Dom::Own => a.clone(),
                    Dom::Set(r) => env.set(*r).clone(),
                })
                .collect();
            closed(c, 0, &doms, ts, env, a, stats, &mut scratch)
        })
    }

    /// Inclusion-minimal sets satisfying the binder, by brute force over all subsets.
    pub fn minimal_solutions(
        &self,
        ts: &TraceSet,
        env: &mut Env,
        stats: &mut Stats,
        bound: usize,
    ) -> Result<Vec<TraceSubset>> {
        let n = ts.len();
        if n > bound || n > 63 {
            return Err(Error::BoundExceeded {
                traces: n,
                bound: bound.min(63),
            });
        }
        let mut found: Vec<TraceSubset> = Vec::new();
        for mask in masks_by_cardinality(n) {
            stats.subsets_enumerated += 1;
            let a = TraceSubset::from_mask(n, mask);
            // any satisfying strict superset of a minimal solution is not minimal, and
            // candidates come in order of increasing size
            if found.iter().any(|m| m.is_subset(&a)) {
                continue;
            }
            if self.holds(ts, env, &a, stats) {
                found.push(a);
            }
        }
        Ok(found)
    }
}

#[allow(clippy::too_many_arguments)]
fn add_tuples(
    c: &Conjunct,
    lvl: usize,
    doms: &[TraceSubset],
    ts: &TraceSet,
    env: &mut Env,
    next: &mut TraceSubset,
    stats: &mut Stats,
    prune: bool,
    scratch: &mut Vec<bool>,
) {
    if prune {
        for p in &c.parts[lvl] {
            stats.body_evaluations += 1;
            if !p.eval(ts, env, 0, scratch) {
                return;
            }
        }
    }
    if lvl == c.slots.len() {
        let holds = prune || {
            stats.body_evaluations += 1;
            c.full.eval(ts, env, 0, scratch)
        };
        if holds {
            next.insert(env.traces[c.slots[c.target]]);
        }
        return;
    }
    let mut t = doms[lvl].next_from(0);
    while let Some(i) = t {
        t = doms[lvl].next_from(i + 1);
        if prune && lvl == c.target && next.contains(i) {
            continue;
        }
        env.traces[c.slots[lvl]] = i;
        add_tuples(c, lvl + 1, doms, ts, env, next, stats, prune, scratch);
    }
}

#[allow(clippy::too_many_arguments)]
fn closed(
    c: &Conjunct,
    lvl: usize,
    doms: &[TraceSubset],
    ts: &TraceSet,
    env: &mut Env,
    a: &TraceSubset,
    stats: &mut Stats,
    scratch: &mut Vec<bool>,
) -> bool {
    for p in &c.parts[lvl] {
        stats.body_evaluations += 1;
        if !p.eval(ts, env, 0, scratch) {
            return true;
        }
    }
    if lvl == c.slots.len() {
        return a.contains(env.traces[c.slots[c.target]]);
    }
    let mut t = doms[lvl].next_from(0);
    while let Some(i) = t {
        t = doms[lvl].next_from(i + 1);
        if lvl == c.target && a.contains(i) {
            continue;
        }
        env.traces[c.slots[lvl]] = i;
        if !closed(c, lvl + 1, doms, ts, env, a, stats, scratch) {
            return false;
        }
    }
    true
}

/// Slot layout for the public entry points that take explicit assignments.
fn layout(
    ts: &TraceSet,
    pi: &TraceAssignment,
    delta: &SetAssignment,
    fix: &FixpointBinder,
) -> Result<(CompiledFix, Env)> {
    let traces: HashMap<String, usize> = pi
        .keys()
        .enumerate()
        .map(|(i, v)| (v.0.clone(), i))
        .collect();
    let mut sets: HashMap<String, usize> = HashMap::new();
    for x in delta.keys().filter(|x| !x.is_all() && **x != fix.set) {
        let n = sets.len();
        sets.insert(x.0.clone(), n);
    }
    let own = sets.len();
    sets.insert(fix.set.0.clone(), own);
    let mut next_slot = traces.len();
    let cf = CompiledFix::compile(fix, own, &traces, &sets, ts.aps(), &mut next_slot)?;
    let mut env = Env::new(ts.len(), next_slot, sets.len());
    for (v, &t) in pi {
        if t >= ts.len() {
            return Err(Error::UnmappedTrace(v.0.clone()));
        }
        env.traces[traces[&v.0]] = t;
    }
    for (x, a) in delta {
        if let Some(&s) = sets.get(&x.0) {
            if s != own {
                env.sets[s] = a.clone();
            }
        }
    }
    Ok((cf, env))
}

/// Least fixpoint of `fix` under the given assignments, starting from the empty set.
pub fn compute_fixpoint(
    ts: &TraceSet,
    pi: &TraceAssignment,
    delta: &SetAssignment,
    fix: &FixpointBinder,
) -> Result<TraceSubset> {
    Ok(compute_fixpoint_rounds(ts, pi, delta, fix)?.0)
}

/// Least fixpoint plus the sets reached after each productive round.
pub fn compute_fixpoint_rounds(
    ts: &TraceSet,
    pi: &TraceAssignment,
    delta: &SetAssignment,
    fix: &FixpointBinder,
) -> Result<(TraceSubset, Vec<TraceSubset>)> {
    let (cf, mut env) = layout(ts, pi, delta, fix)?;
    Ok(cf.least(ts, &mut env, &mut Stats::default(), true))
}

/// Whether `a` satisfies all implications of `fix`.
pub fn fixpoint_constraint_holds(
    ts: &TraceSet,
    pi: &TraceAssignment,
    delta: &SetAssignment,
    fix: &FixpointBinder,
    a: &TraceSubset,
) -> Result<bool> {
    let (cf, mut env) = layout(ts, pi, delta, fix)?;
    Ok(cf.holds(ts, &mut env, a, &mut Stats::default()))
}

/// All inclusion-minimal sets satisfying `fix`, by enumerating every subset.
/// Fails if the trace set has more than [`SOL_BOUND`] traces.
pub fn sol_bruteforce(
    ts: &TraceSet,
    pi: &TraceAssignment,
    delta: &SetAssignment,
    fix: &FixpointBinder,
) -> Result<Vec<TraceSubset>> {
    sol_bruteforce_bounded(ts, pi, delta, fix, SOL_BOUND)
}

pub fn sol_bruteforce_bounded(
    ts: &TraceSet,
    pi: &TraceAssignment,
    delta: &SetAssignment,
    fix: &FixpointBinder,
    bound: usize,
) -> Result<Vec<TraceSubset>> {
    let (cf, mut env) = layout(ts, pi, delta, fix)?;
    cf.minimal_solutions(ts, &mut env, &mut Stats::default(), bound)
}
