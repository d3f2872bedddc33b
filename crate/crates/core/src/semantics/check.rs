use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::body::{CompiledBody, Env, Names, SetRef};
use super::fixpoint::{CompiledFix, SOL_BOUND};
use super::miniscope::{miniscope, MNode};
use super::stats::Stats;
use super::subset::{masks_by_cardinality, TraceSubset};
use crate::error::{Error, Result};
use crate::formula::{expand_sugar_with, Body, Formula, Quantifier, SetVar};
use crate::kripke::{extract_traces, KripkeStructure, TraceSet};

/// How fixpoint binders are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixpointMode {
    /// Iterate from the empty set to the least fixpoint.
    Iterative,
    /// Enumerate all inclusion-minimal solutions by brute force and require one of them
    /// to satisfy the rest of the formula.
    BruteForce { bound: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    /// Miniscoping, short-circuiting, memoization and semi-naive fixpoints. Disabling
    /// it evaluates the prefix literally, which is only feasible for small inputs.
    pub prune: bool,
    pub fixpoint: FixpointMode,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            prune: true,
            fixpoint: FixpointMode::Iterative,
        }
    }
}

impl CheckOptions {
    pub fn no_prune() -> Self {
        CheckOptions {
            prune: false,
            ..Default::default()
        }
    }

    pub fn brute_force() -> Self {
        CheckOptions {
            fixpoint: FixpointMode::BruteForce { bound: SOL_BOUND },
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub verdict: bool,
    pub stats: Stats,
    /// The first value computed for each fixpoint variable.
    pub fixpoint_witnesses: BTreeMap<SetVar, TraceSubset>,
    /// The traces the formula was evaluated on; witness indices refer to it.
    pub traces: TraceSet,
}

pub fn check(k: &KripkeStructure, f: &Formula) -> Result<CheckResult> {
    check_with(k, f, &CheckOptions::default())
}

pub fn check_with(k: &KripkeStructure, f: &Formula, opts: &CheckOptions) -> Result<CheckResult> {
    let ts = extract_traces(k)?;
    check_traces(&ts, f, opts)
}

/// Checks `f` against a trace set directly. Sugar is expanded first, with trace
/// equality ranging over the formula's and the trace set's propositions.
pub fn check_traces(ts: &TraceSet, f: &Formula, opts: &CheckOptions) -> Result<CheckResult> {
    if ts.is_empty() {
        return Err(Error::IllFormed("the trace set is empty".into()));
    }
    let aps: BTreeSet<String> = ts.aps().iter().cloned().collect();
    let f = expand_sugar_with(f, &aps)?;
    validate(&f)?;
    let has_so = f
        .prefix
        .iter()
        .any(|q| matches!(q, Quantifier::SoExists(_) | Quantifier::SoForall(_)));
    if has_so && ts.len() > 63 {
        return Err(Error::TooManyTraces(ts.len()));
    }
    let tree = if opts.prune {
        miniscope(&f.prefix, &f.body)
    } else {
        f.prefix
            .iter()
            .rev()
            .fold(MNode::Leaf(f.body.clone()), |acc, q| {
                MNode::Quant(q.clone(), Box::new(acc))
            })
    };
    let mut ev = Evaluator::build(ts, &tree, opts)?;
    let verdict = ev.eval(&ev.root.clone())?;
    Ok(CheckResult {
        verdict,
        stats: ev.stats,
        fixpoint_witnesses: ev.witnesses,
        traces: ts.clone(),
    })
}

/// Closedness and the absence of rebinding for a prenex, sugar-free formula.
pub fn validate(f: &Formula) -> Result<()> {
    let mut traces: BTreeSet<&str> = BTreeSet::new();
    let mut sets: BTreeSet<&str> = BTreeSet::new();
    let set_ok = |sets: &BTreeSet<&str>, x: &SetVar| {
        if x.is_all() || sets.contains(x.as_str()) {
            Ok(())
        } else {
            Err(Error::UnboundSet(x.0.clone()))
        }
    };
    for q in &f.prefix {
        match q {
            Quantifier::SoExists(x) | Quantifier::SoForall(x) => {
                if x.is_all() || !sets.insert(x.as_str()) {
                    return Err(Error::Rebinding(x.0.clone()));
                }
            }
            Quantifier::Fixpoint(fb) => {
                if fb.set.is_all() || !sets.insert(fb.set.as_str()) {
                    return Err(Error::Rebinding(fb.set.0.clone()));
                }
                for c in &fb.conjuncts {
                    if c.binders.is_empty() || c.target >= c.binders.len() {
                        return Err(Error::Fixpoint("bad target index".into()));
                    }
                    let mut local = traces.clone();
                    for (p, x) in &c.binders {
                        set_ok(&sets, x)?;
                        if !local.insert(p.as_str()) {
                            return Err(Error::Rebinding(p.0.clone()));
                        }
                    }
                    for v in c.step.trace_vars() {
                        if !local.contains(v.as_str()) {
                            return Err(Error::UnboundTrace(v.0));
                        }
                    }
                    if c.step.has_sugar() {
                        return Err(Error::IllFormed("sugar in fixpoint step".into()));
                    }
                }
            }
            Quantifier::FoExists(p, x) | Quantifier::FoForall(p, x) => {
                set_ok(&sets, x)?;
                if !traces.insert(p.as_str()) {
                    return Err(Error::Rebinding(p.0.clone()));
                }
            }
            Quantifier::FoExistsUnique(p, _) => {
                return Err(Error::IllFormed(format!("`exists! {p}` was not expanded")))
            }
        }
    }
    for v in f.body.trace_vars() {
        if !traces.contains(v.as_str()) {
            return Err(Error::UnboundTrace(v.0));
        }
    }
    for x in f.body.set_vars() {
        set_ok(&sets, &x)?;
    }
    if f.body.has_sugar() {
        return Err(Error::IllFormed("sugar in body".into()));
    }
    Ok(())
}

/// Dense table up to this many entries, hash map above.
const DENSE_LIMIT: u128 = 1 << 22;

#[derive(Clone, Debug)]
enum Memo {
    Off,
    Dense(Vec<u8>),
    Sparse(HashMap<u128, bool>),
}

#[derive(Clone, Debug)]
struct Leaf {
    body: CompiledBody,
    memo: Memo,
}

#[derive(Clone, Debug)]
enum ENode {
    Leaf(usize),
    Const(bool),
    And(Vec<ENode>),
    Or(Vec<ENode>),
    Fo {
        exists: bool,
        slot: usize,
        dom: SetRef,
        child: Box<ENode>,
    },
    So {
        exists: bool,
        slot: usize,
        child: Box<ENode>,
    },
    Fix {
        idx: usize,
        child: Box<ENode>,
    },
    Vacuous {
        exists: bool,
        set: SetRef,
        child: Box<ENode>,
    },
}

struct Evaluator<'a> {
    ts: &'a TraceSet,
    root: ENode,
    leaves: Vec<Leaf>,
    fixes: Vec<(SetVar, CompiledFix)>,
    env: Env,
    stats: Stats,
    witnesses: BTreeMap<SetVar, TraceSubset>,
    prune: bool,
    mode: FixpointMode,
    scratch: Vec<bool>,
}

struct Builder<'a> {
    traces: HashMap<String, usize>,
    sets: HashMap<String, usize>,
    aps: &'a [String],
    next_trace: usize,
    next_set: usize,
    leaves: Vec<Leaf>,
    fixes: Vec<(SetVar, CompiledFix)>,
    n: usize,
    memo: bool,
}

impl Builder<'_> {
    fn names(&self) -> Names<'_> {
        Names {
            traces: &self.traces,
            sets: &self.sets,
            aps: self.aps,
        }
    }

    fn set_ref(&self, x: &SetVar) -> Result<SetRef> {
        self.names().set_ref(&x.0)
    }

    fn leaf(&mut self, b: &Body) -> Result<ENode> {
        match b {
            Body::True => return Ok(ENode::Const(true)),
            Body::False => return Ok(ENode::Const(false)),
            _ => {}
        }
        let body = CompiledBody::compile(b, &self.names())?;
        let memo = if !self.memo || body.reads_sets {
            Memo::Off
        } else {
            match (self.n as u128).checked_pow(body.slots.len() as u32) {
                Some(size) if size <= DENSE_LIMIT => Memo::Dense(vec![0; size as usize]),
                Some(_) => Memo::Sparse(HashMap::new()),
                None => Memo::Off,
            }
        };
        self.leaves.push(Leaf { body, memo });
        Ok(ENode::Leaf(self.leaves.len() - 1))
    }

    fn build(&mut self, node: &MNode) -> Result<ENode> {
        Ok(match node {
            MNode::Leaf(b) => self.leaf(b)?,
            MNode::And(cs) | MNode::Or(cs) => {
                let mut kids = cs
                    .iter()
                    .map(|c| self.build(c))
                    .collect::<Result<Vec<_>>>()?;
                if self.memo {
                    kids.sort_by(|a, b| cost(a).total_cmp(&cost(b)));
                }
                if matches!(node, MNode::And(_)) {
                    ENode::And(kids)
                } else {
                    ENode::Or(kids)
                }
            }
            MNode::Vacuous { exists, set, child } => ENode::Vacuous {
                exists: *exists,
                set: self.set_ref(set)?,
                child: Box::new(self.build(child)?),
            },
            MNode::Quant(q, child) => match q {
                Quantifier::FoExists(p, x) | Quantifier::FoForall(p, x) => {
                    let dom = self.set_ref(x)?;
                    let slot = self.next_trace;
                    self.next_trace += 1;
                    self.traces.insert(p.0.clone(), slot);
                    ENode::Fo {
                        exists: matches!(q, Quantifier::FoExists(..)),
                        slot,
                        dom,
                        child: Box::new(self.build(child)?),
                    }
                }
                Quantifier::SoExists(x) | Quantifier::SoForall(x) => {
                    // quantifiers may be duplicated by miniscoping, so slots are
                    // allocated per occurrence
                    let slot = self.next_set;
                    self.next_set += 1;
                    self.sets.insert(x.0.clone(), slot);
                    ENode::So {
                        exists: matches!(q, Quantifier::SoExists(_)),
                        slot,
                        child: Box::new(self.build(child)?),
                    }
                }
                Quantifier::Fixpoint(fb) => {
                    let slot = self.next_set;
                    self.next_set += 1;
                    self.sets.insert(fb.set.0.clone(), slot);
                    let cf = CompiledFix::compile(
                        fb,
                        slot,
                        &self.traces,
                        &self.sets,
                        self.aps,
                        &mut self.next_trace,
                    )?;
                    self.fixes.push((fb.set.clone(), cf));
                    ENode::Fix {
                        idx: self.fixes.len() - 1,
                        child: Box::new(self.build(child)?),
                    }
                }
                Quantifier::FoExistsUnique(p, _) => {
                    return Err(Error::IllFormed(format!("`exists! {p}` was not expanded")))
                }
            },
        })
    }
}

/// Rough evaluation cost, used to try cheap conjuncts/disjuncts first.
fn cost(n: &ENode) -> f64 {
    match n {
        ENode::Const(_) => 0.0,
        ENode::Leaf(_) => 1.0,
        ENode::And(cs) | ENode::Or(cs) => cs.iter().map(cost).sum(),
        ENode::Vacuous { child, .. } => 1.0 + cost(child),
        ENode::Fo { child, .. } => 8.0 * (1.0 + cost(child)),
        ENode::Fix { child, .. } => 64.0 + cost(child),
        ENode::So { child, .. } => 1e6 * (1.0 + cost(child)),
    }
}

impl<'a> Evaluator<'a> {
    fn build(ts: &'a TraceSet, tree: &MNode, opts: &CheckOptions) -> Result<Self> {
        let mut b = Builder {
            traces: HashMap::new(),
            sets: HashMap::new(),
            aps: ts.aps(),
            next_trace: 0,
            next_set: 0,
            leaves: Vec::new(),
            fixes: Vec::new(),
            n: ts.len(),
            memo: opts.prune,
        };
        let root = b.build(tree)?;
        let env = Env::new(ts.len(), b.next_trace, b.next_set);
        Ok(Evaluator {
            ts,
            root,
            leaves: b.leaves,
            fixes: b.fixes,
            env,
            stats: Stats::default(),
            witnesses: BTreeMap::new(),
            prune: opts.prune,
            mode: opts.fixpoint,
            scratch: Vec::new(),
        })
    }

    fn leaf(&mut self, i: usize) -> bool {
        let n = self.ts.len() as u128;
        let leaf = &mut self.leaves[i];
        let key = || {
            leaf.body
                .slots
                .iter()
                .fold(0u128, |acc, &s| acc * n + self.env.traces[s] as u128)
        };
        match &leaf.memo {
            Memo::Dense(t) => {
                let k = key() as usize;
                if t[k] != 0 {
                    self.stats.memo_hits += 1;
                    return t[k] == 2;
                }
            }
            Memo::Sparse(m) => {
                if let Some(&v) = m.get(&key()) {
                    self.stats.memo_hits += 1;
                    return v;
                }
            }
            Memo::Off => {}
        }
        self.stats.body_evaluations += 1;
        let v = leaf.body.eval(self.ts, &self.env, 0, &mut self.scratch);
        let k = key();
        match &mut leaf.memo {
            Memo::Dense(t) => t[k as usize] = if v { 2 } else { 1 },
            Memo::Sparse(m) => {
                m.insert(k, v);
            }
            Memo::Off => {}
        }
        v
    }

    /// Evaluates `node`; without pruning, every branch is visited.
    fn eval(&mut self, node: &ENode) -> Result<bool> {
        Ok(match node {
            ENode::Const(c) => *c,
            ENode::Leaf(i) => self.leaf(*i),
            ENode::And(cs) => {
                let mut acc = true;
                for c in cs {
                    acc &= self.eval(c)?;
                    if !acc && self.prune {
                        break;
                    }
                }
                acc
            }
            ENode::Or(cs) => {
                let mut acc = false;
                for c in cs {
                    acc |= self.eval(c)?;
                    if acc && self.prune {
                        break;
                    }
                }
                acc
            }
            ENode::Vacuous { exists, set, child } => {
                let nonempty = !self.env.set(*set).is_empty();
                match (exists, nonempty) {
                    (true, false) => false,
                    (false, false) => true,
                    _ => self.eval(child)?,
                }
            }
            ENode::Fo {
                exists,
                slot,
                dom,
                child,
            } => {
                let mut acc = !*exists;
                let mut t = self.env.set(*dom).next_from(0);
                while let Some(i) = t {
                    self.env.traces[*slot] = i;
                    let v = self.eval(child)?;
                    if *exists {
                        acc |= v;
                    } else {
                        acc &= v;
                    }
                    if acc == *exists && self.prune {
                        break;
                    }
                    t = self.env.set(*dom).next_from(i + 1);
                }
                acc
            }
            ENode::So {
                exists,
                slot,
                child,
            } => {
                let n = self.ts.len();
                let mut acc = !*exists;
                for mask in masks_by_cardinality(n) {
                    self.stats.subsets_enumerated += 1;
                    self.env.sets[*slot] = TraceSubset::from_mask(n, mask);
                    let v = self.eval(child)?;
                    if *exists {
                        acc |= v;
                    } else {
                        acc &= v;
                    }
                    if acc == *exists && self.prune {
                        break;
                    }
                }
                acc
            }
            ENode::Fix { idx, child } => {
                let (name, cf) = &self.fixes[*idx];
                let (name, slot) = (name.clone(), cf.set_slot);
                match self.mode {
                    FixpointMode::Iterative => {
                        let (a, _) = self.fixes[*idx].1.least(
                            self.ts,
                            &mut self.env,
                            &mut self.stats,
                            self.prune,
                        );
                        self.witnesses.entry(name).or_insert_with(|| a.clone());
                        self.env.sets[slot] = a;
                        self.eval(child)?
                    }
                    FixpointMode::BruteForce { bound } => {
                        let sols = self.fixes[*idx].1.minimal_solutions(
                            self.ts,
                            &mut self.env,
                            &mut self.stats,
                            bound,
                        )?;
                        let mut acc = false;
                        for a in sols {
                            self.witnesses.entry(name.clone()).or_insert_with(|| a.clone());
                            self.env.sets[slot] = a;
                            acc |= self.eval(child)?;
                            if acc && self.prune {
                                break;
                            }
                        }
                        acc
                    }
                }
            }
        })
    }
}
