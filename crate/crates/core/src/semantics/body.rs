//! Evaluation of quantifier-free bodies on eventually constant traces.
//!
//! With `h` the largest canonical length among the traces a body reads, every trace is
//! constant from position `h - 1` on, so the joint word is too. Values at that position
//! follow from the constant-word base cases (`X p ≡ p`, `p U q ≡ q`, `F p ≡ p`,
//! `G p ≡ p`) and earlier positions are filled backwards.

use std::collections::HashMap;

use super::subset::TraceSubset;
use crate::error::{Error, Result};
use crate::formula::{Body, ALL};
use crate::kripke::TraceSet;

/// Where a set reference points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum SetRef {
    All,
    Slot(usize),
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Const(bool),
    /// `bit == None`: the proposition does not occur in the structure.
    Atom { slot: usize, bit: Option<u32> },
    InSet { slot: usize, set: SetRef },
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Iff(usize, usize),
    Next(usize),
    Until(usize, usize),
    Eventually(usize),
    Globally(usize),
}

/// Variable environment shared by the evaluators: trace slots hold trace indices, set
/// slots hold subsets.
#[derive(Clone, Debug)]
pub(crate) struct Env {
    pub traces: Vec<usize>,
    pub sets: Vec<TraceSubset>,
    pub all: TraceSubset,
}

pub(crate) const UNSET: usize = usize::MAX;

impl Env {
    pub fn new(n_traces: usize, trace_slots: usize, set_slots: usize) -> Env {
        Env {
            traces: vec![UNSET; trace_slots],
            sets: vec![TraceSubset::empty(n_traces); set_slots],
            all: TraceSubset::full(n_traces),
        }
    }

    #[inline]
    pub fn set(&self, r: SetRef) -> &TraceSubset {
        match r {
            SetRef::All => &self.all,
            SetRef::Slot(s) => &self.sets[s],
        }
    }
}

/// Name resolution for compilation.
pub(crate) struct Names<'a> {
    pub traces: &'a HashMap<String, usize>,
    pub sets: &'a HashMap<String, usize>,
    pub aps: &'a [String],
}

impl Names<'_> {
    pub fn set_ref(&self, name: &str) -> Result<SetRef> {
        if name == ALL {
            return Ok(SetRef::All);
        }
        self.sets
            .get(name)
            .map(|&s| SetRef::Slot(s))
            .ok_or_else(|| Error::UnmappedSet(name.to_string()))
    }

    pub fn trace_slot(&self, name: &str) -> Result<usize> {
        self.traces
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnmappedTrace(name.to_string()))
    }
}

/// A body flattened to postorder, ready for repeated evaluation.
#[derive(Clone, Debug)]
pub(crate) struct CompiledBody {
    ops: Vec<Op>,
    /// Trace slots read by the body, sorted and deduplicated.
    pub slots: Vec<usize>,
    pub reads_sets: bool,
    temporal: bool,
}

impl CompiledBody {
    pub fn compile(b: &Body, names: &Names) -> Result<CompiledBody> {
        let mut c = CompiledBody {
            ops: Vec::with_capacity(b.size()),
            slots: Vec::new(),
            reads_sets: false,
            temporal: false,
        };
        c.emit(b, names)?;
        c.slots.sort_unstable();
        c.slots.dedup();
        Ok(c)
    }

    fn emit(&mut self, b: &Body, names: &Names) -> Result<usize> {
        let op = match b {
            Body::True => Op::Const(true),
            Body::False => Op::Const(false),
            Body::Atom { prop, trace } => {
                let slot = names.trace_slot(&trace.0)?;
                self.slots.push(slot);
                let bit = names.aps.iter().position(|a| a == prop).map(|i| i as u32);
                Op::Atom { slot, bit }
            }
            Body::InSet { trace, set } => {
                let slot = names.trace_slot(&trace.0)?;
                self.slots.push(slot);
                self.reads_sets = true;
                Op::InSet {
                    slot,
                    set: names.set_ref(&set.0)?,
                }
            }
            Body::Member { .. } | Body::TraceEq(..) => {
                return Err(Error::IllFormed(format!(
                    "sugar `{b}` must be expanded before evaluation"
                )))
            }
            Body::Not(x) => Op::Not(self.emit(x, names)?),
            Body::Next(x) => Op::Next(self.emit(x, names)?),
            Body::Eventually(x) => Op::Eventually(self.emit(x, names)?),
            Body::Globally(x) => Op::Globally(self.emit(x, names)?),
            Body::And(l, r) => {
                let l = self.emit(l, names)?;
                Op::And(l, self.emit(r, names)?)
            }
            Body::Or(l, r) => {
                let l = self.emit(l, names)?;
                Op::Or(l, self.emit(r, names)?)
            }
            Body::Implies(l, r) => {
                let l = self.emit(l, names)?;
                Op::Implies(l, self.emit(r, names)?)
            }
            Body::Iff(l, r) => {
                let l = self.emit(l, names)?;
                Op::Iff(l, self.emit(r, names)?)
            }
            Body::Until(l, r) => {
                let l = self.emit(l, names)?;
                Op::Until(l, self.emit(r, names)?)
            }
        };
        if b.is_temporal() {
            self.temporal = true;
        }
        self.ops.push(op);
        Ok(self.ops.len() - 1)
    }

    /// Value at `pos`; all slots in `self.slots` must be assigned in `env`.
    pub fn eval(&self, ts: &TraceSet, env: &Env, pos: usize, scratch: &mut Vec<bool>) -> bool {
        let h = self
            .slots
            .iter()
            .map(|&s| ts.get(env.traces[s]).len())
            .max()
            .unwrap_or(1);
        let last = h - 1;
        if !self.temporal || pos >= last {
            return self.eval_at_single(ts, env, pos.min(last), scratch);
        }
        let width = last - pos + 1;
        let cell = |i: usize, j: usize| i * width + (j - pos);
        scratch.clear();
        scratch.resize(self.ops.len() * width, false);
        for (i, op) in self.ops.iter().enumerate() {
            for j in (pos..=last).rev() {
                let v = match *op {
                    Op::Const(c) => c,
                    Op::Atom { slot, bit } => atom(ts, env, slot, bit, j),
                    Op::InSet { slot, set } => env.set(set).contains(env.traces[slot]),
                    Op::Not(a) => !scratch[cell(a, j)],
                    Op::And(a, b) => scratch[cell(a, j)] && scratch[cell(b, j)],
                    Op::Or(a, b) => scratch[cell(a, j)] || scratch[cell(b, j)],
                    Op::Implies(a, b) => !scratch[cell(a, j)] || scratch[cell(b, j)],
                    Op::Iff(a, b) => scratch[cell(a, j)] == scratch[cell(b, j)],
                    Op::Next(a) => scratch[cell(a, (j + 1).min(last))],
                    Op::Until(a, b) => {
                        scratch[cell(b, j)]
                            || (j < last && scratch[cell(a, j)] && scratch[cell(i, j + 1)])
                    }
                    Op::Eventually(a) => {
                        scratch[cell(a, j)] || (j < last && scratch[cell(i, j + 1)])
                    }
                    Op::Globally(a) => {
                        scratch[cell(a, j)] && (j == last || scratch[cell(i, j + 1)])
                    }
                };
                scratch[cell(i, j)] = v;
            }
        }
        scratch[cell(self.ops.len() - 1, pos)]
    }

    /// Evaluation at a single position where no temporal operator needs later
    /// positions: either the body has none, or `pos` lies on the constant suffix.
    fn eval_at_single(&self, ts: &TraceSet, env: &Env, pos: usize, scratch: &mut Vec<bool>) -> bool {
        scratch.clear();
        scratch.resize(self.ops.len(), false);
        for (i, op) in self.ops.iter().enumerate() {
            scratch[i] = match *op {
                Op::Const(c) => c,
                Op::Atom { slot, bit } => atom(ts, env, slot, bit, pos),
                Op::InSet { slot, set } => env.set(set).contains(env.traces[slot]),
                Op::Not(a) => !scratch[a],
                Op::And(a, b) => scratch[a] && scratch[b],
                Op::Or(a, b) => scratch[a] || scratch[b],
                Op::Implies(a, b) => !scratch[a] || scratch[b],
                Op::Iff(a, b) => scratch[a] == scratch[b],
                // constant suffix: every temporal operator collapses onto its operand
                // (for `U`, onto its right operand)
                Op::Next(a) | Op::Eventually(a) | Op::Globally(a) => scratch[a],
                Op::Until(_, b) => scratch[b],
            };
        }
        scratch[self.ops.len() - 1]
    }
}

#[inline]
fn atom(ts: &TraceSet, env: &Env, slot: usize, bit: Option<u32>, pos: usize) -> bool {
    match bit {
        None => false,
        Some(b) => ts.get(env.traces[slot]).at(pos) >> b & 1 == 1,
    }
}
