//! Horn satisfiability as fixpoint model checking on a tree.
//!
//! Every variable (with `T` and `F` as variables `k+1` and `k+2`) gets a positive and
//! a negative branch that spell its index in binary, least significant bit first, and
//! every clause gets a `c`-marked branch spelling its three indices. The least fixpoint
//! `A` collects the literals forced by unit propagation; the formula asks that `A`
//! contains no complementary pair.

use std::fmt;

use super::{branch_tree, ceil_log2, Instance};
use crate::error::{Error, Result};
use crate::formula::{parse_formula, Formula};

pub const HORN_APS: [&str; 5] = ["pos", "neg1", "neg2", "c", "a"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HornLit {
    /// 1-based variable index.
    Var(usize),
    Top,
    Bot,
}

/// A conjunction of clauses `!l1 | !l2 | l3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HornFormula {
    pub k: usize,
    pub clauses: Vec<[HornLit; 3]>,
}

impl HornFormula {
    pub fn new(k: usize, clauses: Vec<[HornLit; 3]>) -> Result<HornFormula> {
        if k == 0 {
            return Err(Error::HornSyntax {
                line: 0,
                msg: "at least one variable is required".into(),
            });
        }
        for c in &clauses {
            for l in c {
                if let HornLit::Var(i) = l {
                    if *i == 0 || *i > k {
                        return Err(Error::HornSyntax {
                            line: 0,
                            msg: format!("variable {i} out of range 1..{k}"),
                        });
                    }
                }
            }
        }
        Ok(HornFormula { k, clauses })
    }

    /// Index of a literal's variable, with `T = k+1` and `F = k+2`.
    pub fn index(&self, l: HornLit) -> usize {
        match l {
            HornLit::Var(i) => i,
            HornLit::Top => self.k + 1,
            HornLit::Bot => self.k + 2,
        }
    }

    /// Bits per encoded index.
    pub fn bits(&self) -> usize {
        ceil_log2(self.k + 3)
    }
}

impl fmt::Display for HornLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HornLit::Var(i) => write!(f, "{i}"),
            HornLit::Top => write!(f, "T"),
            HornLit::Bot => write!(f, "F"),
        }
    }
}

/// The input file format: an optional `k N` line, then one clause per line.
impl fmt::Display for HornFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "k {}", self.k)?;
        for [a, b, c] in &self.clauses {
            writeln!(f, "{a} {b} {c}")?;
        }
        Ok(())
    }
}

/// Parses clause lines `l1 l2 l3` (tokens `1..k`, `T`, `F`) meaning `!l1 | !l2 | l3`.
/// Without a `k N` line, `k` is the largest variable mentioned (at least 1).
pub fn parse_horn(text: &str) -> Result<HornFormula> {
    let mut k = None;
    let mut clauses = Vec::new();
    let mut max_var = 0;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::HornSyntax { line: ln + 1, msg };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "k" {
            if toks.len() != 2 || k.is_some() {
                return Err(err("expected a single `k N` line".into()));
            }
            let n: usize = toks[1]
                .parse()
                .map_err(|_| err(format!("bad variable count `{}`", toks[1])))?;
            k = Some(n);
            continue;
        }
        if toks.len() != 3 {
            return Err(err(format!("expected 3 literals, found {}", toks.len())));
        }
        let mut c = [HornLit::Top; 3];
        for (slot, t) in c.iter_mut().zip(&toks) {
            *slot = match *t {
                "T" => HornLit::Top,
                "F" => HornLit::Bot,
                t => {
                    let i: usize = t
                        .parse()
                        .ok()
                        .filter(|&i| i > 0)
                        .ok_or_else(|| err(format!("bad literal `{t}`")))?;
                    max_var = max_var.max(i);
                    HornLit::Var(i)
                }
            };
        }
        clauses.push(c);
    }
    let k = k.unwrap_or(max_var.max(1));
    if max_var > k {
        return Err(Error::HornSyntax {
            line: 0,
            msg: format!("variable {max_var} exceeds declared k = {k}"),
        });
    }
    HornFormula::new(k, clauses)
}

/// Satisfiability by computing the least model from `T`.
pub fn horn_oracle(h: &HornFormula) -> bool {
    let mut truth = vec![false; h.k + 3];
    truth[h.index(HornLit::Top)] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for &[a, b, c] in &h.clauses {
            if truth[h.index(a)] && truth[h.index(b)] && !truth[h.index(c)] {
                truth[h.index(c)] = true;
                changed = true;
            }
        }
    }
    !truth[h.index(HornLit::Bot)]
}

const FIXPOINT: &str = "\
fix A {
  forall p in ALL, q in A, r in A, s in ALL :
    (X c@p & !X c@q & !X c@r & !X c@s)
    & ((G(pos@q <-> neg1@p) & G(pos@r <-> neg2@p) & G(pos@s <-> pos@p))
     | (G(pos@q <-> neg1@p) & G(neg1@r <-> pos@p) & G(neg1@s <-> neg2@p))
     | (G(pos@q <-> neg2@p) & G(neg1@r <-> pos@p) & G(neg1@s <-> neg1@p)))
    -> s in A ;
  forall p in ALL : X a@p -> p in A
}.";

/// The formula of the reduction; it is the same for every Horn formula.
///
/// With `literal_body` the consistency check is `!G(pos@p <-> neg1@q)`, which is false
/// as soon as `A` holds a negative and a positive trace (both sides are then constantly
/// false), so such instances are never satisfied. The default additionally requires `p`
/// to be a positive trace.
pub fn horn_formula(literal_body: bool) -> Formula {
    let body = if literal_body {
        "!G(pos@p <-> neg1@q)"
    } else {
        "!(F pos@p & G(pos@p <-> neg1@q))"
    };
    let text = format!("{FIXPOINT}\nforall p in A. forall q in A.\n  {body}\n");
    parse_formula(&text)
        .expect("reduction formula parses")
        .with_alphabet(HORN_APS.iter().map(|s| s.to_string()))
}

pub fn horn_to_instance(h: &HornFormula) -> Instance {
    horn_to_instance_with(h, false)
}

pub fn horn_to_instance_with(h: &HornFormula, literal_body: bool) -> Instance {
    let bits = h.bits();
    let bit = |idx: usize, j: usize| (idx >> j) & 1 == 1;
    let mut branches = Vec::new();
    for i in 1..=h.k + 2 {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for j in 0..bits {
            let mut p = Vec::new();
            let mut n = Vec::new();
            if bit(i, j) {
                p.push("pos");
                n.push("neg1");
            }
            if j == 0 && i == h.k + 1 {
                p.push("a");
            }
            if j == 0 && i == h.k + 2 {
                n.push("a");
            }
            pos.push(p);
            neg.push(n);
        }
        branches.push((format!("x{i}"), pos));
        branches.push((format!("nx{i}"), neg));
    }
    for (ci, &[a, b, c]) in h.clauses.iter().enumerate() {
        let (d, e, f) = (h.index(a), h.index(b), h.index(c));
        let states = (0..bits)
            .map(|j| {
                let mut l = Vec::new();
                if bit(d, j) {
                    l.push("neg1");
                }
                if bit(e, j) {
                    l.push("neg2");
                }
                if bit(f, j) {
                    l.push("pos");
                }
                if j == 0 {
                    l.push("c");
                }
                l
            })
            .collect();
        branches.push((format!("c{}", ci + 1), states));
    }
    let structure = branch_tree(&HORN_APS, "s0", &branches).expect("generated structure is valid");
    let index: Vec<String> = (1..=h.k)
        .map(|i| format!("x{i}={i}"))
        .chain([format!("T={}", h.k + 1), format!("F={}", h.k + 2)])
        .collect();
    let meta = vec![
        ("kind".to_string(), "horn".to_string()),
        ("k".to_string(), h.k.to_string()),
        ("clauses".to_string(), h.clauses.len().to_string()),
        ("branch_length".to_string(), bits.to_string()),
        ("states".to_string(), structure.num_states().to_string()),
        ("index".to_string(), index.join(" ")),
        ("literal_body".to_string(), literal_body.to_string()),
    ];
    Instance {
        structure,
        formula: horn_formula(literal_body),
        meta,
    }
}
