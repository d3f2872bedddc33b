//! QBF validity as second-order model checking on a tree.
//!
//! Every variable and every operator occurrence of the matrix gets an index `N`; the
//! variables come first, in quantifier order, the operators follow in postorder. Each
//! has a few branches carrying `pos`/`neg` at position `N` and, for operators, the
//! expected values of the operands (`epos`, `epos'`, `eneg`, `eneg'`) at the operands'
//! positions. One `q`-marked branch per quantifier block marks that block's variable
//! positions with `v`.
//!
//! The formula quantifies a set `X_i` per block that picks one literal per variable of
//! the block, then a set `Z` closed under the operand justifications, which thereby
//! evaluates the matrix.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{branch_tree, Instance};
use crate::error::{Error, Result};
use crate::formula::{desugar_qformula, prenex, Body, Formula, QFormula, Quantifier, SetVar};

pub const QBF_APS: [&str; 9] = ["q", "v", "pos", "neg", "eneg", "eneg'", "epos", "epos'", "f"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QbfExpr {
    Var(u32),
    Not(Box<QbfExpr>),
    And(Box<QbfExpr>, Box<QbfExpr>),
    Or(Box<QbfExpr>, Box<QbfExpr>),
}

impl QbfExpr {
    pub fn not(e: QbfExpr) -> QbfExpr {
        QbfExpr::Not(Box::new(e))
    }
    pub fn and(l: QbfExpr, r: QbfExpr) -> QbfExpr {
        QbfExpr::And(Box::new(l), Box::new(r))
    }
    pub fn or(l: QbfExpr, r: QbfExpr) -> QbfExpr {
        QbfExpr::Or(Box::new(l), Box::new(r))
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let QbfExpr::Var(x) = e {
                out.insert(*x);
            }
        });
        out
    }

    /// Number of operator occurrences.
    pub fn operators(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |e| {
            if !matches!(e, QbfExpr::Var(_)) {
                n += 1;
            }
        });
        n
    }

    fn visit(&self, f: &mut impl FnMut(&QbfExpr)) {
        f(self);
        match self {
            QbfExpr::Var(_) => {}
            QbfExpr::Not(a) => a.visit(f),
            QbfExpr::And(a, b) | QbfExpr::Or(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    pub fn eval(&self, val: &BTreeMap<u32, bool>) -> bool {
        match self {
            QbfExpr::Var(x) => val[x],
            QbfExpr::Not(a) => !a.eval(val),
            QbfExpr::And(a, b) => a.eval(val) && b.eval(val),
            QbfExpr::Or(a, b) => a.eval(val) || b.eval(val),
        }
    }
}

/// Fully parenthesized infix.
impl fmt::Display for QbfExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QbfExpr::Var(x) => write!(f, "{x}"),
            QbfExpr::Not(a) => write!(f, "!{a}"),
            QbfExpr::And(a, b) => write!(f, "({a} & {b})"),
            QbfExpr::Or(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub exists: bool,
    pub vars: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QbfFormula {
    pub blocks: Vec<Block>,
    pub matrix: QbfExpr,
}

impl QbfFormula {
    /// Checks that blocks are nonempty and alternate, that no variable is bound twice
    /// and that the matrix is closed.
    pub fn new(blocks: Vec<Block>, matrix: QbfExpr) -> Result<QbfFormula> {
        if blocks.is_empty() {
            return Err(Error::QbfInvalid("no quantifier block".into()));
        }
        let mut bound = BTreeSet::new();
        for (i, b) in blocks.iter().enumerate() {
            if b.vars.is_empty() {
                return Err(Error::QbfInvalid(format!("block {} is empty", i + 1)));
            }
            if i > 0 && blocks[i - 1].exists == b.exists {
                return Err(Error::QbfInvalid(format!(
                    "blocks {} and {} do not alternate",
                    i,
                    i + 1
                )));
            }
            for &x in &b.vars {
                if !bound.insert(x) {
                    return Err(Error::QbfInvalid(format!("variable {x} is bound twice")));
                }
            }
        }
        if let Some(x) = matrix.vars().into_iter().find(|x| !bound.contains(x)) {
            return Err(Error::QbfInvalid(format!("variable {x} is not bound")));
        }
        Ok(QbfFormula { blocks, matrix })
    }

    /// Number of quantifier alternations.
    pub fn k(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.blocks.iter().map(|b| b.vars.len()).sum()
    }
}

impl fmt::Display for QbfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            write!(f, "{}", if b.exists { "e" } else { "a" })?;
            for x in &b.vars {
                write!(f, " {x}")?;
            }
            writeln!(f, " 0")?;
        }
        writeln!(f, "{}", self.matrix)
    }
}

/// Prefix lines `a 1 2 0` / `e 3 0`, then the matrix over `&`, `|`, `!`, parentheses
/// and variable numbers (it may span several lines).
pub fn parse_qbf(text: &str) -> Result<QbfFormula> {
    let mut blocks = Vec::new();
    let mut matrix = String::new();
    let mut matrix_line = 0;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::QbfSyntax { line: ln + 1, msg };
        let mut toks = line.split_whitespace();
        let head = toks.next().unwrap();
        if (head == "a" || head == "e") && matrix.is_empty() {
            let mut vars = Vec::new();
            let mut closed = false;
            for t in toks {
                if closed {
                    return Err(err("tokens after terminating 0".into()));
                }
                let x: u32 = t.parse().map_err(|_| err(format!("bad variable `{t}`")))?;
                if x == 0 {
                    closed = true;
                } else {
                    vars.push(x);
                }
            }
            blocks.push(Block {
                exists: head == "e",
                vars,
            });
        } else {
            if matrix.is_empty() {
                matrix_line = ln + 1;
            }
            matrix.push_str(line);
            matrix.push(' ');
        }
    }
    if matrix.trim().is_empty() {
        return Err(Error::QbfSyntax {
            line: 0,
            msg: "missing matrix".into(),
        });
    }
    let e = MatrixParser::new(&matrix, matrix_line)?.parse()?;
    QbfFormula::new(blocks, e)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(u32),
    And,
    Or,
    Not,
    LParen,
    RParen,
}

struct MatrixParser {
    toks: Vec<Tok>,
    pos: usize,
    line: usize,
}

impl MatrixParser {
    fn new(text: &str, line: usize) -> Result<Self> {
        let mut toks = Vec::new();
        let mut chars = text.chars().peekable();
        while let Some(&c) = chars.peek() {
            match c {
                _ if c.is_whitespace() => {
                    chars.next();
                }
                '&' | '|' | '!' | '(' | ')' => {
                    chars.next();
                    toks.push(match c {
                        '&' => Tok::And,
                        '|' => Tok::Or,
                        '!' => Tok::Not,
                        '(' => Tok::LParen,
                        _ => Tok::RParen,
                    });
                }
                _ if c.is_ascii_digit() => {
                    let mut n = String::new();
                    while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                        n.push(d);
                        chars.next();
                    }
                    let x = n.parse().map_err(|_| Error::QbfSyntax {
                        line,
                        msg: format!("bad variable `{n}`"),
                    })?;
                    toks.push(Tok::Num(x));
                }
                _ => {
                    return Err(Error::QbfSyntax {
                        line,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            }
        }
        Ok(MatrixParser { toks, pos: 0, line })
    }

    fn err(&self, msg: &str) -> Error {
        Error::QbfSyntax {
            line: self.line,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn parse(mut self) -> Result<QbfExpr> {
        let e = self.or()?;
        if self.pos != self.toks.len() {
            return Err(self.err("trailing input in matrix"));
        }
        Ok(e)
    }

    fn or(&mut self) -> Result<QbfExpr> {
        let mut e = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            e = QbfExpr::or(e, self.and()?);
        }
        Ok(e)
    }

    fn and(&mut self) -> Result<QbfExpr> {
        let mut e = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            e = QbfExpr::and(e, self.unary()?);
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<QbfExpr> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(QbfExpr::not(self.unary()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.or()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(Tok::Num(x)) if x > 0 => {
                self.pos += 1;
                Ok(QbfExpr::Var(x))
            }
            _ => Err(self.err("expected a variable, `!` or `(`")),
        }
    }
}

/// Validity by enumerating assignments block by block.
pub fn qbf_oracle(y: &QbfFormula) -> bool {
    let order: Vec<(u32, bool)> = y
        .blocks
        .iter()
        .flat_map(|b| b.vars.iter().map(move |&x| (x, b.exists)))
        .collect();
    fn go(order: &[(u32, bool)], val: &mut BTreeMap<u32, bool>, e: &QbfExpr) -> bool {
        let Some((&(x, exists), rest)) = order.split_first() else {
            return e.eval(val);
        };
        let mut results = [false, true].into_iter().map(|b| {
            val.insert(x, b);
            go(rest, val, e)
        });
        if exists {
            results.any(|r| r)
        } else {
            results.all(|r| r)
        }
    }
    go(&order, &mut BTreeMap::new(), &y.matrix)
}

/// Variants of the generated formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QbfOptions {
    /// Scope `exists!` over the whole implication instead of only its conclusion.
    pub literal_unique: bool,
    /// Restrict every `X_i` to its block's `q` trace plus literals of the block's
    /// variables, and require the `q` trace.
    pub restrict: bool,
}

impl Default for QbfOptions {
    fn default() -> Self {
        QbfOptions {
            literal_unique: false,
            restrict: true,
        }
    }
}

pub fn qbf_to_instance(y: &QbfFormula) -> Result<Instance> {
    qbf_to_instance_with(y, QbfOptions::default())
}

/// Structure labels: position `N` of a branch is its `N`-th state below the root.
struct Layout<'a> {
    len: usize,
    branches: Vec<(String, Vec<Vec<&'a str>>)>,
    index: Vec<(usize, String)>,
}

impl<'a> Layout<'a> {
    fn branch(&mut self, name: String, marks: &[(usize, &'a str)]) -> usize {
        let mut states = vec![Vec::new(); self.len];
        for &(n, p) in marks {
            states[n - 1].push(p);
        }
        self.branches.push((name, states));
        self.branches.len() - 1
    }

    /// Adds the branches of `e` (operands first) and returns its index and branches.
    fn expr(&mut self, e: &QbfExpr, vars: &BTreeMap<u32, usize>, next: &mut usize) -> (usize, Vec<usize>) {
        let (n, bs) = match e {
            QbfExpr::Var(x) => return (vars[x], vec![]),
            QbfExpr::Not(a) => {
                let (na, _) = self.expr(a, vars, next);
                let n = *next;
                *next += 1;
                let b1 = self.branch(format!("e{n}a"), &[(n, "pos"), (na, "eneg")]);
                let b2 = self.branch(format!("e{n}b"), &[(n, "neg"), (na, "epos")]);
                (n, vec![b1, b2])
            }
            QbfExpr::And(a, b) | QbfExpr::Or(a, b) => {
                let (na, _) = self.expr(a, vars, next);
                let (nb, _) = self.expr(b, vars, next);
                let n = *next;
                *next += 1;
                let marks: [Vec<(usize, &str)>; 3] = if matches!(e, QbfExpr::And(..)) {
                    [
                        vec![(n, "pos"), (na, "epos"), (nb, "epos'")],
                        vec![(n, "neg"), (na, "eneg")],
                        vec![(n, "neg"), (nb, "eneg")],
                    ]
                } else {
                    [
                        vec![(n, "pos"), (na, "epos")],
                        vec![(n, "pos"), (nb, "epos")],
                        vec![(n, "neg"), (na, "eneg"), (nb, "eneg'")],
                    ]
                };
                let bs = marks
                    .iter()
                    .zip(["a", "b", "c"])
                    .map(|(m, s)| self.branch(format!("e{n}{s}"), m))
                    .collect();
                (n, bs)
            }
        };
        self.index.push((n, e.to_string()));
        (n, bs)
    }
}

pub fn qbf_to_instance_with(y: &QbfFormula, opts: QbfOptions) -> Result<Instance> {
    if let QbfExpr::Var(x) = y.matrix {
        return Err(Error::QbfInvalid(format!(
            "matrix is the bare variable {x}; the construction needs an outermost operator \
             (rewrite it as `({x} | {x})`)"
        )));
    }
    let nv = y.num_vars();
    let len = nv + y.matrix.operators();
    let mut layout = Layout {
        len,
        branches: Vec::new(),
        index: Vec::new(),
    };
    let mut vars = BTreeMap::new();
    for b in &y.blocks {
        for &x in &b.vars {
            let n = vars.len() + 1;
            vars.insert(x, n);
            layout.index.push((n, format!("x{x}")));
        }
    }
    for (i, b) in y.blocks.iter().enumerate() {
        let i = i + 1;
        let mut marks = vec![(i, "q")];
        marks.extend(b.vars.iter().map(|x| (vars[x], "v")));
        layout.branch(format!("q{i}"), &marks);
    }
    for b in &y.blocks {
        for x in &b.vars {
            let n = vars[x];
            layout.branch(format!("x{n}"), &[(n, "pos")]);
            layout.branch(format!("nx{n}"), &[(n, "neg")]);
        }
    }
    let mut next = nv + 1;
    let (_, top) = layout.expr(&y.matrix, &vars, &mut next);
    for b in top {
        layout.branches[b].1[0].push("f");
    }
    let structure = branch_tree(&QBF_APS, "s0", &layout.branches)?;

    let first_exists = y.blocks[0].exists;
    let formula = qbf_formula(y.k(), first_exists, opts)?;
    layout.index.sort();
    let index: Vec<String> = layout.index.iter().map(|(n, e)| format!("{n}={e}")).collect();
    let meta = vec![
        ("kind".to_string(), "qbf".to_string()),
        ("k".to_string(), y.k().to_string()),
        (
            "first".to_string(),
            if first_exists { "exists" } else { "forall" }.to_string(),
        ),
        ("variables".to_string(), nv.to_string()),
        ("operators".to_string(), y.matrix.operators().to_string()),
        ("branch_length".to_string(), len.to_string()),
        ("branches".to_string(), layout.branches.len().to_string()),
        ("states".to_string(), structure.num_states().to_string()),
        ("index".to_string(), index.join(" ")),
        ("literal_unique".to_string(), opts.literal_unique.to_string()),
        ("restrict".to_string(), opts.restrict.to_string()),
    ];
    Ok(Instance {
        structure,
        formula,
        meta,
    })
}

fn at(prop: &str, t: &str) -> Body {
    Body::atom(prop, t)
}

fn lit(t: &str) -> Body {
    Body::or(at("pos", t), at("neg", t))
}

fn q(b: Body) -> QFormula {
    QFormula::Body(b)
}

/// Quantifier `exists` or `forall` over a set, and the matching connective.
fn so(exists: bool, x: &str, body: QFormula, rest: QFormula) -> QFormula {
    let set = SetVar::new(x);
    if exists {
        QFormula::quant(Quantifier::SoExists(set), QFormula::and(body, rest))
    } else {
        QFormula::quant(Quantifier::SoForall(set), QFormula::implies(body, rest))
    }
}

/// The formula of the reduction for `k` alternations; block `i` (1-based) is
/// existential iff `first_exists` and `i` is odd, or not `first_exists` and `i` even.
pub fn qbf_formula(k: usize, first_exists: bool, opts: QbfOptions) -> Result<Formula> {
    let block_exists = |i: usize| first_exists == (i % 2 == 1);
    let sets: Vec<String> = (1..=k + 1).map(|i| format!("X{i}")).collect();

    // the last set `Z` evaluates the matrix
    let z = "Z";
    let line1 = sets.iter().enumerate().rev().fold(
        q(Body::and_all(
            (1..=k + 1).map(|j| Body::member(format!("z{j}"), z)),
        )),
        |acc, (j, x)| QFormula::forall(&format!("z{}", j + 1), x, acc),
    );
    let line2 = QFormula::exists("g", z, q(Body::eventually(at("f", "g"))));
    let line34 = QFormula::forall(
        "h",
        z,
        QFormula::exists(
            "h1",
            z,
            QFormula::exists(
                "h2",
                z,
                q(Body::globally(Body::and_all([
                    Body::iff(at("epos", "h"), at("pos", "h1")),
                    Body::iff(at("eneg", "h"), at("neg", "h1")),
                    Body::iff(at("epos'", "h"), at("pos", "h2")),
                    Body::iff(at("eneg'", "h"), at("neg", "h2")),
                ]))),
            ),
        ),
    );
    let line5 = QFormula::forall(
        "m",
        z,
        q(Body::implies(
            Body::globally(Body::and(
                Body::not(at("eneg", "m")),
                Body::not(at("epos", "m")),
            )),
            Body::or_all(sets.iter().map(|x| Body::member("m", x.as_str()))),
        )),
    );
    let result = QFormula::exists(
        "n",
        z,
        q(Body::and(
            Body::eventually(at("f", "n")),
            Body::eventually(at("pos", "n")),
        )),
    );
    let constraints = QFormula::and_all([line1, line2, line34, line5]);
    let mut phi = so(block_exists(k + 1), z, constraints, result);

    for i in (1..=k + 1).rev() {
        let x = sets[i - 1].as_str();
        let (p, p1, p2) = (format!("a{i}"), format!("b{i}"), format!("c{i}"));
        let ante = Body::and_all([
            Body::next_n(i, at("q", &p1)),
            Body::globally(Body::and_all([
                Body::not(at("epos", &p)),
                Body::not(at("eneg", &p)),
                Body::not(at("q", &p)),
            ])),
            Body::eventually(Body::and(at("v", &p1), lit(&p))),
        ]);
        let cons = Body::globally(Body::iff(lit(&p), lit(&p2)));
        let inner = if opts.literal_unique {
            QFormula::exists_unique(&p2, x, q(Body::implies(ante, cons)))
        } else {
            QFormula::implies(q(ante), QFormula::exists_unique(&p2, x, q(cons)))
        };
        let mut body = QFormula::forall(&p, "ALL", QFormula::forall(&p1, "ALL", inner));
        if opts.restrict {
            let (w, s, t) = (format!("w{i}"), format!("s{i}"), format!("t{i}"));
            let member_ok = QFormula::forall(
                &w,
                x,
                QFormula::or(
                    q(Body::next_n(i, at("q", &w))),
                    QFormula::exists(
                        &s,
                        "ALL",
                        q(Body::and_all([
                            Body::next_n(i, at("q", &s)),
                            Body::globally(Body::and_all([
                                Body::not(at("epos", &w)),
                                Body::not(at("eneg", &w)),
                                Body::not(at("q", &w)),
                            ])),
                            Body::eventually(Body::and(at("v", &s), lit(&w))),
                        ])),
                    ),
                ),
            );
            let has_q = QFormula::exists(&t, x, q(Body::next_n(i, at("q", &t))));
            body = QFormula::and_all([body, member_ok, has_q]);
        }
        phi = so(block_exists(i), x, body, phi);
    }

    let alphabet: BTreeSet<String> = QBF_APS.iter().map(|s| s.to_string()).collect();
    let plain = desugar_qformula(&phi, &alphabet);
    let mut f = prenex(&plain)?;
    f.alphabet = alphabet;
    Ok(f)
}
