use std::collections::BTreeSet;
use std::fmt;

/// Spelling of the reserved set variable that denotes every trace of the model.
pub const ALL: &str = "ALL";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TraceVar(pub String);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetVar(pub String);

impl TraceVar {
    pub fn new(name: impl Into<String>) -> Self {
        TraceVar(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl SetVar {
    pub fn new(name: impl Into<String>) -> Self {
        SetVar(name.into())
    }

    /// The set of all traces of the model.
    pub fn all() -> Self {
        SetVar(ALL.to_string())
    }

    pub fn is_all(&self) -> bool {
        self.0 == ALL
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TraceVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for SetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Quantifier-free temporal body of a formula.
///
/// `Member` and `TraceEq` are surface sugar and are removed by
/// [`expand_sugar`](crate::formula::expand_sugar). `InSet` is a native domain guard
/// produced by prenexing: it holds when the trace bound to `trace` is an element of the
/// set bound to `set`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Body {
    True,
    False,
    Atom { prop: String, trace: TraceVar },
    Not(Box<Body>),
    And(Box<Body>, Box<Body>),
    Or(Box<Body>, Box<Body>),
    Implies(Box<Body>, Box<Body>),
    Iff(Box<Body>, Box<Body>),
    Next(Box<Body>),
    Until(Box<Body>, Box<Body>),
    Eventually(Box<Body>),
    Globally(Box<Body>),
    Member { trace: TraceVar, set: SetVar },
    TraceEq(TraceVar, TraceVar),
    InSet { trace: TraceVar, set: SetVar },
}

#[allow(clippy::should_implement_trait)]
impl Body {
    pub fn atom(prop: impl Into<String>, trace: impl Into<String>) -> Body {
        Body::Atom {
            prop: prop.into(),
            trace: TraceVar::new(trace),
        }
    }

    pub fn not(b: Body) -> Body {
        Body::Not(Box::new(b))
    }
    pub fn and(l: Body, r: Body) -> Body {
        Body::And(Box::new(l), Box::new(r))
    }
    pub fn or(l: Body, r: Body) -> Body {
        Body::Or(Box::new(l), Box::new(r))
    }
    pub fn implies(l: Body, r: Body) -> Body {
        Body::Implies(Box::new(l), Box::new(r))
    }
    pub fn iff(l: Body, r: Body) -> Body {
        Body::Iff(Box::new(l), Box::new(r))
    }
    pub fn next(b: Body) -> Body {
        Body::Next(Box::new(b))
    }
    pub fn until(l: Body, r: Body) -> Body {
        Body::Until(Box::new(l), Box::new(r))
    }
    pub fn eventually(b: Body) -> Body {
        Body::Eventually(Box::new(b))
    }
    pub fn globally(b: Body) -> Body {
        Body::Globally(Box::new(b))
    }
    pub fn member(trace: impl Into<String>, set: impl Into<String>) -> Body {
        Body::Member {
            trace: TraceVar::new(trace),
            set: SetVar::new(set),
        }
    }
    pub fn trace_eq(l: impl Into<String>, r: impl Into<String>) -> Body {
        Body::TraceEq(TraceVar::new(l), TraceVar::new(r))
    }

    /// `X` applied `n` times.
    pub fn next_n(n: usize, b: Body) -> Body {
        (0..n).fold(b, |acc, _| Body::next(acc))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn and_all(items: impl IntoIterator<Item = Body>) -> Body {
        let mut it = items.into_iter();
        match it.next() {
            None => Body::True,
            Some(first) => it.fold(first, Body::and),
        }
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn or_all(items: impl IntoIterator<Item = Body>) -> Body {
        let mut it = items.into_iter();
        match it.next() {
            None => Body::False,
            Some(first) => it.fold(first, Body::or),
        }
    }

    pub fn is_temporal(&self) -> bool {
        matches!(
            self,
            Body::Next(_) | Body::Until(..) | Body::Eventually(_) | Body::Globally(_)
        )
    }

    pub fn children(&self) -> Vec<&Body> {
        match self {
            Body::True
            | Body::False
            | Body::Atom { .. }
            | Body::Member { .. }
            | Body::TraceEq(..)
            | Body::InSet { .. } => vec![],
            Body::Not(b) | Body::Next(b) | Body::Eventually(b) | Body::Globally(b) => vec![b],
            Body::And(l, r)
            | Body::Or(l, r)
            | Body::Implies(l, r)
            | Body::Iff(l, r)
            | Body::Until(l, r) => vec![l, r],
        }
    }

    /// Rebuilds the node with `f` applied to every direct child.
    pub fn map_children(&self, mut f: impl FnMut(&Body) -> Body) -> Body {
        let mut g = |b: &Body| Box::new(f(b));
        match self {
            Body::True
            | Body::False
            | Body::Atom { .. }
            | Body::Member { .. }
            | Body::TraceEq(..)
            | Body::InSet { .. } => self.clone(),
            Body::Not(b) => Body::Not(g(b)),
            Body::Next(b) => Body::Next(g(b)),
            Body::Eventually(b) => Body::Eventually(g(b)),
            Body::Globally(b) => Body::Globally(g(b)),
            Body::And(l, r) => {
                let l = g(l);
                Body::And(l, g(r))
            }
            Body::Or(l, r) => {
                let l = g(l);
                Body::Or(l, g(r))
            }
            Body::Implies(l, r) => {
                let l = g(l);
                Body::Implies(l, g(r))
            }
            Body::Iff(l, r) => {
                let l = g(l);
                Body::Iff(l, g(r))
            }
            Body::Until(l, r) => {
                let l = g(l);
                Body::Until(l, g(r))
            }
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Trace variables occurring anywhere in the body.
    pub fn trace_vars(&self) -> BTreeSet<TraceVar> {
        let mut out = BTreeSet::new();
        self.collect_trace_vars(&mut out);
        out
    }

    fn collect_trace_vars(&self, out: &mut BTreeSet<TraceVar>) {
        match self {
            Body::Atom { trace, .. } | Body::Member { trace, .. } | Body::InSet { trace, .. } => {
                out.insert(trace.clone());
            }
            Body::TraceEq(l, r) => {
                out.insert(l.clone());
                out.insert(r.clone());
            }
            _ => {
                for c in self.children() {
                    c.collect_trace_vars(out);
                }
            }
        }
    }

    /// Set variables referenced by membership nodes or guards.
    pub fn set_vars(&self) -> BTreeSet<SetVar> {
        let mut out = BTreeSet::new();
        self.collect_set_vars(&mut out);
        out
    }

    fn collect_set_vars(&self, out: &mut BTreeSet<SetVar>) {
        match self {
            Body::Member { set, .. } | Body::InSet { set, .. } => {
                out.insert(set.clone());
            }
            _ => {
                for c in self.children() {
                    c.collect_set_vars(out);
                }
            }
        }
    }

    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<String>) {
        if let Body::Atom { prop, .. } = self {
            out.insert(prop.clone());
        }
        for c in self.children() {
            c.collect_props(out);
        }
    }

    pub fn has_sugar(&self) -> bool {
        match self {
            Body::Member { .. } | Body::TraceEq(..) => true,
            _ => self.children().iter().any(|c| c.has_sugar()),
        }
    }

    /// True if a membership node sits below `X`, `U`, `F` or `G`.
    pub fn membership_under_temporal(&self) -> bool {
        fn walk(b: &Body, under: bool) -> bool {
            match b {
                Body::Member { .. } => under,
                _ => {
                    let under = under || b.is_temporal();
                    b.children().iter().any(|c| walk(c, under))
                }
            }
        }
        walk(self, false)
    }

    /// Renames trace variables according to `f`.
    pub fn rename_traces(&self, f: &impl Fn(&TraceVar) -> TraceVar) -> Body {
        match self {
            Body::Atom { prop, trace } => Body::Atom {
                prop: prop.clone(),
                trace: f(trace),
            },
            Body::Member { trace, set } => Body::Member {
                trace: f(trace),
                set: set.clone(),
            },
            Body::InSet { trace, set } => Body::InSet {
                trace: f(trace),
                set: set.clone(),
            },
            Body::TraceEq(l, r) => Body::TraceEq(f(l), f(r)),
            _ => self.map_children(|c| c.rename_traces(f)),
        }
    }

    /// Renames set variables according to `f`.
    pub fn rename_sets(&self, f: &impl Fn(&SetVar) -> SetVar) -> Body {
        match self {
            Body::Member { trace, set } => Body::Member {
                trace: trace.clone(),
                set: f(set),
            },
            Body::InSet { trace, set } => Body::InSet {
                trace: trace.clone(),
                set: f(set),
            },
            _ => self.map_children(|c| c.rename_sets(f)),
        }
    }
}

/// One implication `forall p1 in X1 ... pn in Xn : step -> p_M in X` of a fixpoint binder.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FixpointConjunct {
    pub binders: Vec<(TraceVar, SetVar)>,
    pub step: Body,
    /// Zero-based position in `binders` of the trace that gets added.
    pub target: usize,
}

impl FixpointConjunct {
    pub fn target_var(&self) -> &TraceVar {
        &self.binders[self.target].0
    }
}

/// Least-fixpoint set binder `(X, ⋎, conjuncts)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FixpointBinder {
    pub set: SetVar,
    pub conjuncts: Vec<FixpointConjunct>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    SoExists(SetVar),
    SoForall(SetVar),
    Fixpoint(FixpointBinder),
    FoExists(TraceVar, SetVar),
    FoForall(TraceVar, SetVar),
    /// `exists! p in X.` ranging over the remainder of the formula.
    FoExistsUnique(TraceVar, SetVar),
}

impl Quantifier {
    pub fn is_second_order(&self) -> bool {
        matches!(
            self,
            Quantifier::SoExists(_) | Quantifier::SoForall(_) | Quantifier::Fixpoint(_)
        )
    }

    pub fn is_first_order(&self) -> bool {
        !self.is_second_order()
    }

    pub fn bound_set(&self) -> Option<&SetVar> {
        match self {
            Quantifier::SoExists(x) | Quantifier::SoForall(x) => Some(x),
            Quantifier::Fixpoint(b) => Some(&b.set),
            _ => None,
        }
    }

    pub fn bound_trace(&self) -> Option<(&TraceVar, &SetVar)> {
        match self {
            Quantifier::FoExists(p, x)
            | Quantifier::FoForall(p, x)
            | Quantifier::FoExistsUnique(p, x) => Some((p, x)),
            _ => None,
        }
    }

    /// The quantifier with `∃` and `∀` swapped. Fixpoints and `∃!` have no dual and are
    /// returned unchanged.
    pub fn flipped(&self) -> Quantifier {
        match self {
            Quantifier::SoExists(x) => Quantifier::SoForall(x.clone()),
            Quantifier::SoForall(x) => Quantifier::SoExists(x.clone()),
            Quantifier::FoExists(p, x) => Quantifier::FoForall(p.clone(), x.clone()),
            Quantifier::FoForall(p, x) => Quantifier::FoExists(p.clone(), x.clone()),
            other => other.clone(),
        }
    }
}

/// A closed formula in prenex form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    pub prefix: Vec<Quantifier>,
    pub body: Body,
    pub alphabet: BTreeSet<String>,
}

impl Formula {
    /// Builds a formula whose alphabet is the set of propositions it mentions.
    pub fn new(prefix: Vec<Quantifier>, body: Body) -> Formula {
        let mut f = Formula {
            prefix,
            body,
            alphabet: BTreeSet::new(),
        };
        f.alphabet = f.mentioned_props();
        f
    }

    pub fn with_alphabet(mut self, alphabet: impl IntoIterator<Item = String>) -> Formula {
        self.alphabet.extend(alphabet);
        self
    }

    pub fn mentioned_props(&self) -> BTreeSet<String> {
        let mut out = self.body.props();
        for q in &self.prefix {
            if let Quantifier::Fixpoint(b) = q {
                for c in &b.conjuncts {
                    out.extend(c.step.props());
                }
            }
        }
        out
    }

    pub fn has_sugar(&self) -> bool {
        self.body.has_sugar()
            || self.prefix.iter().any(|q| match q {
                Quantifier::FoExistsUnique(..) => true,
                Quantifier::Fixpoint(b) => b.conjuncts.iter().any(|c| c.step.has_sugar()),
                _ => false,
            })
    }

    pub fn has_fixpoint(&self) -> bool {
        self.prefix
            .iter()
            .any(|q| matches!(q, Quantifier::Fixpoint(_)))
    }
}

/// A Boolean combination of quantified subformulas; the input shape of
/// [`prenex`](crate::formula::prenex).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QFormula {
    Body(Body),
    Not(Box<QFormula>),
    And(Box<QFormula>, Box<QFormula>),
    Or(Box<QFormula>, Box<QFormula>),
    Implies(Box<QFormula>, Box<QFormula>),
    Quant(Quantifier, Box<QFormula>),
}

#[allow(clippy::should_implement_trait)]
impl QFormula {
    pub fn body(b: Body) -> QFormula {
        QFormula::Body(b)
    }
    pub fn not(q: QFormula) -> QFormula {
        QFormula::Not(Box::new(q))
    }
    pub fn and(l: QFormula, r: QFormula) -> QFormula {
        QFormula::And(Box::new(l), Box::new(r))
    }
    pub fn or(l: QFormula, r: QFormula) -> QFormula {
        QFormula::Or(Box::new(l), Box::new(r))
    }
    pub fn implies(l: QFormula, r: QFormula) -> QFormula {
        QFormula::Implies(Box::new(l), Box::new(r))
    }
    pub fn quant(q: Quantifier, inner: QFormula) -> QFormula {
        QFormula::Quant(q, Box::new(inner))
    }

    pub fn and_all(items: impl IntoIterator<Item = QFormula>) -> QFormula {
        let mut it = items.into_iter();
        match it.next() {
            None => QFormula::Body(Body::True),
            Some(first) => it.fold(first, QFormula::and),
        }
    }

    pub fn forall(p: &str, x: &str, inner: QFormula) -> QFormula {
        QFormula::quant(
            Quantifier::FoForall(TraceVar::new(p), SetVar::new(x)),
            inner,
        )
    }

    pub fn exists(p: &str, x: &str, inner: QFormula) -> QFormula {
        QFormula::quant(
            Quantifier::FoExists(TraceVar::new(p), SetVar::new(x)),
            inner,
        )
    }

    pub fn exists_unique(p: &str, x: &str, inner: QFormula) -> QFormula {
        QFormula::quant(
            Quantifier::FoExistsUnique(TraceVar::new(p), SetVar::new(x)),
            inner,
        )
    }

    /// Wraps a prenex formula as a chain of quantifier nodes.
    pub fn from_formula(f: &Formula) -> QFormula {
        f.prefix
            .iter()
            .rev()
            .fold(QFormula::Body(f.body.clone()), |acc, q| {
                QFormula::quant(q.clone(), acc)
            })
    }

    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |q| match q {
            QFormula::Body(b) => out.extend(b.props()),
            QFormula::Quant(Quantifier::Fixpoint(fb), _) => {
                for c in &fb.conjuncts {
                    out.extend(c.step.props());
                }
            }
            _ => {}
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&QFormula)) {
        f(self);
        match self {
            QFormula::Body(_) => {}
            QFormula::Not(a) | QFormula::Quant(_, a) => a.visit(f),
            QFormula::And(a, b) | QFormula::Or(a, b) | QFormula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }
}
