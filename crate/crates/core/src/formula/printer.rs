use std::fmt;

use super::ast::*;

impl fmt::Display for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Body::True => f.write_str("true"),
            Body::False => f.write_str("false"),
            Body::Atom { prop, trace } => write!(f, "{prop}@{trace}"),
            Body::Member { trace, set } => write!(f, "{trace} in {set}"),
            Body::InSet { trace, set } => write!(f, "{trace} isin {set}"),
            Body::TraceEq(l, r) => write!(f, "{l} == {r}"),
            Body::Not(b) => write!(f, "!{b}"),
            Body::Next(b) => write!(f, "X {b}"),
            Body::Eventually(b) => write!(f, "F {b}"),
            Body::Globally(b) => write!(f, "G {b}"),
            Body::And(l, r) => write!(f, "({l} & {r})"),
            Body::Or(l, r) => write!(f, "({l} | {r})"),
            Body::Implies(l, r) => write!(f, "({l} -> {r})"),
            Body::Iff(l, r) => write!(f, "({l} <-> {r})"),
            Body::Until(l, r) => write!(f, "({l} U {r})"),
        }
    }
}

impl fmt::Display for FixpointConjunct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("forall ")?;
        for (i, (p, x)) in self.binders.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p} in {x}")?;
        }
        // the fixpoint variable is only known to the enclosing binder, so the
        // conclusion set is filled in by `FixpointBinder`'s impl
        write!(f, " : {} -> {} in ", self.step, self.target_var())
    }
}

impl fmt::Display for FixpointBinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fix {} {{ ", self.set)?;
        for (i, c) in self.conjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" ; ")?;
            }
            write!(f, "{c}{}", self.set)?;
        }
        f.write_str(" }.")
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantifier::SoExists(x) => write!(f, "exists {x}."),
            Quantifier::SoForall(x) => write!(f, "forall {x}."),
            Quantifier::Fixpoint(b) => write!(f, "{b}"),
            Quantifier::FoExists(p, x) => write!(f, "exists {p} in {x}."),
            Quantifier::FoForall(p, x) => write!(f, "forall {p} in {x}."),
            Quantifier::FoExistsUnique(p, x) => write!(f, "exists! {p} in {x}."),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.prefix {
            write!(f, "{q} ")?;
        }
        write!(f, "{}", self.body)
    }
}

impl Formula {
    /// Multi-line rendering used for formula files: one quantifier item per line.
    pub fn to_pretty_string(&self) -> String {
        let mut out = String::new();
        for q in &self.prefix {
            out.push_str(&q.to_string());
            out.push('\n');
        }
        out.push_str(&self.body.to_string());
        out.push('\n');
        out
    }
}

impl fmt::Display for QFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QFormula::Body(b) => write!(f, "{b}"),
            QFormula::Not(q) => write!(f, "!({q})"),
            QFormula::And(l, r) => write!(f, "({l} & {r})"),
            QFormula::Or(l, r) => write!(f, "({l} | {r})"),
            QFormula::Implies(l, r) => write!(f, "({l} -> {r})"),
            QFormula::Quant(q, inner) => write!(f, "{q} {inner}"),
        }
    }
}
