use std::fmt;

use super::ast::*;
use super::prenex::negate;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fragment {
    QuantifierFree,
    FixpointFragment,
    /// Outermost set quantifier existential, with `k` alternations.
    Sigma(usize),
    /// Outermost set quantifier universal, with `k` alternations.
    Pi(usize),
    Mixed,
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fragment::QuantifierFree => f.write_str("quantifier_free"),
            Fragment::FixpointFragment => f.write_str("fixpoint_fragment"),
            Fragment::Sigma(k) => write!(f, "sigma_{k}"),
            Fragment::Pi(k) => write!(f, "pi_{k}"),
            Fragment::Mixed => f.write_str("mixed"),
        }
    }
}

/// `true` for `exists X`, `false` for `forall X`; other items are skipped.
fn so_polarities(f: &Formula) -> impl Iterator<Item = bool> + '_ {
    f.prefix.iter().filter_map(|q| match q {
        Quantifier::SoExists(_) => Some(true),
        Quantifier::SoForall(_) => Some(false),
        _ => None,
    })
}

/// Number of switches between `exists` and `forall` among second-order items.
/// First-order items and fixpoint binders do not count.
pub fn count_so_alternations(f: &Formula) -> usize {
    let pol: Vec<bool> = so_polarities(f).collect();
    pol.windows(2).filter(|w| w[0] != w[1]).count()
}

pub fn classify_fragment(f: &Formula) -> Fragment {
    if f.prefix.is_empty() {
        return Fragment::QuantifierFree;
    }
    let first = so_polarities(f).next();
    match (first, f.has_fixpoint()) {
        (None, _) => Fragment::FixpointFragment,
        (Some(_), true) => Fragment::Mixed,
        (Some(true), false) => Fragment::Sigma(count_so_alternations(f)),
        (Some(false), false) => Fragment::Pi(count_so_alternations(f)),
    }
}

/// Swaps every quantifier for its dual and negates the body.
///
/// A top-level negation of the body is stripped rather than doubled, so dualizing twice
/// gives back the original formula.
pub fn dualize(f: &Formula) -> Result<Formula> {
    let mut prefix = Vec::with_capacity(f.prefix.len());
    for q in &f.prefix {
        match q {
            Quantifier::Fixpoint(b) => {
                return Err(Error::Dualize(format!(
                    "fixpoint binder `{}` has no dual",
                    b.set
                )))
            }
            Quantifier::FoExistsUnique(p, _) => {
                return Err(Error::Dualize(format!(
                    "`exists! {p}` must be expanded first"
                )))
            }
            other => prefix.push(other.flipped()),
        }
    }
    Ok(Formula {
        prefix,
        body: negate(&f.body),
        alphabet: f.alphabet.clone(),
    })
}
