use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// A set of atomic propositions, as a bitmask over a structure's proposition list.
pub type Letter = u64;

pub const MAX_PROPS: usize = 64;

/// Finite Kripke structure with a single initial state and a total transition relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeStructure {
    aps: Vec<String>,
    names: Vec<String>,
    labels: Vec<Letter>,
    succ: Vec<Vec<usize>>,
    initial: usize,
}

impl KripkeStructure {
    /// Builds a structure; `labels[i]` lists the propositions of state `i`.
    ///
    /// Fails on duplicate state names, out-of-range indices, unknown propositions or a
    /// state without successor.
    pub fn new(
        aps: Vec<String>,
        names: Vec<String>,
        labels: Vec<Vec<String>>,
        edges: &[(usize, usize)],
        initial: usize,
    ) -> Result<Self> {
        if aps.len() > MAX_PROPS {
            return Err(Error::TooManyProps(aps.len()));
        }
        let ap_index: HashMap<&str, usize> =
            aps.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
        if ap_index.len() != aps.len() {
            return Err(Error::KripkeSyntax {
                line: 0,
                msg: "duplicate atomic proposition".into(),
            });
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::DuplicateState(n.clone()));
            }
        }
        if labels.len() != names.len() {
            return Err(Error::KripkeSyntax {
                line: 0,
                msg: "one label per state expected".into(),
            });
        }
        let n = names.len();
        if initial >= n {
            return Err(Error::MissingInit);
        }
        let mut letters = Vec::with_capacity(n);
        for props in &labels {
            let mut l: Letter = 0;
            for p in props {
                let i = *ap_index.get(p.as_str()).ok_or_else(|| Error::KripkeSyntax {
                    line: 0,
                    msg: format!("undeclared atomic proposition `{p}`"),
                })?;
                l |= 1 << i;
            }
            letters.push(l);
        }
        let mut succ = vec![Vec::new(); n];
        for &(s, t) in edges {
            if s >= n || t >= n {
                return Err(Error::UnknownState(format!("#{}", s.max(t))));
            }
            succ[s].push(t);
        }
        for (i, v) in succ.iter_mut().enumerate() {
            v.sort_unstable();
            v.dedup();
            if v.is_empty() {
                return Err(Error::NotTotal(names[i].clone()));
            }
        }
        Ok(KripkeStructure {
            aps,
            names,
            labels: letters,
            succ,
            initial,
        })
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn aps(&self) -> &[String] {
        &self.aps
    }

    pub fn ap_index(&self, name: &str) -> Option<usize> {
        self.aps.iter().position(|a| a == name)
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn label(&self, s: usize) -> Letter {
        self.labels[s]
    }

    pub fn label_props(&self, s: usize) -> Vec<&str> {
        letter_props(&self.aps, self.labels[s])
    }

    pub fn successors(&self, s: usize) -> &[usize] {
        &self.succ[s]
    }

    pub fn has_self_loop(&self, s: usize) -> bool {
        self.succ[s].binary_search(&s).is_ok()
    }

    /// All transitions, sorted by source then target index.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(s, ts)| ts.iter().map(move |&t| (s, t)))
            .collect()
    }
}

pub fn letter_props(aps: &[String], l: Letter) -> Vec<&str> {
    aps.iter()
        .enumerate()
        .filter(|(i, _)| l >> i & 1 == 1)
        .map(|(_, a)| a.as_str())
        .collect()
}

/// An eventually constant word, stored as its shortest prefix whose last letter repeats
/// forever.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Trace {
    word: Vec<Letter>,
}

impl Trace {
    /// Canonicalizes `word` by trimming trailing repetitions of the last letter.
    ///
    /// Panics on an empty word.
    pub fn new(mut word: Vec<Letter>) -> Trace {
        assert!(!word.is_empty(), "a trace needs at least one letter");
        while word.len() > 1 && word[word.len() - 1] == word[word.len() - 2] {
            word.pop();
        }
        Trace { word }
    }

    pub fn word(&self) -> &[Letter] {
        &self.word
    }

    /// Canonical length.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Letter at `pos`; positions past the stored prefix read the last letter.
    #[inline]
    pub fn at(&self, pos: usize) -> Letter {
        self.word[pos.min(self.word.len() - 1)]
    }

    /// Rendering like `{a}{a,b}{}`.
    pub fn display<'a>(&'a self, aps: &'a [String]) -> impl fmt::Display + 'a {
        TraceDisplay { trace: self, aps }
    }
}

struct TraceDisplay<'a> {
    trace: &'a Trace,
    aps: &'a [String],
}

impl fmt::Display for TraceDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.trace.word {
            write!(f, "{{{}}}", letter_props(self.aps, l).join(","))?;
        }
        Ok(())
    }
}

impl PartialOrd for Trace {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortlex on canonical words.
impl Ord for Trace {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.word
            .len()
            .cmp(&other.word.len())
            .then_with(|| self.word.cmp(&other.word))
    }
}

/// Duplicate-free, shortlex-ordered collection of traces over a fixed proposition list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceSet {
    aps: Vec<String>,
    traces: Vec<Trace>,
}

impl TraceSet {
    pub fn new(aps: Vec<String>, traces: impl IntoIterator<Item = Trace>) -> TraceSet {
        let set: BTreeSet<Trace> = traces.into_iter().collect();
        TraceSet {
            aps,
            traces: set.into_iter().collect(),
        }
    }

    /// Builds a trace set from words given as lists of proposition names per letter.
    /// Propositions are numbered in order of `aps`.
    pub fn from_words(aps: &[&str], words: &[Vec<Vec<&str>>]) -> Result<TraceSet> {
        let aps: Vec<String> = aps.iter().map(|s| s.to_string()).collect();
        if aps.len() > MAX_PROPS {
            return Err(Error::TooManyProps(aps.len()));
        }
        let mut traces = Vec::new();
        for w in words {
            let mut word = Vec::new();
            for letter in w {
                let mut l = 0;
                for p in letter {
                    let i = aps.iter().position(|a| a == p).ok_or_else(|| {
                        Error::KripkeSyntax {
                            line: 0,
                            msg: format!("undeclared atomic proposition `{p}`"),
                        }
                    })?;
                    l |= 1 << i;
                }
                word.push(l);
            }
            if word.is_empty() {
                return Err(Error::KripkeSyntax {
                    line: 0,
                    msg: "empty trace".into(),
                });
            }
            traces.push(Trace::new(word));
        }
        Ok(TraceSet::new(aps, traces))
    }

    pub fn aps(&self) -> &[String] {
        &self.aps
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn get(&self, i: usize) -> &Trace {
        &self.traces[i]
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Trace> {
        self.traces.iter()
    }

    pub fn index_of(&self, t: &Trace) -> Option<usize> {
        self.traces.binary_search(t).ok()
    }

    pub fn max_len(&self) -> usize {
        self.traces.iter().map(Trace::len).max().unwrap_or(0)
    }

    /// Same traces re-expressed over another proposition list that contains every
    /// proposition used by this set.
    pub fn with_aps(&self, aps: &[String]) -> Option<TraceSet> {
        let map: Option<Vec<usize>> = self
            .aps
            .iter()
            .map(|a| aps.iter().position(|b| b == a))
            .collect();
        let map = map?;
        let traces = self.traces.iter().map(|t| {
            Trace::new(
                t.word
                    .iter()
                    .map(|&l| {
                        map.iter()
                            .enumerate()
                            .filter(|(i, _)| l >> i & 1 == 1)
                            .fold(0, |acc, (_, &j)| acc | 1 << j)
                    })
                    .collect(),
            )
        });
        Some(TraceSet::new(aps.to_vec(), traces))
    }

    /// Rendering of the trace `i`.
    pub fn show(&self, i: usize) -> String {
        self.traces[i].display(&self.aps).to_string()
    }
}
