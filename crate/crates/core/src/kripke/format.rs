use std::collections::HashMap;
use std::fmt::Write;

use super::model::KripkeStructure;
use crate::error::{Error, Result};

/// Parses the line-oriented structure format:
///
/// ```text
/// aps a b            # optional; inferred from the labels otherwise
/// state s0 :
/// state s1 : a
/// init s0
/// edge s0 s1
/// edge s1 s1
/// ```
///
/// Statements are separated by newlines or `;`, `#` starts a comment.
pub fn parse_kripke(text: &str) -> Result<KripkeStructure> {
    let mut declared_aps: Option<Vec<String>> = None;
    let mut inferred_aps: Vec<String> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<Vec<String>> = Vec::new();
    let mut init: Option<(String, usize)> = None;
    let mut raw_edges: Vec<(String, String, usize)> = Vec::new();

    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = line.split('#').next().unwrap_or("");
        for stmt in line.split(';') {
            let stmt = stmt.trim();
            if stmt.is_empty() {
                continue;
            }
            let syntax = |msg: String| Error::KripkeSyntax { line: ln, msg };
            let (kw, rest) = stmt
                .split_once(char::is_whitespace)
                .map(|(k, r)| (k, r.trim()))
                .unwrap_or((stmt, ""));
            match kw {
                "aps" => {
                    if declared_aps.is_some() {
                        return Err(syntax("duplicate `aps` declaration".into()));
                    }
                    let aps: Vec<String> = rest.split_whitespace().map(String::from).collect();
                    declared_aps = Some(aps);
                }
                "state" => {
                    let (name, props) = rest
                        .split_once(':')
                        .ok_or_else(|| syntax("expected `state NAME : [props]`".into()))?;
                    let name = name.trim();
                    if name.is_empty() || name.contains(char::is_whitespace) {
                        return Err(syntax(format!("invalid state name `{name}`")));
                    }
                    if index.contains_key(name) {
                        return Err(Error::DuplicateState(name.to_string()));
                    }
                    let props: Vec<String> = props.split_whitespace().map(String::from).collect();
                    for p in &props {
                        if !inferred_aps.contains(p) {
                            inferred_aps.push(p.clone());
                        }
                    }
                    index.insert(name.to_string(), names.len());
                    names.push(name.to_string());
                    labels.push(props);
                }
                "init" => {
                    let name = single(rest).ok_or_else(|| syntax("expected `init NAME`".into()))?;
                    if init.is_some() {
                        return Err(Error::DuplicateInit);
                    }
                    init = Some((name.to_string(), ln));
                }
                "edge" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(syntax("expected `edge FROM TO`".into()));
                    }
                    raw_edges.push((parts[0].to_string(), parts[1].to_string(), ln));
                }
                other => return Err(syntax(format!("unknown statement `{other}`"))),
            }
        }
    }

    let aps = match declared_aps {
        Some(aps) => {
            if let Some(p) = inferred_aps.iter().find(|p| !aps.contains(p)) {
                return Err(Error::KripkeSyntax {
                    line: 0,
                    msg: format!("proposition `{p}` is not declared in `aps`"),
                });
            }
            aps
        }
        None => inferred_aps,
    };
    let (init_name, _) = init.ok_or(Error::MissingInit)?;
    let initial = *index
        .get(&init_name)
        .ok_or_else(|| Error::UnknownState(init_name.clone()))?;
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (s, t, _) in &raw_edges {
        let si = *index.get(s).ok_or_else(|| Error::UnknownState(s.clone()))?;
        let ti = *index.get(t).ok_or_else(|| Error::UnknownState(t.clone()))?;
        edges.push((si, ti));
    }
    KripkeStructure::new(aps, names, labels, &edges, initial)
}

fn single(s: &str) -> Option<&str> {
    let mut it = s.split_whitespace();
    let first = it.next()?;
    it.next().is_none().then_some(first)
}

/// Canonical text form: propositions, states in index order, `init`, sorted edges.
pub fn print_kripke(k: &KripkeStructure) -> String {
    let mut out = String::new();
    if !k.aps().is_empty() {
        writeln!(out, "aps {}", k.aps().join(" ")).unwrap();
    }
    for s in 0..k.num_states() {
        let props = k.label_props(s);
        if props.is_empty() {
            writeln!(out, "state {}:", k.state_name(s)).unwrap();
        } else {
            writeln!(out, "state {}: {}", k.state_name(s), props.join(" ")).unwrap();
        }
    }
    writeln!(out, "init {}", k.state_name(k.initial())).unwrap();
    for (s, t) in k.edges() {
        writeln!(out, "edge {} {}", k.state_name(s), k.state_name(t)).unwrap();
    }
    out
}
