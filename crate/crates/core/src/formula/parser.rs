use std::collections::BTreeSet;

use super::ast::*;
use crate::error::{Error, Result};

const RESERVED: &[&str] = &[
    "exists", "forall", "fix", "in", "isin", "true", "false", "X", "U", "F", "G", ALL,
];
// Temporal keywords are still usable as set-variable names: sets only ever appear
// after `in`, `isin`, `fix` or a second-order quantifier, where no operator can.
const SET_OK: &[&str] = &["X", "U", "F", "G"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    ExistsUnique,
    At,
    EqEq,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Comma,
    Colon,
    Dot,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::ExistsUnique => "`exists!`".into(),
            Tok::At => "`@`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DArrow => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let syntax = |line, col, msg: String| Error::Syntax { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        let peek = |k: usize| chars.get(i + k).copied();
        let (tok, width) = match c {
            '@' => (Tok::At, 1),
            '!' => (Tok::Bang, 1),
            '&' => (Tok::Amp, 1),
            '|' => (Tok::Pipe, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            ';' => (Tok::Semi, 1),
            ',' => (Tok::Comma, 1),
            ':' => (Tok::Colon, 1),
            '.' => (Tok::Dot, 1),
            '=' if peek(1) == Some('=') => (Tok::EqEq, 2),
            '-' if peek(1) == Some('>') => (Tok::Arrow, 2),
            '<' if peek(1) == Some('-') && peek(2) == Some('>') => (Tok::DArrow, 3),
            c if is_ident_char(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                if word == "exists" && chars.get(j) == Some(&'!') {
                    (Tok::ExistsUnique, j - i + 1)
                } else {
                    (Tok::Ident(word), j - i)
                }
            }
            other => {
                return Err(syntax(
                    start_line,
                    start_col,
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        out.push(Spanned {
            tok,
            line: start_line,
            col: start_col,
        });
        i += width;
        col += width;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    /// Set variables bound so far in the prefix (without `ALL`).
    sets: Vec<String>,
    /// Trace variables bound so far in the prefix.
    traces: Vec<String>,
}

/// Scope used while parsing one body.
struct Scope<'a> {
    traces: &'a [String],
    sets: &'a [String],
    allow_membership: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let s = &self.toks[self.pos];
        Err(Error::Syntax {
            line: s.line,
            col: s.col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.advance();
            Ok(())
        } else {
            self.err(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            ))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(s)
            }
            other => self.err(format!("expected {what}, found {}", other.describe())),
        }
    }

    /// A trace variable or proposition name: any non-reserved identifier.
    fn plain_ident(&mut self, what: &str) -> Result<String> {
        let s = self.ident(what)?;
        if RESERVED.contains(&s.as_str()) {
            self.pos -= 1;
            return self.err(format!("expected {what}, found reserved word `{s}`"));
        }
        Ok(s)
    }

    /// A set variable occurrence; `ALL` is accepted.
    fn set_ident(&mut self) -> Result<String> {
        let s = self.ident("set variable")?;
        if RESERVED.contains(&s.as_str()) && s != ALL && !SET_OK.contains(&s.as_str()) {
            self.pos -= 1;
            return self.err(format!("expected set variable, found reserved word `{s}`"));
        }
        Ok(s)
    }

    /// A set variable being bound; `ALL` is rejected.
    fn new_set_ident(&mut self) -> Result<String> {
        let s = self.set_ident()?;
        if s == ALL {
            self.pos -= 1;
            return self.err("`ALL` is reserved and cannot be bound");
        }
        Ok(s)
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut prefix = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Ident(kw) if kw == "exists" || kw == "forall" => {
                    let is_so = matches!(self.peek_at(2), Tok::Dot);
                    self.advance();
                    if is_so {
                        let x = self.new_set_ident()?;
                        self.bind_set(&x)?;
                        self.expect(Tok::Dot)?;
                        let x = SetVar(x);
                        prefix.push(if kw == "exists" {
                            Quantifier::SoExists(x)
                        } else {
                            Quantifier::SoForall(x)
                        });
                    } else {
                        let (p, x) = self.fo_binding()?;
                        prefix.push(if kw == "exists" {
                            Quantifier::FoExists(p, x)
                        } else {
                            Quantifier::FoForall(p, x)
                        });
                    }
                }
                Tok::ExistsUnique => {
                    self.advance();
                    let (p, x) = self.fo_binding()?;
                    prefix.push(Quantifier::FoExistsUnique(p, x));
                }
                Tok::Ident(kw) if kw == "fix" => {
                    self.advance();
                    prefix.push(Quantifier::Fixpoint(self.fixpoint()?));
                }
                _ => break,
            }
        }
        let traces = self.traces.clone();
        let sets = self.sets.clone();
        let body = self.body(&Scope {
            traces: &traces,
            sets: &sets,
            allow_membership: true,
        })?;
        if *self.peek() != Tok::Eof {
            return self.err(format!(
                "unexpected {} after formula body",
                self.peek().describe()
            ));
        }
        Ok(Formula::new(prefix, body))
    }

    fn bind_set(&mut self, x: &str) -> Result<()> {
        if self.sets.iter().any(|s| s == x) {
            return Err(Error::Rebinding(x.to_string()));
        }
        self.sets.push(x.to_string());
        Ok(())
    }

    fn check_set_bound(&self, x: &str, extra: Option<&str>) -> Result<()> {
        if x == ALL || self.sets.iter().any(|s| s == x) || extra == Some(x) {
            Ok(())
        } else {
            Err(Error::UnboundSet(x.to_string()))
        }
    }

    /// `p in X .` after the quantifier keyword.
    fn fo_binding(&mut self) -> Result<(TraceVar, SetVar)> {
        let p = self.plain_ident("trace variable")?;
        if !self.is_kw("in") {
            return self.err("expected `in`");
        }
        self.advance();
        let x = self.set_ident()?;
        self.check_set_bound(&x, None)?;
        self.expect(Tok::Dot)?;
        if self.traces.contains(&p) {
            return Err(Error::Rebinding(p));
        }
        self.traces.push(p.clone());
        Ok((TraceVar(p), SetVar(x)))
    }

    fn fixpoint(&mut self) -> Result<FixpointBinder> {
        let x = self.new_set_ident()?;
        self.bind_set(&x)?;
        self.expect(Tok::LBrace)?;
        let mut conjuncts = vec![self.conjunct(&x)?];
        while *self.peek() == Tok::Semi {
            self.advance();
            conjuncts.push(self.conjunct(&x)?);
        }
        self.expect(Tok::RBrace)?;
        self.expect(Tok::Dot)?;
        Ok(FixpointBinder {
            set: SetVar(x),
            conjuncts,
        })
    }

    fn conjunct(&mut self, own: &str) -> Result<FixpointConjunct> {
        if !self.is_kw("forall") {
            return self.err("expected `forall` to start a fixpoint conjunct");
        }
        self.advance();
        let mut binders: Vec<(TraceVar, SetVar)> = Vec::new();
        loop {
            let p = self.plain_ident("trace variable")?;
            if !self.is_kw("in") {
                return self.err("expected `in`");
            }
            self.advance();
            let s = self.set_ident()?;
            self.check_set_bound(&s, Some(own))?;
            if self.traces.contains(&p) || binders.iter().any(|(q, _)| q.0 == p) {
                return Err(Error::Rebinding(p));
            }
            binders.push((TraceVar(p), SetVar(s)));
            if *self.peek() == Tok::Comma {
                self.advance();
            } else {
                break;
            }
        }
        self.expect(Tok::Colon)?;
        let mut traces = self.traces.clone();
        traces.extend(binders.iter().map(|(p, _)| p.0.clone()));
        let mut sets = self.sets.clone();
        sets.push(own.to_string());
        let start = self.pos;
        let whole = self.body(&Scope {
            traces: &traces,
            sets: &sets,
            allow_membership: true,
        })?;
        let (step, target) = split_conjunct(whole).map_err(|msg| {
            let s = &self.toks[start];
            Error::Fixpoint(format!("at line {}, column {}: {msg}", s.line, s.col))
        })?;
        if target.1 .0 != own {
            return Err(Error::Fixpoint(format!(
                "conclusion must add to `{own}`, not `{}`",
                target.1
            )));
        }
        let idx = binders
            .iter()
            .position(|(p, _)| *p == target.0)
            .ok_or_else(|| {
                Error::Fixpoint(format!(
                    "conclusion variable `{}` is not bound by this conjunct",
                    target.0
                ))
            })?;
        Ok(FixpointConjunct {
            binders,
            step,
            target: idx,
        })
    }

    fn body(&mut self, sc: &Scope) -> Result<Body> {
        self.iff(sc, 0)
    }

    fn iff(&mut self, sc: &Scope, t: usize) -> Result<Body> {
        let mut l = self.imp(sc, t)?;
        while *self.peek() == Tok::DArrow {
            self.advance();
            let r = self.imp(sc, t)?;
            l = Body::iff(l, r);
        }
        Ok(l)
    }

    fn imp(&mut self, sc: &Scope, t: usize) -> Result<Body> {
        let l = self.or(sc, t)?;
        if *self.peek() == Tok::Arrow {
            self.advance();
            let r = self.imp(sc, t)?;
            return Ok(Body::implies(l, r));
        }
        Ok(l)
    }

    fn or(&mut self, sc: &Scope, t: usize) -> Result<Body> {
        let mut l = self.and(sc, t)?;
        while *self.peek() == Tok::Pipe {
            self.advance();
            let r = self.and(sc, t)?;
            l = Body::or(l, r);
        }
        Ok(l)
    }

    fn and(&mut self, sc: &Scope, t: usize) -> Result<Body> {
        let mut l = self.until(sc, t)?;
        while *self.peek() == Tok::Amp {
            self.advance();
            let r = self.until(sc, t)?;
            l = Body::and(l, r);
        }
        Ok(l)
    }

    fn until(&mut self, sc: &Scope, t: usize) -> Result<Body> {
        let l = self.unary(sc, t)?;
        // the left operand was parsed before `U` was seen
        if self.is_kw("U") {
            self.advance();
            let r = self.until(sc, t + 1)?;
            let l = reject_membership(l)?;
            return Ok(Body::until(l, r));
        }
        Ok(l)
    }

    fn unary(&mut self, sc: &Scope, t: usize) -> Result<Body> {
        match self.peek().clone() {
            Tok::Bang => {
                self.advance();
                Ok(Body::not(self.unary(sc, t)?))
            }
            Tok::Ident(kw) if kw == "X" || kw == "F" || kw == "G" => {
                self.advance();
                let inner = self.unary(sc, t + 1)?;
                Ok(match kw.as_str() {
                    "X" => Body::next(inner),
                    "F" => Body::eventually(inner),
                    _ => Body::globally(inner),
                })
            }
            _ => self.primary(sc, t),
        }
    }

    fn primary(&mut self, sc: &Scope, t: usize) -> Result<Body> {
        match self.peek().clone() {
            Tok::LParen => {
                self.advance();
                let b = self.iff(sc, t)?;
                self.expect(Tok::RParen)?;
                Ok(b)
            }
            Tok::Ident(kw) if kw == "true" => {
                self.advance();
                Ok(Body::True)
            }
            Tok::Ident(kw) if kw == "false" => {
                self.advance();
                Ok(Body::False)
            }
            Tok::Ident(_) => {
                let first = self.pos;
                let name = self.plain_ident("proposition or trace variable")?;
                let trace_ok = |p: &str| sc.traces.iter().any(|s| s == p);
                match self.peek().clone() {
                    Tok::At => {
                        self.advance();
                        let p = self.plain_ident("trace variable")?;
                        if !trace_ok(&p) {
                            return Err(Error::UnboundTrace(p));
                        }
                        Ok(Body::Atom {
                            prop: name,
                            trace: TraceVar(p),
                        })
                    }
                    Tok::EqEq => {
                        self.advance();
                        let q = self.plain_ident("trace variable")?;
                        for v in [&name, &q] {
                            if !trace_ok(v) {
                                return Err(Error::UnboundTrace(v.clone()));
                            }
                        }
                        Ok(Body::TraceEq(TraceVar(name), TraceVar(q)))
                    }
                    Tok::Ident(kw) if kw == "in" || kw == "isin" => {
                        self.advance();
                        let x = self.set_ident()?;
                        if !trace_ok(&name) {
                            return Err(Error::UnboundTrace(name));
                        }
                        if x != ALL && !sc.sets.iter().any(|s| *s == x) {
                            return Err(Error::UnboundSet(x));
                        }
                        let (trace, set) = (TraceVar(name), SetVar(x));
                        if kw == "isin" {
                            return Ok(Body::InSet { trace, set });
                        }
                        if !sc.allow_membership {
                            self.pos = first;
                            return self.err("membership is not allowed here");
                        }
                        if t > 0 {
                            return Err(Error::MembershipUnderTemporal(format!(
                                "{trace} in {set}"
                            )));
                        }
                        Ok(Body::Member { trace, set })
                    }
                    other => self.err(format!(
                        "expected `@`, `==` or `in` after `{name}`, found {}",
                        other.describe()
                    )),
                }
            }
            other => self.err(format!("expected a body formula, found {}", other.describe())),
        }
    }
}

fn reject_membership(b: Body) -> Result<Body> {
    fn find(b: &Body) -> Option<String> {
        match b {
            Body::Member { trace, set } => Some(format!("{trace} in {set}")),
            _ => b.children().into_iter().find_map(find),
        }
    }
    match find(&b) {
        Some(m) => Err(Error::MembershipUnderTemporal(m)),
        None => Ok(b),
    }
}

/// Splits `step -> p in X` into its step and conclusion. A right-nested chain
/// `s1 -> s2 -> p in X` is read as `(s1 & s2) -> p in X`.
fn split_conjunct(b: Body) -> std::result::Result<(Body, (TraceVar, SetVar)), String> {
    match b {
        Body::Implies(l, r) => {
            let (step, target) = match *r {
                Body::Member { trace, set } => (*l, (trace, set)),
                other @ Body::Implies(..) => {
                    let (inner, target) = split_conjunct(other)?;
                    (Body::and(*l, inner), target)
                }
                _ => return Err("expected `<step> -> <trace> in <set>`".into()),
            };
            if contains_membership(&step) {
                return Err("the step formula must not contain membership".into());
            }
            Ok((step, target))
        }
        _ => Err("expected `<step> -> <trace> in <set>`".into()),
    }
}

fn contains_membership(b: &Body) -> bool {
    match b {
        Body::Member { .. } | Body::InSet { .. } => true,
        _ => b.children().into_iter().any(contains_membership),
    }
}

/// Parses a formula in the concrete syntax.
///
/// ```
/// use h2mc_core::formula::parse_formula;
/// let f = parse_formula("forall p in ALL. a@p").unwrap();
/// assert_eq!(f.prefix.len(), 1);
/// ```
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        sets: Vec::new(),
        traces: Vec::new(),
    };
    p.formula()
}

/// Parses a standalone body in which the given trace and set variables are in scope.
pub fn parse_body(text: &str, traces: &[&str], sets: &[&str]) -> Result<Body> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        sets: sets.iter().map(|s| s.to_string()).collect(),
        traces: traces.iter().map(|s| s.to_string()).collect(),
    };
    let traces = p.traces.clone();
    let sets = p.sets.clone();
    let b = p.body(&Scope {
        traces: &traces,
        sets: &sets,
        allow_membership: true,
    })?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {} after body", p.peek().describe()));
    }
    Ok(b)
}

/// Identifiers that cannot be used as trace variables or propositions.
pub fn reserved_words() -> BTreeSet<&'static str> {
    RESERVED.iter().copied().collect()
}
