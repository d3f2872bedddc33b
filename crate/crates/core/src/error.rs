use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("unbound trace variable `{0}`")]
    UnboundTrace(String),
    #[error("unbound set variable `{0}`")]
    UnboundSet(String),
    #[error("membership `{0}` occurs under a temporal operator")]
    MembershipUnderTemporal(String),
    #[error("variable `{0}` is bound more than once")]
    Rebinding(String),
    #[error("malformed fixpoint conjunct: {0}")]
    Fixpoint(String),
    #[error("ill-formed formula: {0}")]
    IllFormed(String),
    #[error("cannot dualize: {0}")]
    Dualize(String),

    #[error("structure syntax error at line {line}: {msg}")]
    KripkeSyntax { line: usize, msg: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("missing `init` declaration")]
    MissingInit,
    #[error("more than one `init` declaration")]
    DuplicateInit,
    #[error("transition relation is not total: state `{0}` has no successor")]
    NotTotal(String),
    #[error("structure is not acyclic")]
    NotAcyclic,
    #[error("too many atomic propositions ({0}); at most 64 are supported")]
    TooManyProps(usize),

    #[error("trace variable `{0}` is not assigned")]
    UnmappedTrace(String),
    #[error("set variable `{0}` is not assigned")]
    UnmappedSet(String),
    #[error("brute-force bound exceeded: {traces} traces, bound is {bound}")]
    BoundExceeded { traces: usize, bound: usize },
    #[error("second-order enumeration over {0} traces is not supported (at most 63)")]
    TooManyTraces(usize),
    #[error("formula is not in the requested fragment: {0}")]
    Fragment(String),

    #[error("horn input error at line {line}: {msg}")]
    HornSyntax { line: usize, msg: String },
    #[error("qbf input error at line {line}: {msg}")]
    QbfSyntax { line: usize, msg: String },
    #[error("invalid qbf: {0}")]
    QbfInvalid(String),
}
