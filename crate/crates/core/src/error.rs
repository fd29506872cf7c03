use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("the predicate I is not part of L_A (use the L_A(I) language mode)")]
    PredicateNotInLanguage { pos: usize },

    #[error("bound term of quantifier contains the bound variable {var}")]
    BoundVarInBound { var: String },

    #[error("formula is not Delta_0: unbounded quantifier {quantifier}")]
    NotDelta0 { quantifier: String },

    #[error("unbound variable {var} in evaluation")]
    UnboundVariable { var: String },

    #[error("the predicate I cannot be evaluated without an expansion (use eval_over_expansion)")]
    PredicateNeedsExpansion,

    #[error("value {value} is not a Goedel code: {msg}")]
    NotACode { value: String, msg: String },

    #[error("fresh z-variable {var} occurs in the input formula")]
    FreshVariablePresent { var: String },

    #[error("connective {connective} is not in the normalized fragment; run normalize_connectives first")]
    NotNormalized { connective: String },

    #[error("arity mismatch: expected {expected} free variables, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("I is not contained in [0, {domain}]")]
    DomainViolation { domain: u64 },

    #[error("insufficient Ramsey room: best homogeneous set has {} elements, needed {needed}", best.len())]
    InsufficientRamseyRoom { needed: usize, best: Vec<u64> },

    #[error("strict guard unreachable: code of formula {formula} exceeds the domain bound {domain}")]
    GuardInfeasible { formula: String, domain: u64 },

    #[error("indiscernible set exhausted: {msg}")]
    IExhausted { msg: String },

    #[error("tail too short: {len} elements from index {start}")]
    TailTooShort { start: usize, len: usize },

    #[error("mined witness failed post-verification for {scheme} on formula {formula}")]
    PostVerification { scheme: String, formula: String },

    #[error("corpus line {line}: {source}")]
    Corpus {
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {msg}")]
    Config { msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
