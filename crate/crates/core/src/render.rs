//! Canonical text output. `parse_formula(render(f)) == f` for every formula.
//!
//! Binary term and formula operators are always parenthesized. Maximal
//! successor chains over `0` print as decimal numerals, which keeps emitted
//! guard sentences readable; both spellings parse to the same tree.

use std::fmt;

use crate::formula::Formula;
use crate::term::Term;

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, f)
    }
}

fn fmt_term(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let (depth, tail) = t.succ_chain();
    if depth > 0 {
        if matches!(tail, Term::Zero) {
            return write!(f, "{depth}");
        }
        for _ in 0..depth {
            write!(f, "S(")?;
        }
        fmt_term_node(tail, f)?;
        for _ in 0..depth {
            write!(f, ")")?;
        }
        return Ok(());
    }
    fmt_term_node(t, f)
}

fn fmt_term_node(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Zero => write!(f, "0"),
        Term::Var(v) => write!(f, "{v}"),
        Term::Succ(_) => fmt_term(t, f),
        Term::Add(a, b) => {
            write!(f, "(")?;
            fmt_term(a, f)?;
            write!(f, " + ")?;
            fmt_term(b, f)?;
            write!(f, ")")
        }
        Term::Mul(a, b) => {
            write!(f, "(")?;
            fmt_term(a, f)?;
            write!(f, " * ")?;
            fmt_term(b, f)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Lt(a, b) => write!(f, "{a} < {b}"),
            Formula::InI(t) => write!(f, "I({t})"),
            Formula::Not(g) => write!(f, "~{g}"),
            Formula::Or(a, b) => write!(f, "({a} \\/ {b})"),
            Formula::And(a, b) => write!(f, "({a} /\\ {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Exists(v, g) => write!(f, "exists {v} . {g}"),
            Formula::Forall(v, g) => write!(f, "forall {v} . {g}"),
            Formula::BddExists(v, t, g) => write!(f, "exists {v} < {t} . {g}"),
            Formula::BddForall(v, t, g) => write!(f, "forall {v} < {t} . {g}"),
        }
    }
}

/// Canonical text for a formula.
pub fn render(f: &Formula) -> String {
    f.to_string()
}
