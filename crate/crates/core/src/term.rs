//! Terms of the arithmetic language {+, ·, S, <, 0} and its variable namespaces.
//!
//! Variables live in two disjoint namespaces: the ordinary `x` namespace for
//! source formulas, and the reserved `z` namespace that only the star
//! transformation introduces. Keeping them apart makes the z-shift a pure
//! reindexing with no freshness bookkeeping.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero as _;

/// Variable namespace tag. `Ordinary` renders as `x`, `Fresh` as `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Namespace {
    Ordinary,
    Fresh,
}

/// A variable identifier: namespace plus 1-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId {
    pub ns: Namespace,
    pub index: u32,
}

impl VarId {
    /// Ordinary variable `x<index>`. Index must be positive.
    pub fn x(index: u32) -> Self {
        assert!(index >= 1, "variable indices are 1-based");
        VarId { ns: Namespace::Ordinary, index }
    }

    /// Fresh variable `z<index>`, reserved for the star transformation.
    pub fn z(index: u32) -> Self {
        assert!(index >= 1, "variable indices are 1-based");
        VarId { ns: Namespace::Fresh, index }
    }

    pub fn is_fresh(&self) -> bool {
        self.ns == Namespace::Fresh
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ns {
            Namespace::Ordinary => write!(f, "x{}", self.index),
            Namespace::Fresh => write!(f, "z{}", self.index),
        }
    }
}

/// A term of the language. Finite tree; these five constructors are all
/// there is.
///
/// `Clone`, `PartialEq`, `Drop` and the traversals in this crate tolerate
/// very deep successor chains (numerals of guard-sized values), so they are
/// written iteratively where the derived form would recurse once per `S`.
#[derive(Debug)]
pub enum Term {
    Zero,
    Var(VarId),
    Succ(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(v: VarId) -> Term {
        Term::Var(v)
    }

    pub fn succ(t: Term) -> Term {
        Term::Succ(Box::new(t))
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    /// Splits a maximal successor chain: returns the chain length and the
    /// first non-`Succ` subterm.
    pub fn succ_chain(&self) -> (u64, &Term) {
        let mut depth = 0u64;
        let mut cur = self;
        while let Term::Succ(inner) = cur {
            depth += 1;
            cur = inner;
        }
        (depth, cur)
    }

    /// Collects the variables occurring in the term into `out`.
    pub fn collect_vars(&self, out: &mut std::collections::BTreeSet<VarId>) {
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Term::Zero => {}
                Term::Var(v) => {
                    out.insert(*v);
                }
                Term::Succ(inner) => {
                    let (_, tail) = inner.succ_chain();
                    stack.push(tail);
                }
                Term::Add(a, b) | Term::Mul(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
    }

    pub fn contains_var(&self, v: VarId) -> bool {
        let mut vars = std::collections::BTreeSet::new();
        self.collect_vars(&mut vars);
        vars.contains(&v)
    }
}

/// The numeral for `n`: `S` applied `n` times to `0`.
pub fn numeral<N: Into<BigUint>>(n: N) -> Term {
    let n: BigUint = n.into();
    let mut t = Term::Zero;
    let mut i = BigUint::zero();
    let one = BigUint::from(1u8);
    while i < n {
        t = Term::Succ(Box::new(t));
        i += &one;
    }
    t
}

// Deep successor chains would overflow the stack under the derived Drop,
// Clone and PartialEq, so all three unlink or walk the chain in a loop.

impl Drop for Term {
    fn drop(&mut self) {
        let mut stack: Vec<Term> = Vec::new();
        match self {
            Term::Succ(inner) => stack.push(std::mem::replace(inner.as_mut(), Term::Zero)),
            Term::Add(a, b) | Term::Mul(a, b) => {
                stack.push(std::mem::replace(a.as_mut(), Term::Zero));
                stack.push(std::mem::replace(b.as_mut(), Term::Zero));
            }
            _ => {}
        }
        while let Some(mut t) = stack.pop() {
            match &mut t {
                Term::Succ(inner) => stack.push(std::mem::replace(inner.as_mut(), Term::Zero)),
                Term::Add(a, b) | Term::Mul(a, b) => {
                    stack.push(std::mem::replace(a.as_mut(), Term::Zero));
                    stack.push(std::mem::replace(b.as_mut(), Term::Zero));
                }
                _ => {}
            }
        }
    }
}

impl Clone for Term {
    fn clone(&self) -> Term {
        match self {
            Term::Zero => Term::Zero,
            Term::Var(v) => Term::Var(*v),
            Term::Succ(_) => {
                let (depth, tail) = self.succ_chain();
                let mut t = tail.clone();
                for _ in 0..depth {
                    t = Term::Succ(Box::new(t));
                }
                t
            }
            Term::Add(a, b) => Term::Add(Box::new(a.as_ref().clone()), Box::new(b.as_ref().clone())),
            Term::Mul(a, b) => Term::Mul(Box::new(a.as_ref().clone()), Box::new(b.as_ref().clone())),
        }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        let mut stack = vec![(self, other)];
        while let Some((a, b)) = stack.pop() {
            let (da, ta) = a.succ_chain();
            let (db, tb) = b.succ_chain();
            if da != db {
                return false;
            }
            match (ta, tb) {
                (Term::Zero, Term::Zero) => {}
                (Term::Var(u), Term::Var(v)) => {
                    if u != v {
                        return false;
                    }
                }
                (Term::Add(a1, a2), Term::Add(b1, b2))
                | (Term::Mul(a1, a2), Term::Mul(b1, b2)) => {
                    stack.push((a1, b1));
                    stack.push((a2, b2));
                }
                _ => return false,
            }
        }
        true
    }
}

impl Eq for Term {}
