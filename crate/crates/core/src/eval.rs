//! Truth evaluation over initial segments of the naturals.
//!
//! Three evaluators with distinct contracts:
//!
//! * [`eval_delta0`] is exact on Delta_0 formulas: every quantifier is
//!   bounded, so the search terminates and the answer is classical truth in
//!   the naturals. Non-Delta_0 input is an error, never a silent budget.
//! * [`eval_budgeted`] is a three-valued Kleene evaluation where unbounded
//!   existentials search `[0, W]`. Finding no witness yields `Unknown`,
//!   never `False`: a definite verdict from this evaluator is always
//!   correct about the naturals.
//! * [`eval_over_expansion`] decides a formula of the expanded language in
//!   the finite structure `([0, N], +, ., S, <, 0, I)`. Unbounded
//!   quantifiers are relativized to `[0, N]` (exactly, no budget); bound
//!   terms whose value exceeds `N` act as `N + 1` for range purposes while
//!   term values themselves are computed exactly.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::term::{Term, VarId};

/// Natural number values. Arbitrary precision: term values and formula
/// codes outgrow machine words quickly.
pub type Nat = BigUint;

/// A finite map from variables to naturals, total on the free variables of
/// whatever it is used to evaluate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Assignment {
    entries: Vec<(VarId, Nat)>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment { entries: Vec::new() }
    }

    pub fn bind(mut self, v: VarId, value: impl Into<Nat>) -> Self {
        self.set(v, value.into());
        self
    }

    pub fn set(&mut self, v: VarId, value: Nat) {
        match self.entries.binary_search_by_key(&v, |(u, _)| *u) {
            Ok(i) => self.entries[i].1 = value,
            Err(i) => self.entries.insert(i, (v, value)),
        }
    }

    pub fn get(&self, v: VarId) -> Option<&Nat> {
        self.entries
            .binary_search_by_key(&v, |(u, _)| *u)
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn remove(&mut self, v: VarId) {
        if let Ok(i) = self.entries.binary_search_by_key(&v, |(u, _)| *u) {
            self.entries.remove(i);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, &Nat)> {
        self.entries.iter().map(|(v, n)| (v, n))
    }

    /// Binds `vars[i] -> values[i]` pairwise.
    pub fn from_pairs(vars: &[VarId], values: &[Nat]) -> Self {
        assert_eq!(vars.len(), values.len());
        let mut a = Assignment::new();
        for (v, n) in vars.iter().zip(values.iter()) {
            a.set(*v, n.clone());
        }
        a
    }
}

/// Three-valued verdicts, ordered `False < Unknown < True` so that
/// disjunction is `max` and conjunction is `min`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict3 {
    False,
    Unknown,
    True,
}

impl Verdict3 {
    pub fn not(self) -> Verdict3 {
        match self {
            Verdict3::False => Verdict3::True,
            Verdict3::Unknown => Verdict3::Unknown,
            Verdict3::True => Verdict3::False,
        }
    }

    pub fn from_bool(b: bool) -> Verdict3 {
        if b {
            Verdict3::True
        } else {
            Verdict3::False
        }
    }

    pub fn to_bool(self) -> Option<bool> {
        match self {
            Verdict3::True => Some(true),
            Verdict3::False => Some(false),
            Verdict3::Unknown => None,
        }
    }
}

/// Evaluates a term. Errors on variables missing from the assignment.
pub fn eval_term(t: &Term, a: &Assignment) -> Result<Nat> {
    let (depth, tail) = t.succ_chain();
    let base = match tail {
        Term::Zero => Nat::zero(),
        Term::Var(v) => a
            .get(*v)
            .cloned()
            .ok_or_else(|| Error::UnboundVariable { var: v.to_string() })?,
        Term::Add(x, y) => eval_term(x, a)? + eval_term(y, a)?,
        Term::Mul(x, y) => eval_term(x, a)? * eval_term(y, a)?,
        Term::Succ(_) => unreachable!("succ_chain returns a non-successor tail"),
    };
    Ok(base + Nat::from(depth))
}

/// Exact truth of a Delta_0 formula in the naturals.
pub fn eval_delta0(f: &Formula, a: &Assignment) -> Result<bool> {
    match f {
        Formula::Eq(s, t) => Ok(eval_term(s, a)? == eval_term(t, a)?),
        Formula::Lt(s, t) => Ok(eval_term(s, a)? < eval_term(t, a)?),
        Formula::InI(_) => Err(Error::PredicateNeedsExpansion),
        Formula::Not(g) => Ok(!eval_delta0(g, a)?),
        Formula::Or(x, y) => Ok(eval_delta0(x, a)? || eval_delta0(y, a)?),
        Formula::And(x, y) => Ok(eval_delta0(x, a)? && eval_delta0(y, a)?),
        Formula::Implies(x, y) => Ok(!eval_delta0(x, a)? || eval_delta0(y, a)?),
        Formula::Exists(v, _) | Formula::Forall(v, _) => Err(Error::NotDelta0 {
            quantifier: v.to_string(),
        }),
        Formula::BddExists(v, bound, g) => {
            let limit = eval_term(bound, a)?;
            let mut a = a.clone();
            let mut val = Nat::zero();
            while val < limit {
                a.set(*v, val.clone());
                if eval_delta0(g, &a)? {
                    return Ok(true);
                }
                val += Nat::one();
            }
            Ok(false)
        }
        Formula::BddForall(v, bound, g) => {
            let limit = eval_term(bound, a)?;
            let mut a = a.clone();
            let mut val = Nat::zero();
            while val < limit {
                a.set(*v, val.clone());
                if !eval_delta0(g, &a)? {
                    return Ok(false);
                }
                val += Nat::one();
            }
            Ok(true)
        }
    }
}

/// Three-valued evaluation with witness searches capped at `W`.
///
/// Unbounded existentials search `[0, W]`; when no witness turns up the
/// result is `Unknown` regardless of how the instances behaved, because the
/// domain above `W` was never examined. Dually, an unbounded universal is
/// `False` on a counterexample and `Unknown` otherwise. Delta_0 subformulas
/// are always exact.
pub fn eval_budgeted(f: &Formula, a: &Assignment, budget: u64) -> Result<Verdict3> {
    match f {
        Formula::Eq(..) | Formula::Lt(..) => Ok(Verdict3::from_bool(eval_delta0(f, a)?)),
        Formula::InI(_) => Err(Error::PredicateNeedsExpansion),
        Formula::Not(g) => Ok(eval_budgeted(g, a, budget)?.not()),
        Formula::Or(x, y) => {
            let l = eval_budgeted(x, a, budget)?;
            if l == Verdict3::True {
                return Ok(Verdict3::True);
            }
            Ok(l.max(eval_budgeted(y, a, budget)?))
        }
        Formula::And(x, y) => {
            let l = eval_budgeted(x, a, budget)?;
            if l == Verdict3::False {
                return Ok(Verdict3::False);
            }
            Ok(l.min(eval_budgeted(y, a, budget)?))
        }
        Formula::Implies(x, y) => {
            let l = eval_budgeted(x, a, budget)?.not();
            if l == Verdict3::True {
                return Ok(Verdict3::True);
            }
            Ok(l.max(eval_budgeted(y, a, budget)?))
        }
        Formula::Exists(v, g) => {
            let mut a = a.clone();
            for val in 0..=budget {
                a.set(*v, Nat::from(val));
                if eval_budgeted(g, &a, budget)? == Verdict3::True {
                    return Ok(Verdict3::True);
                }
            }
            Ok(Verdict3::Unknown)
        }
        Formula::Forall(v, g) => {
            let mut a = a.clone();
            for val in 0..=budget {
                a.set(*v, Nat::from(val));
                if eval_budgeted(g, &a, budget)? == Verdict3::False {
                    return Ok(Verdict3::False);
                }
            }
            Ok(Verdict3::Unknown)
        }
        Formula::BddExists(v, bound, g) => {
            let limit = eval_term(bound, a)?;
            let mut a = a.clone();
            let mut val = Nat::zero();
            let mut acc = Verdict3::False;
            while val < limit {
                a.set(*v, val.clone());
                acc = acc.max(eval_budgeted(g, &a, budget)?);
                if acc == Verdict3::True {
                    return Ok(Verdict3::True);
                }
                val += Nat::one();
            }
            Ok(acc)
        }
        Formula::BddForall(v, bound, g) => {
            let limit = eval_term(bound, a)?;
            let mut a = a.clone();
            let mut val = Nat::zero();
            let mut acc = Verdict3::True;
            while val < limit {
                a.set(*v, val.clone());
                acc = acc.min(eval_budgeted(g, &a, budget)?);
                if acc == Verdict3::False {
                    return Ok(Verdict3::False);
                }
                val += Nat::one();
            }
            Ok(acc)
        }
    }
}

/// Exact truth in the finite expansion `([0, N], I)`.
///
/// `i_set` must be sorted, duplicate-free, and contained in `[0, N]`.
pub fn eval_over_expansion(
    f: &Formula,
    a: &Assignment,
    i_set: &[u64],
    domain: u64,
) -> Result<bool> {
    if let Some(&last) = i_set.last() {
        if last > domain {
            return Err(Error::DomainViolation { domain });
        }
    }
    debug_assert!(i_set.windows(2).all(|w| w[0] < w[1]), "I must be sorted");
    eval_expansion_inner(f, &mut a.clone(), i_set, domain)
}

fn eval_expansion_inner(
    f: &Formula,
    a: &mut Assignment,
    i_set: &[u64],
    domain: u64,
) -> Result<bool> {
    match f {
        Formula::Eq(s, t) => Ok(eval_term(s, a)? == eval_term(t, a)?),
        Formula::Lt(s, t) => Ok(eval_term(s, a)? < eval_term(t, a)?),
        Formula::InI(t) => {
            let val = eval_term(t, a)?;
            Ok(match val.to_u64() {
                Some(v) => i_set.binary_search(&v).is_ok(),
                None => false,
            })
        }
        Formula::Not(g) => Ok(!eval_expansion_inner(g, a, i_set, domain)?),
        Formula::Or(x, y) => Ok(eval_expansion_inner(x, a, i_set, domain)?
            || eval_expansion_inner(y, a, i_set, domain)?),
        Formula::And(x, y) => Ok(eval_expansion_inner(x, a, i_set, domain)?
            && eval_expansion_inner(y, a, i_set, domain)?),
        Formula::Implies(x, y) => Ok(!eval_expansion_inner(x, a, i_set, domain)?
            || eval_expansion_inner(y, a, i_set, domain)?),
        Formula::Exists(v, g) | Formula::BddExists(v, _, g) => {
            let limit = range_limit(f, a, domain)?;
            let saved = a.get(*v).cloned();
            let mut found = false;
            for val in 0..limit {
                a.set(*v, Nat::from(val));
                if eval_expansion_inner(g, a, i_set, domain)? {
                    found = true;
                    break;
                }
            }
            restore(a, *v, saved);
            Ok(found)
        }
        Formula::Forall(v, g) | Formula::BddForall(v, _, g) => {
            let limit = range_limit(f, a, domain)?;
            let saved = a.get(*v).cloned();
            let mut holds = true;
            for val in 0..limit {
                a.set(*v, Nat::from(val));
                if !eval_expansion_inner(g, a, i_set, domain)? {
                    holds = false;
                    break;
                }
            }
            restore(a, *v, saved);
            Ok(holds)
        }
    }
}

/// Exclusive upper end of a quantifier's range inside `[0, N]`: `N + 1` for
/// unbounded quantifiers, and the bound's value clamped to `N + 1` for
/// bounded ones.
fn range_limit(f: &Formula, a: &Assignment, domain: u64) -> Result<u64> {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => Ok(domain + 1),
        Formula::BddExists(_, bound, _) | Formula::BddForall(_, bound, _) => {
            let val = eval_term(bound, a)?;
            Ok(match val.to_u64() {
                Some(v) => v.min(domain + 1),
                None => domain + 1,
            })
        }
        _ => unreachable!("range_limit on a non-quantifier"),
    }
}

fn restore(a: &mut Assignment, v: VarId, saved: Option<Nat>) {
    match saved {
        Some(n) => a.set(v, n),
        None => a.remove(v),
    }
}
