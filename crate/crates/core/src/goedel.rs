//! Goedel coding of terms and formulas.
//!
//! Every constructor carries a fixed tag; a node's code is
//! `pair(tag, fold of child codes)` under the Cantor pairing
//! `pair(a, b) = (a + b)(a + b + 1)/2 + b`, where the fold of zero children
//! is `0`, of one child is its code, and of several children is the
//! right-nested pairing. Variables are coded as `pair(namespace, index)`
//! with namespace `0` for `x` and `1` for `z`.
//!
//! The scheme is injective and strictly monotone in tree size: a proper
//! subformula's code is strictly smaller than its superformula's. Codes grow
//! doubly exponentially with term depth, so numerals beyond a few dozen `S`
//! applications have astronomically large codes; nothing in this crate
//! encodes emitted guard sentences back.
//!
//! No coding is canonical: everything downstream that compares a formula's
//! code against domain elements (the strict guard in mining and in the
//! membership procedure) is relative to this concrete scheme.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::term::{Namespace, Term, VarId};

/// A formula code. Arbitrary precision; see the module docs for scaling.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GoedelCode {
    pub value: BigUint,
}

const TAG_ZERO: u8 = 0;
const TAG_VAR: u8 = 1;
const TAG_SUCC: u8 = 2;
const TAG_ADD: u8 = 3;
const TAG_MUL: u8 = 4;
const TAG_EQ: u8 = 5;
const TAG_LT: u8 = 6;
const TAG_INI: u8 = 7;
const TAG_NOT: u8 = 8;
const TAG_OR: u8 = 9;
const TAG_AND: u8 = 10;
const TAG_IMPLIES: u8 = 11;
const TAG_EXISTS: u8 = 12;
const TAG_FORALL: u8 = 13;
const TAG_BDD_EXISTS: u8 = 14;
const TAG_BDD_FORALL: u8 = 15;

/// Cantor pairing.
pub fn pair(a: &BigUint, b: &BigUint) -> BigUint {
    let s = a + b;
    (&s * (&s + BigUint::one())) / BigUint::from(2u8) + b
}

/// Inverse of [`pair`].
pub fn unpair(c: &BigUint) -> (BigUint, BigUint) {
    // w = floor((sqrt(8c + 1) - 1) / 2)
    let disc = (c * BigUint::from(8u8) + BigUint::one()).sqrt();
    let w = (&disc - BigUint::one()) / BigUint::from(2u8);
    let t = (&w * (&w + BigUint::one())) / BigUint::from(2u8);
    let b = c - &t;
    let a = &w - &b;
    (a, b)
}

fn tag_code(tag: u8, payload: &BigUint) -> BigUint {
    pair(&BigUint::from(tag), payload)
}

fn var_code(v: &VarId) -> BigUint {
    let ns = match v.ns {
        Namespace::Ordinary => 0u8,
        Namespace::Fresh => 1u8,
    };
    pair(&BigUint::from(ns), &BigUint::from(v.index))
}

fn term_code(t: &Term) -> BigUint {
    match t {
        Term::Zero => tag_code(TAG_ZERO, &BigUint::zero()),
        Term::Var(v) => tag_code(TAG_VAR, &var_code(v)),
        Term::Succ(_) => {
            let (depth, tail) = t.succ_chain();
            let mut c = term_code(tail);
            for _ in 0..depth {
                c = tag_code(TAG_SUCC, &c);
            }
            c
        }
        Term::Add(a, b) => tag_code(TAG_ADD, &pair(&term_code(a), &term_code(b))),
        Term::Mul(a, b) => tag_code(TAG_MUL, &pair(&term_code(a), &term_code(b))),
    }
}

fn formula_code(f: &Formula) -> BigUint {
    match f {
        Formula::Eq(a, b) => tag_code(TAG_EQ, &pair(&term_code(a), &term_code(b))),
        Formula::Lt(a, b) => tag_code(TAG_LT, &pair(&term_code(a), &term_code(b))),
        Formula::InI(t) => tag_code(TAG_INI, &term_code(t)),
        Formula::Not(g) => tag_code(TAG_NOT, &formula_code(g)),
        Formula::Or(a, b) => tag_code(TAG_OR, &pair(&formula_code(a), &formula_code(b))),
        Formula::And(a, b) => tag_code(TAG_AND, &pair(&formula_code(a), &formula_code(b))),
        Formula::Implies(a, b) => tag_code(TAG_IMPLIES, &pair(&formula_code(a), &formula_code(b))),
        Formula::Exists(v, g) => tag_code(TAG_EXISTS, &pair(&var_code(v), &formula_code(g))),
        Formula::Forall(v, g) => tag_code(TAG_FORALL, &pair(&var_code(v), &formula_code(g))),
        Formula::BddExists(v, t, g) => tag_code(
            TAG_BDD_EXISTS,
            &pair(&var_code(v), &pair(&term_code(t), &formula_code(g))),
        ),
        Formula::BddForall(v, t, g) => tag_code(
            TAG_BDD_FORALL,
            &pair(&var_code(v), &pair(&term_code(t), &formula_code(g))),
        ),
    }
}

/// Codes a formula.
pub fn goedel_encode(f: &Formula) -> GoedelCode {
    GoedelCode { value: formula_code(f) }
}

fn not_a_code(c: &BigUint, msg: &str) -> Error {
    Error::NotACode { value: c.to_string(), msg: msg.to_string() }
}

fn decode_var(c: &BigUint) -> Result<VarId> {
    let (ns, idx) = unpair(c);
    let index: u32 = idx
        .try_into()
        .map_err(|_| not_a_code(c, "variable index out of range"))?;
    if index == 0 {
        return Err(not_a_code(c, "variable index must be positive"));
    }
    if ns == BigUint::zero() {
        Ok(VarId::x(index))
    } else if ns == BigUint::one() {
        Ok(VarId::z(index))
    } else {
        Err(not_a_code(c, "unknown variable namespace"))
    }
}

fn decode_term(c: &BigUint) -> Result<Term> {
    let (tag, payload) = unpair(c);
    let tag: u8 = tag.clone().try_into().map_err(|_| not_a_code(c, "tag out of range"))?;
    match tag {
        TAG_ZERO => {
            if payload.is_zero() {
                Ok(Term::Zero)
            } else {
                Err(not_a_code(c, "zero carries a payload"))
            }
        }
        TAG_VAR => Ok(Term::Var(decode_var(&payload)?)),
        TAG_SUCC => {
            // iterative so that numeral codes of moderate depth decode
            // without deep recursion
            let mut depth = 0u64;
            let mut cur = payload;
            loop {
                let (t, p) = unpair(&cur);
                if t == BigUint::from(TAG_SUCC) {
                    depth += 1;
                    cur = p;
                } else {
                    break;
                }
            }
            let mut out = decode_term(&cur)?;
            for _ in 0..=depth {
                out = Term::succ(out);
            }
            Ok(out)
        }
        TAG_ADD => {
            let (a, b) = unpair(&payload);
            Ok(Term::add(decode_term(&a)?, decode_term(&b)?))
        }
        TAG_MUL => {
            let (a, b) = unpair(&payload);
            Ok(Term::mul(decode_term(&a)?, decode_term(&b)?))
        }
        _ => Err(not_a_code(c, "expected a term tag")),
    }
}

fn decode_formula(c: &BigUint) -> Result<Formula> {
    let (tag, payload) = unpair(c);
    let tag: u8 = tag.clone().try_into().map_err(|_| not_a_code(c, "tag out of range"))?;
    match tag {
        TAG_EQ => {
            let (a, b) = unpair(&payload);
            Ok(Formula::Eq(decode_term(&a)?, decode_term(&b)?))
        }
        TAG_LT => {
            let (a, b) = unpair(&payload);
            Ok(Formula::Lt(decode_term(&a)?, decode_term(&b)?))
        }
        TAG_INI => Ok(Formula::InI(decode_term(&payload)?)),
        TAG_NOT => Ok(Formula::not(decode_formula(&payload)?)),
        TAG_OR => {
            let (a, b) = unpair(&payload);
            Ok(Formula::or(decode_formula(&a)?, decode_formula(&b)?))
        }
        TAG_AND => {
            let (a, b) = unpair(&payload);
            Ok(Formula::and(decode_formula(&a)?, decode_formula(&b)?))
        }
        TAG_IMPLIES => {
            let (a, b) = unpair(&payload);
            Ok(Formula::implies(decode_formula(&a)?, decode_formula(&b)?))
        }
        TAG_EXISTS => {
            let (v, g) = unpair(&payload);
            Ok(Formula::exists(decode_var(&v)?, decode_formula(&g)?))
        }
        TAG_FORALL => {
            let (v, g) = unpair(&payload);
            Ok(Formula::forall(decode_var(&v)?, decode_formula(&g)?))
        }
        TAG_BDD_EXISTS | TAG_BDD_FORALL => {
            let (v, rest) = unpair(&payload);
            let (t, g) = unpair(&rest);
            let v = decode_var(&v)?;
            let t = decode_term(&t)?;
            let g = decode_formula(&g)?;
            if t.contains_var(v) {
                return Err(not_a_code(c, "bound term contains the bound variable"));
            }
            Ok(if tag == TAG_BDD_EXISTS {
                Formula::bdd_exists(v, t, g)
            } else {
                Formula::bdd_forall(v, t, g)
            })
        }
        _ => Err(not_a_code(c, "expected a formula tag")),
    }
}

/// Decodes a formula code. Values outside the image of [`goedel_encode`]
/// produce a `NotACode` error.
pub fn goedel_decode(c: &GoedelCode) -> Result<Formula> {
    decode_formula(&c.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_round_trips() {
        for a in 0u32..20 {
            for b in 0u32..20 {
                let c = pair(&BigUint::from(a), &BigUint::from(b));
                let (x, y) = unpair(&c);
                assert_eq!((x, y), (BigUint::from(a), BigUint::from(b)));
            }
        }
    }

    #[test]
    fn code_of_smallest_sentence_is_forced_by_the_scheme() {
        // code(Eq(0,0)) = pair(5, pair(pair(0,0), pair(0,0))) = pair(5, 0) = 15
        let f = Formula::Eq(Term::Zero, Term::Zero);
        assert_eq!(goedel_encode(&f).value, BigUint::from(15u8));
    }

    #[test]
    fn decode_inverts_encode() {
        use crate::parse::parse_formula;
        use crate::formula::Language;
        for text in [
            "0 = 0",
            "x1 < x2",
            "exists y < x . y + y = x",
            "forall v . exists w . v < w",
            "(~x1 = 0 \\/ I(x2))",
        ] {
            let f = parse_formula(text, Language::LAI).unwrap();
            let c = goedel_encode(&f);
            assert_eq!(goedel_decode(&c).unwrap(), f);
        }
    }

    #[test]
    fn non_codes_are_rejected() {
        // tag 1 (Var) with payload pair(0,0): index 0 is invalid
        assert!(goedel_decode(&GoedelCode { value: BigUint::from(1u8) }).is_err());
        // tag 0 with nonzero payload
        assert!(goedel_decode(&GoedelCode { value: BigUint::from(2u8) }).is_err());
    }
}
