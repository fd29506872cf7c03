//! The star transformation: bounding every unbounded quantifier by a fresh
//! z-variable, in two flavors.
//!
//! [`star`] is the recursive clause form. On input using only negation,
//! disjunction and existentials (plus Delta_0 content):
//!
//! 1. atomic:           `phi* = phi`
//! 2. negation:         `(~phi)* = ~phi*`
//! 3. disjunction:      `(phi1 \/ phi2)* = phi1* \/ phi2*`, z-block shared,
//!    `k = max(k1, k2)`
//! 4. existential:      `(exists y . phi)* = exists y < z1 . phi~*`, where
//!    `phi~*` shifts every `z_i` to `z_{i+1}`
//!
//! Bounded quantifiers are Delta_0 content: the transformation passes
//! through them untouched and they consume no fresh variable.
//!
//! [`star_pnf`] is the prenex variant: bring the formula into prenex normal
//! form (expanding bounded quantifiers, so the matrix is quantifier-free)
//! and bound the i-th prefix quantifier by `z_i`.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::term::{Term, VarId};

/// A transformed formula with its fresh-variable block.
#[derive(Debug, Clone, PartialEq)]
pub struct StarResult {
    /// The Delta_0 output.
    pub star: Formula,
    /// Number of fresh bounds introduced.
    pub k: u32,
    /// The block `z1 .. zk`, in order.
    pub zblock: Vec<VarId>,
}

fn zblock(k: u32) -> Vec<VarId> {
    (1..=k).map(VarId::z).collect()
}

fn check_star_input(f: &Formula) -> Result<()> {
    if let Some(v) = f.all_vars().iter().find(|v| v.is_fresh()) {
        return Err(Error::FreshVariablePresent { var: v.to_string() });
    }
    let mut bad: Option<&'static str> = None;
    f.walk(&mut |g| {
        if bad.is_some() {
            return;
        }
        match g {
            Formula::And(..) => bad = Some("/\\"),
            Formula::Implies(..) => bad = Some("->"),
            Formula::Forall(..) => bad = Some("forall"),
            Formula::BddForall(..) => bad = Some("bounded forall"),
            Formula::InI(..) => bad = Some("I(...)"),
            _ => {}
        }
    });
    if let Some(c) = bad {
        return Err(Error::NotNormalized { connective: c.to_string() });
    }
    Ok(())
}

/// Shifts every z-variable index up by one.
fn shift_fresh(f: &Formula) -> Formula {
    f.subst_free(&|v| {
        if v.is_fresh() {
            Some(Term::var(VarId::z(v.index + 1)))
        } else {
            None
        }
    })
}

fn star_rec(f: &Formula) -> (Formula, u32) {
    match f {
        Formula::Eq(..) | Formula::Lt(..) | Formula::InI(..) => (f.clone(), 0),
        Formula::Not(g) => {
            let (s, k) = star_rec(g);
            (Formula::not(s), k)
        }
        Formula::Or(a, b) => {
            let (sa, ka) = star_rec(a);
            let (sb, kb) = star_rec(b);
            (Formula::or(sa, sb), ka.max(kb))
        }
        Formula::Exists(v, g) => {
            let (s, k) = star_rec(g);
            let shifted = shift_fresh(&s);
            (Formula::bdd_exists(*v, Term::var(VarId::z(1)), shifted), k + 1)
        }
        Formula::BddExists(v, t, g) => {
            let (s, k) = star_rec(g);
            (Formula::bdd_exists(*v, t.clone(), s), k)
        }
        Formula::And(..) | Formula::Implies(..) | Formula::Forall(..) | Formula::BddForall(..) => {
            unreachable!("checked by check_star_input")
        }
    }
}

/// The recursive clause form. Input must be normalized (see
/// [`crate::formula::normalize_connectives`]) and free of z-variables.
pub fn star(f: &Formula) -> Result<StarResult> {
    check_star_input(f)?;
    let (s, k) = star_rec(f);
    Ok(StarResult { star: s, k, zblock: zblock(k) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Quant {
    Ex,
    All,
}

impl Quant {
    fn flip(self) -> Quant {
        match self {
            Quant::Ex => Quant::All,
            Quant::All => Quant::Ex,
        }
    }
}

/// Prenex normal form. Bounded quantifiers are expanded into guarded
/// unbounded ones first (hoisting past a bounded quantifier is not sound),
/// every binder is renamed to a fresh ordinary index in leftmost-outermost
/// order, and the prefix is extracted with left subformulas contributing
/// before right ones. The matrix is quantifier-free.
pub fn to_prenex(f: &Formula) -> Formula {
    let (prefix, matrix) = prenex_parts(f);
    let mut out = matrix;
    for (q, v) in prefix.into_iter().rev() {
        out = match q {
            Quant::Ex => Formula::exists(v, out),
            Quant::All => Formula::forall(v, out),
        };
    }
    out
}

fn prenex_parts(f: &Formula) -> (Vec<(Quant, VarId)>, Formula) {
    let expanded = expand_bounded(f);
    let mut next = expanded.max_ordinary_index() + 1;
    let renamed = rename_binders(&expanded, &mut next);
    extract(&renamed)
}

/// Replaces bounded quantifiers by guarded unbounded ones.
fn expand_bounded(f: &Formula) -> Formula {
    match f {
        Formula::Eq(..) | Formula::Lt(..) | Formula::InI(..) => f.clone(),
        Formula::Not(g) => Formula::not(expand_bounded(g)),
        Formula::Or(a, b) => Formula::or(expand_bounded(a), expand_bounded(b)),
        Formula::And(a, b) => Formula::and(expand_bounded(a), expand_bounded(b)),
        Formula::Implies(a, b) => Formula::implies(expand_bounded(a), expand_bounded(b)),
        Formula::Exists(v, g) => Formula::exists(*v, expand_bounded(g)),
        Formula::Forall(v, g) => Formula::forall(*v, expand_bounded(g)),
        Formula::BddExists(v, t, g) => Formula::exists(
            *v,
            Formula::and(Formula::Lt(Term::var(*v), t.clone()), expand_bounded(g)),
        ),
        Formula::BddForall(v, t, g) => Formula::forall(
            *v,
            Formula::implies(Formula::Lt(Term::var(*v), t.clone()), expand_bounded(g)),
        ),
    }
}

/// Gives every binder a fresh ordinary index, assigned in pre-order.
fn rename_binders(f: &Formula, next: &mut u32) -> Formula {
    match f {
        Formula::Eq(..) | Formula::Lt(..) | Formula::InI(..) => f.clone(),
        Formula::Not(g) => Formula::not(rename_binders(g, next)),
        Formula::Or(a, b) => {
            let a = rename_binders(a, next);
            let b = rename_binders(b, next);
            Formula::or(a, b)
        }
        Formula::And(a, b) => {
            let a = rename_binders(a, next);
            let b = rename_binders(b, next);
            Formula::and(a, b)
        }
        Formula::Implies(a, b) => {
            let a = rename_binders(a, next);
            let b = rename_binders(b, next);
            Formula::implies(a, b)
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let fresh = VarId::x(*next);
            *next += 1;
            let body = g.subst_var(*v, &Term::var(fresh));
            let body = rename_binders(&body, next);
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(fresh, body)
            } else {
                Formula::forall(fresh, body)
            }
        }
        Formula::BddExists(..) | Formula::BddForall(..) => {
            unreachable!("bounded quantifiers expanded before renaming")
        }
    }
}

fn extract(f: &Formula) -> (Vec<(Quant, VarId)>, Formula) {
    match f {
        Formula::Eq(..) | Formula::Lt(..) | Formula::InI(..) => (Vec::new(), f.clone()),
        Formula::Not(g) => {
            let (mut pfx, m) = extract(g);
            for (q, _) in pfx.iter_mut() {
                *q = q.flip();
            }
            (pfx, Formula::not(m))
        }
        Formula::Or(a, b) => {
            let (mut pa, ma) = extract(a);
            let (pb, mb) = extract(b);
            pa.extend(pb);
            (pa, Formula::or(ma, mb))
        }
        Formula::And(a, b) => {
            let (mut pa, ma) = extract(a);
            let (pb, mb) = extract(b);
            pa.extend(pb);
            (pa, Formula::and(ma, mb))
        }
        Formula::Implies(a, b) => {
            let (mut pa, ma) = extract(a);
            for (q, _) in pa.iter_mut() {
                *q = q.flip();
            }
            let (pb, mb) = extract(b);
            pa.extend(pb);
            (pa, Formula::implies(ma, mb))
        }
        Formula::Exists(v, g) => {
            let (pfx, m) = extract(g);
            let mut out = vec![(Quant::Ex, *v)];
            out.extend(pfx);
            (out, m)
        }
        Formula::Forall(v, g) => {
            let (pfx, m) = extract(g);
            let mut out = vec![(Quant::All, *v)];
            out.extend(pfx);
            (out, m)
        }
        Formula::BddExists(..) | Formula::BddForall(..) => {
            unreachable!("bounded quantifiers expanded before extraction")
        }
    }
}

/// The prenex variant: the i-th prefix quantifier is bounded by `z_i`.
/// `k` is the prefix length.
pub fn star_pnf(f: &Formula) -> Result<StarResult> {
    if let Some(v) = f.all_vars().iter().find(|v| v.is_fresh()) {
        return Err(Error::FreshVariablePresent { var: v.to_string() });
    }
    if f.mentions_predicate() {
        return Err(Error::NotNormalized { connective: "I(...)".to_string() });
    }
    let (prefix, matrix) = prenex_parts(f);
    let k = prefix.len() as u32;
    let mut out = matrix;
    for (i, (q, v)) in prefix.into_iter().enumerate().rev() {
        let bound = Term::var(VarId::z(i as u32 + 1));
        out = match q {
            Quant::Ex => Formula::bdd_exists(v, bound, out),
            Quant::All => Formula::bdd_forall(v, bound, out),
        };
    }
    Ok(StarResult { star: out, k, zblock: zblock(k) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{normalize_connectives, Language};
    use crate::parse::parse_formula;
    use crate::render::render;

    fn starred(text: &str) -> StarResult {
        let f = parse_formula(text, Language::LA).unwrap();
        star(&normalize_connectives(&f)).unwrap()
    }

    #[test]
    fn atomic_is_fixed() {
        let r = starred("x1 < x2");
        assert_eq!(render(&r.star), "x1 < x2");
        assert_eq!(r.k, 0);
        assert!(r.zblock.is_empty());
    }

    #[test]
    fn single_existential_gets_z1() {
        let r = starred("exists y . (x + y) = S(0)");
        assert_eq!(render(&r.star), "exists x1 < z1 . (x2 + x1) = 1");
        assert_eq!(r.k, 1);
    }

    #[test]
    fn nested_existentials_shift() {
        let r = starred("~ exists y . ~ exists w . y < w");
        assert_eq!(render(&r.star), "~exists x1 < z1 . ~exists x2 < z2 . x1 < x2");
        assert_eq!(r.k, 2);
        assert_eq!(r.zblock, vec![VarId::z(1), VarId::z(2)]);
    }

    #[test]
    fn disjunction_shares_the_block() {
        let r = starred("((exists y . y = x1) \\/ (exists w . w < x1))");
        assert_eq!(r.k, 1);
        // both disjuncts use z1
        assert_eq!(
            render(&r.star),
            "(exists x2 < z1 . x2 = x1 \\/ exists x3 < z1 . x3 < x1)"
        );
    }

    #[test]
    fn star_output_is_delta0_and_grows_free_vars_by_the_block() {
        let f = parse_formula("exists y . exists w . (y + w) = x1", Language::LA).unwrap();
        let n = normalize_connectives(&f);
        let r = star(&n).unwrap();
        assert!(r.star.is_delta0());
        let mut expected = n.free_vars();
        expected.extend(r.zblock.iter().copied());
        assert_eq!(r.star.free_vars(), expected);
    }

    #[test]
    fn star_rejects_sugar_and_fresh_variables() {
        let f = parse_formula("(0 = 0 /\\ 0 = 0)", Language::LA).unwrap();
        assert!(matches!(star(&f), Err(Error::NotNormalized { .. })));
        let g = parse_formula("z1 = 0", Language::LA).unwrap();
        assert!(matches!(star(&g), Err(Error::FreshVariablePresent { .. })));
    }

    #[test]
    fn bounded_quantifiers_pass_through() {
        let r = starred("exists y < x . y + y = x");
        // normalization keeps the bounded form; star leaves it alone
        assert_eq!(r.k, 0);
        assert_eq!(render(&r.star), "exists x1 < x2 . (x1 + x1) = x2");
    }

    #[test]
    fn prenex_of_quantifier_free_is_identity() {
        let f = parse_formula("x1 < x2", Language::LA).unwrap();
        assert_eq!(to_prenex(&f), f);
        let r = star_pnf(&f).unwrap();
        assert_eq!(r.k, 0);
        assert_eq!(r.star, f);
    }

    #[test]
    fn prenex_hoists_with_fresh_renaming() {
        let f = parse_formula("((exists y . y = x) \\/ (exists y . y < x))", Language::LA).unwrap();
        // y -> x1 and rebinds, x -> x2; fresh renaming starts at x3
        let p = to_prenex(&f);
        assert_eq!(render(&p), "exists x3 . exists x4 . (x3 = x2 \\/ x4 < x2)");
    }

    #[test]
    fn prenex_negation_dualizes() {
        let f = parse_formula("~ exists y . y < x", Language::LA).unwrap();
        let p = to_prenex(&f);
        assert_eq!(render(&p), "forall x3 . ~x3 < x2");
    }

    #[test]
    fn pnf_star_bounds_prefix_in_order() {
        let f = parse_formula("forall v . exists w . v < w", Language::LA).unwrap();
        let r = star_pnf(&f).unwrap();
        assert_eq!(r.k, 2);
        assert_eq!(render(&r.star), "forall x3 < z1 . exists x4 < z2 . x3 < x4");
        assert!(r.star.is_delta0());
    }
}
