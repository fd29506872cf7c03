//! Formula syntax for L_A and L_A(I), classification, and normalization.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::term::{Term, VarId};

/// Which language a piece of text is parsed in. `LAI` adds the unary
/// predicate `I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Language {
    LA,
    LAI,
}

/// Formulas. `And`, `Implies`, `Forall` and the bounded-forall form are
/// surface sugar as far as the core algorithms are concerned; see
/// [`normalize_connectives`].
///
/// Bounded quantifiers are first-class nodes (with strict `<` bounds) so that
/// the Delta_0 classification and Delta_0 evaluation stay purely syntactic.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Eq(Term, Term),
    Lt(Term, Term),
    /// Membership in the distinguished set, `I(t)`. Only legal in `LAI`.
    InI(Term),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(VarId, Box<Formula>),
    Forall(VarId, Box<Formula>),
    /// `exists v < bound . body`; the bound term must not contain `v`.
    BddExists(VarId, Term, Box<Formula>),
    BddForall(VarId, Term, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn exists(v: VarId, f: Formula) -> Formula {
        Formula::Exists(v, Box::new(f))
    }

    pub fn forall(v: VarId, f: Formula) -> Formula {
        Formula::Forall(v, Box::new(f))
    }

    pub fn bdd_exists(v: VarId, bound: Term, f: Formula) -> Formula {
        Formula::BddExists(v, bound, Box::new(f))
    }

    pub fn bdd_forall(v: VarId, bound: Term, f: Formula) -> Formula {
        Formula::BddForall(v, bound, Box::new(f))
    }

    /// Conjunction of a non-empty list, right-nested.
    pub fn and_all(mut fs: Vec<Formula>) -> Formula {
        let last = fs.pop().expect("and_all of empty list");
        fs.into_iter().rev().fold(last, |acc, f| Formula::and(f, acc))
    }

    /// Free variables, via the usual binder-aware walk.
    pub fn free_vars(&self) -> BTreeSet<VarId> {
        fn go(f: &Formula, bound: &mut Vec<VarId>, out: &mut BTreeSet<VarId>) {
            let term_vars = |t: &Term, bound: &Vec<VarId>, out: &mut BTreeSet<VarId>| {
                let mut vs = BTreeSet::new();
                t.collect_vars(&mut vs);
                for v in vs {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            };
            match f {
                Formula::Eq(a, b) | Formula::Lt(a, b) => {
                    term_vars(a, bound, out);
                    term_vars(b, bound, out);
                }
                Formula::InI(t) => term_vars(t, bound, out),
                Formula::Not(g) => go(g, bound, out),
                Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Exists(v, g) | Formula::Forall(v, g) => {
                    bound.push(*v);
                    go(g, bound, out);
                    bound.pop();
                }
                Formula::BddExists(v, t, g) | Formula::BddForall(v, t, g) => {
                    term_vars(t, bound, out);
                    bound.push(*v);
                    go(g, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Free variables in canonical order (x-namespace ascending, then z).
    pub fn free_vars_sorted(&self) -> Vec<VarId> {
        self.free_vars().into_iter().collect()
    }

    /// All variables occurring anywhere (free or bound).
    pub fn all_vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Eq(a, b) | Formula::Lt(a, b) => {
                a.collect_vars(&mut out);
                b.collect_vars(&mut out);
            }
            Formula::InI(t) => t.collect_vars(&mut out),
            Formula::Exists(v, _) | Formula::Forall(v, _) => {
                out.insert(*v);
            }
            Formula::BddExists(v, t, _) | Formula::BddForall(v, t, _) => {
                out.insert(*v);
                t.collect_vars(&mut out);
            }
            _ => {}
        });
        out
    }

    /// Largest ordinary-namespace index in use, 0 if none.
    pub fn max_ordinary_index(&self) -> u32 {
        self.all_vars()
            .iter()
            .filter(|v| !v.is_fresh())
            .map(|v| v.index)
            .max()
            .unwrap_or(0)
    }

    /// True iff some z-namespace variable occurs (free or bound).
    pub fn mentions_fresh(&self) -> bool {
        self.all_vars().iter().any(|v| v.is_fresh())
    }

    /// True iff the predicate `I` occurs.
    pub fn mentions_predicate(&self) -> bool {
        let mut found = false;
        self.walk(&mut |f| {
            if matches!(f, Formula::InI(_)) {
                found = true;
            }
        });
        found
    }

    /// Pre-order visit of every subformula.
    pub fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a Formula)) {
        visit(self);
        match self {
            Formula::Eq(..) | Formula::Lt(..) | Formula::InI(..) => {}
            Formula::Not(g) => g.walk(visit),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
            Formula::Exists(_, g)
            | Formula::Forall(_, g)
            | Formula::BddExists(_, _, g)
            | Formula::BddForall(_, _, g) => g.walk(visit),
        }
    }

    /// Purely syntactic Delta_0 check: every quantifier node is bounded.
    pub fn is_delta0(&self) -> bool {
        let mut ok = true;
        self.walk(&mut |f| {
            if matches!(f, Formula::Exists(..) | Formula::Forall(..)) {
                ok = false;
            }
        });
        ok
    }

    /// Maximum nesting depth of unbounded `Exists` nodes. Meaningful on
    /// normalized formulas, where no `Forall` remains; bounded quantifiers
    /// do not count.
    pub fn exists_depth(&self) -> u32 {
        match self {
            Formula::Eq(..) | Formula::Lt(..) | Formula::InI(..) => 0,
            Formula::Not(g) => g.exists_depth(),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => {
                a.exists_depth().max(b.exists_depth())
            }
            Formula::Exists(_, g) => g.exists_depth() + 1,
            Formula::Forall(_, g) => g.exists_depth() + 1,
            Formula::BddExists(_, _, g) | Formula::BddForall(_, _, g) => g.exists_depth(),
        }
    }

    /// Checks the bounded-quantifier side condition and, for `LA`, the
    /// absence of the predicate `I`.
    pub fn validate(&self, lang: Language) -> Result<()> {
        let mut err = None;
        self.walk(&mut |f| {
            if err.is_some() {
                return;
            }
            match f {
                Formula::InI(_) if lang == Language::LA => {
                    err = Some(Error::PredicateNotInLanguage { pos: 0 });
                }
                Formula::BddExists(v, t, _) | Formula::BddForall(v, t, _) => {
                    if t.contains_var(*v) {
                        err = Some(Error::BoundVarInBound { var: v.to_string() });
                    }
                }
                _ => {}
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Simultaneous substitution of terms for free variables. The caller is
    /// responsible for capture-freedom; every use in this crate substitutes
    /// either closed terms or variables whose indices lie above everything
    /// bound in `self`.
    pub fn subst_free(&self, map: &dyn Fn(VarId) -> Option<Term>) -> Formula {
        fn term_subst(t: &Term, bound: &Vec<VarId>, map: &dyn Fn(VarId) -> Option<Term>) -> Term {
            match t {
                Term::Zero => Term::Zero,
                Term::Var(v) => {
                    if !bound.contains(v) {
                        if let Some(rep) = map(*v) {
                            return rep;
                        }
                    }
                    Term::Var(*v)
                }
                Term::Succ(_) => {
                    let (depth, tail) = t.succ_chain();
                    let mut out = term_subst(tail, bound, map);
                    for _ in 0..depth {
                        out = Term::succ(out);
                    }
                    out
                }
                Term::Add(a, b) => Term::add(term_subst(a, bound, map), term_subst(b, bound, map)),
                Term::Mul(a, b) => Term::mul(term_subst(a, bound, map), term_subst(b, bound, map)),
            }
        }
        fn go(f: &Formula, bound: &mut Vec<VarId>, map: &dyn Fn(VarId) -> Option<Term>) -> Formula {
            match f {
                Formula::Eq(a, b) => Formula::Eq(term_subst(a, bound, map), term_subst(b, bound, map)),
                Formula::Lt(a, b) => Formula::Lt(term_subst(a, bound, map), term_subst(b, bound, map)),
                Formula::InI(t) => Formula::InI(term_subst(t, bound, map)),
                Formula::Not(g) => Formula::not(go(g, bound, map)),
                Formula::Or(a, b) => Formula::or(go(a, bound, map), go(b, bound, map)),
                Formula::And(a, b) => Formula::and(go(a, bound, map), go(b, bound, map)),
                Formula::Implies(a, b) => Formula::implies(go(a, bound, map), go(b, bound, map)),
                Formula::Exists(v, g) => {
                    bound.push(*v);
                    let out = Formula::exists(*v, go(g, bound, map));
                    bound.pop();
                    out
                }
                Formula::Forall(v, g) => {
                    bound.push(*v);
                    let out = Formula::forall(*v, go(g, bound, map));
                    bound.pop();
                    out
                }
                Formula::BddExists(v, t, g) => {
                    let t = term_subst(t, bound, map);
                    bound.push(*v);
                    let out = Formula::bdd_exists(*v, t, go(g, bound, map));
                    bound.pop();
                    out
                }
                Formula::BddForall(v, t, g) => {
                    let t = term_subst(t, bound, map);
                    bound.push(*v);
                    let out = Formula::bdd_forall(*v, t, go(g, bound, map));
                    bound.pop();
                    out
                }
            }
        }
        go(self, &mut Vec::new(), map)
    }

    /// Substitutes a single free variable.
    pub fn subst_var(&self, v: VarId, replacement: &Term) -> Formula {
        self.subst_free(&|u| if u == v { Some(replacement.clone()) } else { None })
    }
}

/// Rewrites a formula into the fragment used by the star transformation:
/// only `Eq`/`Lt`/`InI` atoms, `Not`, `Or`, unbounded `Exists`, and the
/// bounded-exists form survive.
///
/// `And` and `Implies` go through De Morgan, `Forall` through duality, and
/// the bounded-forall form becomes a negated bounded-exists. Bounded
/// quantifiers themselves are kept first-class: they are Delta_0 content and
/// consume no fresh variables downstream.
pub fn normalize_connectives(f: &Formula) -> Formula {
    match f {
        Formula::Eq(..) | Formula::Lt(..) | Formula::InI(..) => f.clone(),
        Formula::Not(g) => Formula::not(normalize_connectives(g)),
        Formula::Or(a, b) => Formula::or(normalize_connectives(a), normalize_connectives(b)),
        Formula::And(a, b) => Formula::not(Formula::or(
            Formula::not(normalize_connectives(a)),
            Formula::not(normalize_connectives(b)),
        )),
        Formula::Implies(a, b) => {
            Formula::or(Formula::not(normalize_connectives(a)), normalize_connectives(b))
        }
        Formula::Exists(v, g) => Formula::exists(*v, normalize_connectives(g)),
        Formula::Forall(v, g) => Formula::not(Formula::exists(
            *v,
            Formula::not(normalize_connectives(g)),
        )),
        Formula::BddExists(v, t, g) => Formula::bdd_exists(*v, t.clone(), normalize_connectives(g)),
        Formula::BddForall(v, t, g) => Formula::not(Formula::bdd_exists(
            *v,
            t.clone(),
            Formula::not(normalize_connectives(g)),
        )),
    }
}

/// True iff the formula lies in the normalized fragment.
pub fn is_normalized(f: &Formula) -> bool {
    let mut ok = true;
    f.walk(&mut |g| {
        if matches!(
            g,
            Formula::And(..) | Formula::Implies(..) | Formula::Forall(..) | Formula::BddForall(..)
        ) {
            ok = false;
        }
    });
    ok
}
