//! Cross-cutting properties: text and code round-trips, normalization
//! adequacy, and evaluator coherence, over both proptest-generated and
//! seeded corpora.

use num_bigint::BigUint;
use proptest::prelude::*;

use indisc_core::corpus::generate_corpus;
use indisc_core::goedel::{pair, unpair};
use indisc_core::{
    eval_budgeted, goedel_decode, goedel_encode, normalize_connectives, parse_formula, render,
    Assignment, Formula, Language, Nat, Term, VarId, Verdict3,
};

fn term_strategy() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::Zero),
        (1u32..5).prop_map(|i| Term::var(VarId::x(i))),
        (0u64..4).prop_map(indisc_core::numeral),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::succ),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::add(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Term::mul(a, b)),
        ]
    })
}

fn formula_strategy() -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        (term_strategy(), term_strategy()).prop_map(|(a, b)| Formula::Eq(a, b)),
        (term_strategy(), term_strategy()).prop_map(|(a, b)| Formula::Lt(a, b)),
    ];
    atom.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            // binders use a disjoint index range so bound terms (over x1..x4)
            // never mention the bound variable
            ((5u32..8), inner.clone()).prop_map(|(i, f)| Formula::exists(VarId::x(i), f)),
            ((5u32..8), inner.clone()).prop_map(|(i, f)| Formula::forall(VarId::x(i), f)),
            ((5u32..8), term_strategy(), inner.clone())
                .prop_map(|(i, t, f)| Formula::bdd_exists(VarId::x(i), t, f)),
            ((5u32..8), term_strategy(), inner)
                .prop_map(|(i, t, f)| Formula::bdd_forall(VarId::x(i), t, f)),
        ]
    })
}

proptest! {
    #[test]
    fn cantor_pairing_round_trips(a in 0u64..1_000_000, b in 0u64..1_000_000) {
        let c = pair(&BigUint::from(a), &BigUint::from(b));
        let (x, y) = unpair(&c);
        prop_assert_eq!(x, BigUint::from(a));
        prop_assert_eq!(y, BigUint::from(b));
    }

    #[test]
    fn render_then_parse_is_identity(f in formula_strategy()) {
        let text = render(&f);
        let back = parse_formula(&text, Language::LA).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn decode_inverts_encode(f in formula_strategy()) {
        let c = goedel_encode(&f);
        prop_assert_eq!(goedel_decode(&c).unwrap(), f);
    }

    #[test]
    fn normalization_is_idempotent_and_preserves_frees(f in formula_strategy()) {
        let n = normalize_connectives(&f);
        prop_assert_eq!(normalize_connectives(&n), n.clone());
        prop_assert_eq!(n.free_vars(), f.free_vars());
    }
}

/// Every proper subformula codes strictly below its superformula.
#[test]
fn code_is_monotone_in_tree_size() {
    for f in generate_corpus(11, 3, 500) {
        let top = goedel_encode(&f).value;
        f.walk(&mut |sub| {
            if sub != &f {
                assert!(
                    goedel_encode(sub).value < top,
                    "subformula {} does not code below {}",
                    render(sub),
                    render(&f)
                );
            }
        });
    }
}

#[test]
fn corpus_round_trips_through_text_and_codes() {
    for f in generate_corpus(5, 4, 500) {
        let text = render(&f);
        assert_eq!(parse_formula(&text, Language::LA).unwrap(), f);
    }
    // codes double in bit length with every tree level, so the code
    // round-trip runs on a shallow corpus
    for f in generate_corpus(5, 2, 500) {
        assert_eq!(goedel_decode(&goedel_encode(&f)).unwrap(), f);
    }
}

fn assignments_for(f: &Formula, seed: u64, max_value: u64) -> Vec<Assignment> {
    use rand_core::{RngCore, SeedableRng};
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let vars: Vec<VarId> = f.free_vars_sorted();
    (0..3)
        .map(|_| {
            let mut a = Assignment::new();
            for v in &vars {
                a.set(*v, Nat::from(rng.next_u64() % (max_value + 1)));
            }
            a
        })
        .collect()
}

/// Normalization preserves three-valued truth: the rewrites are exact in
/// Kleene semantics, not merely classically equivalent. Deep corpora get
/// small assignments: a product bound under values up to 50 already means
/// 2500-wide searches, and they nest.
#[test]
fn normalization_preserves_budgeted_truth() {
    let budget = 24;
    let runs = [(17u64, 1u32, 50u64), (18, 3, 8)];
    for (seed, depth, max_value) in runs {
        for (i, f) in generate_corpus(seed, depth, 150).into_iter().enumerate() {
            let n = normalize_connectives(&f);
            for a in assignments_for(&f, i as u64, max_value) {
                let left = eval_budgeted(&f, &a, budget).unwrap();
                let right = eval_budgeted(&n, &a, budget).unwrap();
                assert_eq!(left, right, "normalization changed {} at {:?}", render(&f), a);
            }
        }
    }
}

/// A definite verdict never flips as the budget grows.
#[test]
fn budgeted_verdicts_are_monotone_in_the_budget() {
    for (i, f) in generate_corpus(23, 2, 200).into_iter().enumerate() {
        for a in assignments_for(&f, 1000 + i as u64, 8) {
            let mut last: Option<Verdict3> = None;
            for w in [3u64, 9, 27] {
                let v = eval_budgeted(&f, &a, w).unwrap();
                if let Some(prev) = last {
                    if prev != Verdict3::Unknown {
                        assert_eq!(prev, v, "verdict flipped for {}", render(&f));
                    }
                }
                last = Some(v);
            }
        }
    }
}

/// Delta_0 classification only looks at binder shape, not binder names.
#[test]
fn delta0_is_stable_under_bound_renaming() {
    fn rename_binders(f: &Formula) -> Formula {
        match f {
            Formula::Eq(..) | Formula::Lt(..) | Formula::InI(..) => f.clone(),
            Formula::Not(g) => Formula::not(rename_binders(g)),
            Formula::Or(a, b) => Formula::or(rename_binders(a), rename_binders(b)),
            Formula::And(a, b) => Formula::and(rename_binders(a), rename_binders(b)),
            Formula::Implies(a, b) => Formula::implies(rename_binders(a), rename_binders(b)),
            Formula::Exists(v, g) => {
                let fresh = VarId::x(v.index + 100);
                Formula::exists(fresh, rename_binders(g).subst_var(*v, &Term::var(fresh)))
            }
            Formula::Forall(v, g) => {
                let fresh = VarId::x(v.index + 100);
                Formula::forall(fresh, rename_binders(g).subst_var(*v, &Term::var(fresh)))
            }
            Formula::BddExists(v, t, g) => {
                let fresh = VarId::x(v.index + 100);
                Formula::bdd_exists(fresh, t.clone(), rename_binders(g).subst_var(*v, &Term::var(fresh)))
            }
            Formula::BddForall(v, t, g) => {
                let fresh = VarId::x(v.index + 100);
                Formula::bdd_forall(fresh, t.clone(), rename_binders(g).subst_var(*v, &Term::var(fresh)))
            }
        }
    }
    for f in generate_corpus(31, 3, 300) {
        assert_eq!(f.is_delta0(), rename_binders(&f).is_delta0());
    }
}
