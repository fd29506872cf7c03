//! Acceptance suite. Each test prints one pass/fail line; tolerances and
//! thresholds are pinned in the assertions.
//!
//! The shared fixture mines one diagonal witness over N = 100000 for a
//! twelve-formula family (existential depth up to two, additive witness
//! growth) and derives 300 argument cases from a fixed grid under the
//! witness structure.

use std::sync::OnceLock;
use std::time::Instant;

use rand_core::{RngCore, SeedableRng};

use indisc_core::corpus::generate_corpus;
use indisc_core::mine::MineTrace;
use indisc_core::schemes::{check_indis_circ, check_indis_plus};
use indisc_core::{
    check_apart, check_indis, check_scheme, cofinal_stability_audit, emit_apart_sentence,
    emit_indis_circ_sentence, emit_indis_plus_sentence, emit_indis_sentence, mine_diagonal,
    mine_indiscernibles, nabla_batch, normalize_connectives, parse_formula, render, star,
    star_pnf, tarski_audit, verify_nabla, Formula, GuardMode, IndiscernibleWitness, Language,
    NablaOutcome, PoolPolicy, SchemeKind, StarVariant, Term, VarId,
};

fn la(text: &str) -> Formula {
    parse_formula(text, Language::LA).unwrap()
}

/// The audit family: twelve two-variable formulas, existential depth 0-2.
/// Unbounded existentials occur positively and are quickly witnessed (or
/// sit behind a cheap guard conjunct), and witness growth is at most
/// 2x + 1, so a doubling chain supports apartness for all of them.
fn audit_family() -> Vec<Formula> {
    [
        "x1 < x2",
        "(x1 + x1) = x2",
        "exists y < x2 . (y + y) = x1",
        "(x1 < x2 /\\ ~ x1 = x2)",
        "(x1 < x2 /\\ exists y . (x1 + y) = x2)",
        "(x1 < S(x2) /\\ exists y . ((x1 + x1) + y) = (x2 + x2))",
        "(x1 < x2 /\\ exists y . (y + y) = (x1 + x1))",
        "~ exists y < x2 . (x1 + S(y)) = x2",
        "exists y . (x1 + x2) < y",
        "(x1 + x1) < x2",
        "exists y . exists w . ((x1 + y) = w \\/ w < x2)",
        "(x1 < x2 /\\ exists y . exists w . (((x2 + x2) < y) /\\ ((y + x1) < w)))",
    ]
    .iter()
    .map(|t| la(t))
    .collect()
}

struct Fixture {
    family: Vec<Formula>,
    witness: IndiscernibleWitness,
    cases: Vec<(Formula, Vec<u64>)>,
    mine_seconds: f64,
}

static FIXTURE: OnceLock<Fixture> = OnceLock::new();

fn fixture() -> &'static Fixture {
    FIXTURE.get_or_init(|| {
        let family = audit_family();
        let start = Instant::now();
        let witness = mine_diagonal(
            &family,
            100_000,
            6,
            10,
            GuardMode::Relaxed,
            &PoolPolicy::for_domain(100_000),
        )
        .expect("diagonal mining succeeds");
        let mine_seconds = start.elapsed().as_secs_f64();
        // 25 argument pairs per formula from the grid {0..4}^2: 300 cases,
        // all below the witness's guard room
        let mut cases = Vec::new();
        for phi in &family {
            for a in 0u64..5 {
                for b in 0u64..5 {
                    cases.push((phi.clone(), vec![a, b]));
                }
            }
        }
        assert_eq!(cases.len(), 300);
        Fixture { family, witness, cases, mine_seconds }
    })
}

/// Compositional re-derivation of the star laws at every node, with the
/// z-shift checked against an independent substitution.
fn verify_star_shape(f: &Formula) -> (Formula, u32) {
    fn shift(f: &Formula) -> Formula {
        f.subst_free(&|v| {
            v.is_fresh().then(|| Term::var(VarId::z(v.index + 1)))
        })
    }
    match f {
        Formula::Eq(..) | Formula::Lt(..) => (f.clone(), 0),
        Formula::Not(g) => {
            let (s, k) = verify_star_shape(g);
            (Formula::not(s), k)
        }
        Formula::Or(a, b) => {
            let (sa, ka) = verify_star_shape(a);
            let (sb, kb) = verify_star_shape(b);
            (Formula::or(sa, sb), ka.max(kb))
        }
        Formula::Exists(v, g) => {
            let (s, k) = verify_star_shape(g);
            // z1 appears exactly once, as the new bound; the embedded star
            // has every z index shifted up by one
            (
                Formula::bdd_exists(*v, Term::var(VarId::z(1)), shift(&s)),
                k + 1,
            )
        }
        Formula::BddExists(v, t, g) => {
            let (s, k) = verify_star_shape(g);
            (Formula::bdd_exists(*v, t.clone(), s), k)
        }
        other => panic!("unexpected node in normalized formula: {other:?}"),
    }
}

#[test]
fn criterion_1_star_transformation_laws() {
    let start = Instant::now();
    let corpus = generate_corpus(2026, 4, 500);
    assert_eq!(corpus.len(), 500);
    for f in &corpus {
        let n = normalize_connectives(f);
        let sr = star(&n).expect("star on normalized input");
        assert!(sr.star.is_delta0(), "not Delta_0: {}", render(&sr.star));
        assert_eq!(sr.k, n.exists_depth(), "k-law broken for {}", render(f));
        let (expected, expected_k) = verify_star_shape(&n);
        assert_eq!(sr.star, expected, "clause shape broken for {}", render(f));
        assert_eq!(sr.k, expected_k);
        let mut frees = n.free_vars();
        frees.extend(sr.zblock.iter().copied());
        assert_eq!(sr.star.free_vars(), frees, "free variables off for {}", render(f));

        let pr = star_pnf(f).expect("prenex star");
        assert!(pr.star.is_delta0());
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 5.0, "criterion 1 took {secs:.2} s, limit 5 s");
    println!("criterion 1: PASS — 500/500 star laws hold, {secs:.2} s");
}

#[test]
fn criterion_2_nabla_transcription() {
    let fx = fixture();
    // the mined witness passes the apartness check for every family member
    let apart: Vec<_> = fx
        .witness
        .passed
        .iter()
        .filter(|c| c.scheme == SchemeKind::Apart)
        .collect();
    assert_eq!(apart.len(), fx.family.len());
    for c in &apart {
        assert!(
            c.pass,
            "apartness failed for family formula {}",
            render(&fx.family[c.formula])
        );
    }

    let start = Instant::now();
    let reports = nabla_batch(
        &fx.cases,
        &fx.witness,
        10_000,
        GuardMode::Relaxed,
        StarVariant::Clause,
    )
    .unwrap();
    let agree = reports.iter().filter(|r| r.outcome == NablaOutcome::Agree).count();
    let disagree = reports.iter().filter(|r| r.outcome == NablaOutcome::Disagree).count();
    let undetermined =
        reports.iter().filter(|r| r.outcome == NablaOutcome::Undetermined).count();
    assert_eq!(disagree, 0, "unexpected disagreements: {:#?}", reports
        .iter()
        .filter(|r| r.outcome == NablaOutcome::Disagree)
        .collect::<Vec<_>>());
    assert_eq!(agree + undetermined, 300);
    let secs = fx.mine_seconds + start.elapsed().as_secs_f64();
    assert!(secs < 60.0, "criterion 2 took {secs:.2} s, limit 60 s");
    println!(
        "criterion 2: PASS — witness I={:?} over N=100000, 300 cases: {agree} agree, 0 disagree, undetermined rate {:.2}% ({:.2} s incl. mining)",
        fx.witness.elements,
        100.0 * undetermined as f64 / 300.0,
        secs
    );
}

#[test]
fn criterion_3_apartness_is_necessary() {
    // a witness too dense at the bottom for the doubling formula
    let doubling = la("(x1 + x1) = x2");
    let witness = IndiscernibleWitness {
        elements: vec![4, 6, 13, 27],
        family: vec![doubling.clone()],
        domain: 100,
        guard: GuardMode::Relaxed,
        passed: vec![],
        trace: MineTrace { h_sizes: vec![], reach: 0.0, diagonal_pivots: vec![] },
    };
    assert!(!check_apart(&doubling, &witness.elements, witness.domain).unwrap());

    let phi = la("exists y . (x1 + x1) = y");
    let report = verify_nabla(
        &phi,
        &[3],
        &witness,
        100,
        GuardMode::Relaxed,
        StarVariant::Clause,
    )
    .unwrap();
    assert_eq!(report.outcome, NablaOutcome::Disagree);
    assert_eq!(report.apartness_ok, Some(false));
    println!(
        "criterion 3: PASS — witness {:?} fails apartness and produces a flagged disagreement (member={}, direct={})",
        witness.elements, report.member, report.direct
    );
}

#[test]
fn criterion_4_tarski_audit() {
    let fx = fixture();
    let report = tarski_audit(&fx.cases, &fx.witness, GuardMode::Relaxed, StarVariant::Clause)
        .unwrap();
    assert!(report.negation.checked > 0);
    assert_eq!(report.negation.passed, report.negation.checked, "negation clause failures");
    let disj_checked = report.disjunction_same_j.checked + report.disjunction_diff_j.checked;
    let disj_passed = report.disjunction_same_j.passed + report.disjunction_diff_j.passed;
    assert!(disj_checked > 0);
    assert_eq!(disj_passed, disj_checked, "disjunction clause failures");
    assert!(report.existential_apart_ok.checked > 0);
    assert_eq!(
        report.existential_apart_ok.passed, report.existential_apart_ok.checked,
        "existential clause failed on apartness-verified formulas"
    );
    println!(
        "criterion 4: PASS — negation {}/{}, disjunction {}/{}, existential (apartness-verified) {}/{}",
        report.negation.passed,
        report.negation.checked,
        disj_passed,
        disj_checked,
        report.existential_apart_ok.passed,
        report.existential_apart_ok.checked,
    );
}

/// Re-runs one recorded check on a tail of the witness.
fn tail_check(w: &IndiscernibleWitness, cut: usize, check: &indisc_core::SchemeCheck) -> bool {
    let tail = &w.elements[cut..];
    let phi = &w.family[check.formula];
    match check.scheme {
        SchemeKind::Indis => check_indis(phi, tail, w.domain).unwrap(),
        SchemeKind::IndisCirc => check_indis_circ(phi, tail, w.domain).unwrap(),
        SchemeKind::Apart => check_apart(phi, tail, w.domain).unwrap(),
        SchemeKind::IndisPlus => {
            let arity = phi.free_vars().len();
            check_indis_plus(phi, arity - 2, 1, tail, w.domain).unwrap()
        }
    }
}

#[test]
fn criterion_5_tail_closure() {
    let fx = fixture();
    let small_family = vec![la("x1 < x2")];
    let small = mine_indiscernibles(
        &small_family,
        300,
        5,
        GuardMode::Relaxed,
        &PoolPolicy::for_domain(300),
    )
    .unwrap();
    let growth_family = vec![la("(x1 + x1) = x2"), la("(x1 + x1) < x2")];
    let growth = mine_diagonal(
        &growth_family,
        2000,
        4,
        6,
        GuardMode::Relaxed,
        &PoolPolicy::for_domain(2000),
    )
    .unwrap();

    let mut cuts_checked = 0usize;
    for w in [&fx.witness, &small, &growth] {
        for cut in 1..=w.elements.len().saturating_sub(2) {
            for check in w.passed.iter().filter(|c| c.pass) {
                assert!(
                    tail_check(w, cut, check),
                    "tail {:?} lost {:?} for {}",
                    &w.elements[cut..],
                    check.scheme,
                    render(&w.family[check.formula])
                );
                cuts_checked += 1;
            }
        }
    }
    println!("criterion 5: PASS — {cuts_checked} tail re-checks all passed");
}

#[test]
fn criterion_6_cofinal_stability() {
    let fx = fixture();
    let len = fx.witness.elements.len();
    let mut audited = 0usize;
    for tail_start in 1..=len.saturating_sub(3) {
        let report = cofinal_stability_audit(
            &fx.cases,
            &fx.witness,
            tail_start,
            GuardMode::Relaxed,
            StarVariant::Clause,
        )
        .unwrap();
        assert_eq!(
            report.identical, report.total,
            "membership changed on tail from {tail_start}: {:#?}",
            report.items.iter().filter(|i| !i.identical).collect::<Vec<_>>()
        );
        audited += report.total;
    }
    println!("criterion 6: PASS — membership identical across {audited} (case, tail) pairs");
}

#[test]
fn criterion_7_checker_and_sentence_agreement() {
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(42);
    let pool = generate_corpus(9, 1, 600);
    let unary: Vec<&Formula> = pool.iter().filter(|f| f.free_vars().len() == 1).collect();
    let binary: Vec<&Formula> = pool.iter().filter(|f| f.free_vars().len() == 2).collect();
    assert!(unary.len() >= 40, "need unary formulas, got {}", unary.len());
    assert!(binary.len() >= 40, "need binary formulas, got {}", binary.len());

    let mut agreements = 0usize;
    for t in 0..500usize {
        let domain = 8 + rng.next_u64() % 25;
        let size = 2 + (rng.next_u64() % 3) as usize;
        let mut elements: Vec<u64> = (0..size * 3)
            .map(|_| rng.next_u64() % (domain + 1))
            .collect();
        elements.sort_unstable();
        elements.dedup();
        elements.truncate(size.max(2));
        if elements.len() < 2 {
            elements = vec![0, domain.max(1)];
        }

        let (direct, sentence) = match t % 4 {
            0 => {
                let phi = unary[(rng.next_u64() as usize) % unary.len()];
                (
                    check_indis(phi, &elements, domain).unwrap(),
                    emit_indis_sentence(phi, 1).unwrap(),
                )
            }
            1 => {
                let phi = binary[(rng.next_u64() as usize) % binary.len()];
                (
                    check_indis(phi, &elements, domain).unwrap(),
                    emit_indis_sentence(phi, 2).unwrap(),
                )
            }
            2 => {
                let phi = binary[(rng.next_u64() as usize) % binary.len()];
                (
                    check_apart(phi, &elements, domain).unwrap(),
                    emit_apart_sentence(phi).unwrap(),
                )
            }
            _ => {
                let phi = binary[(rng.next_u64() as usize) % binary.len()];
                (
                    check_indis_plus(phi, 0, 1, &elements, domain).unwrap(),
                    emit_indis_plus_sentence(phi, 0, 1).unwrap(),
                )
            }
        };
        let via_sentence = check_scheme(&sentence, &elements, domain).unwrap();
        assert_eq!(
            direct, via_sentence,
            "checker and sentence disagree on triple {t} (I={elements:?}, N={domain})"
        );
        agreements += 1;
    }
    assert_eq!(agreements, 500);
    println!("criterion 7: PASS — 500/500 randomized triples agree");
}

/// The guarded emitter and its direct checker agree too. The emitted
/// sentence spells the code out as a numeral, so this runs on formulas
/// whose codes are small enough to evaluate.
#[test]
fn guarded_sentence_agrees_with_direct_check_at_code_scale() {
    use num_traits::ToPrimitive;
    for text in ["0 < x1", "x1 < 1", "x1 = x1"] {
        let phi = la(text);
        let code = indisc_core::goedel_encode(&phi)
            .value
            .to_u64()
            .expect("small code");
        let domain = code + 2000;
        // straddle the code: tuples entirely below are exempt, tuples above
        // must behave alike
        let elements = vec![code / 2, code + 1, code + 700, code + 1600];
        let direct = check_indis_circ(&phi, &elements, domain).unwrap();
        let sentence = emit_indis_circ_sentence(&phi).unwrap();
        let via_sentence = check_scheme(&sentence, &elements, domain).unwrap();
        assert_eq!(direct, via_sentence, "guarded disagreement for {text} (code {code})");

        // with I entirely below the code the scheme is vacuous
        let below = vec![code / 4, code / 2];
        assert!(check_indis_circ(&phi, &below, domain).unwrap());
        assert!(check_scheme(&sentence, &below, domain).unwrap());
    }
    println!("guarded scheme agreement: PASS");
}

#[test]
fn criterion_8_prenex_variant_agreement() {
    let fx = fixture();
    let mut identical = 0usize;
    for (phi, args) in &fx.cases {
        let clause = indisc_core::sigma_membership_with(
            phi,
            args,
            &fx.witness,
            GuardMode::Relaxed,
            StarVariant::Clause,
            false,
        )
        .unwrap();
        let prenex = indisc_core::sigma_membership_with(
            phi,
            args,
            &fx.witness,
            GuardMode::Relaxed,
            StarVariant::Prenex,
            false,
        )
        .unwrap();
        assert_eq!(
            clause.member, prenex.member,
            "variants disagree on {} at {args:?}",
            render(phi)
        );
        identical += 1;
    }
    assert_eq!(identical, 300);
    println!("criterion 8: PASS — clause and prenex membership identical on 300/300 cases");
}
