//! Desk-scale toolkit for order indiscernibles and partial satisfaction
//! over initial segments of the naturals: a formula language with Goedel
//! coding, exact and budgeted evaluators, the star transformation, Ramsey
//! mining of indiscernible witnesses, and the membership procedure with
//! its audits.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod formula;
pub mod goedel;
pub mod mine;
pub mod parse;
pub mod ramsey;
pub mod render;
pub mod satclass;
pub mod schemes;
pub mod star;
pub mod term;

pub use error::{Error, Result};
pub use eval::{eval_budgeted, eval_delta0, eval_over_expansion, eval_term, Assignment, Nat, Verdict3};
pub use formula::{normalize_connectives, Formula, Language};
pub use goedel::{goedel_decode, goedel_encode, GoedelCode};
pub use mine::{
    candidate_pool, mine_diagonal, mine_indiscernibles, GuardMode, IndiscernibleWitness,
    MineTrace, PoolPolicy, SchemeCheck, SchemeKind,
};
pub use parse::parse_formula;
pub use ramsey::{ramsey_monochromatic, ColoringKey};
pub use render::render;
pub use satclass::{
    cofinal_stability_audit, definable_class_check, nabla_batch, sigma_membership,
    sigma_membership_with, tarski_audit, verify_nabla, NablaOutcome, NablaReport, SatVerdict,
    StarVariant,
};
pub use schemes::{
    check_apart, check_indis, check_indis_circ, check_indis_plus, check_scheme,
    emit_apart_sentence, emit_indis_circ_sentence, emit_indis_plus_sentence,
    emit_indis_relativized, emit_indis_sentence,
};
pub use star::{star, star_pnf, to_prenex, StarResult};
pub use term::{numeral, Namespace, Term, VarId};
