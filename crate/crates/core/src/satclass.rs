//! The membership procedure over a witness and its audits.
//!
//! Membership of a pair (formula, arguments) is decided by: star the
//! normalized formula, pick the first guard element j of I above every
//! argument (and above the formula's code in strict mode), take the next k
//! elements of I as the z-block, and evaluate the Delta_0 star form
//! exactly.
//!
//! The audits compare this against direct truth (with a witness-search
//! budget), against Tarski's recursive conditions, and against the same
//! procedure run on a cofinal tail of I. Disagreements are first-class
//! results carrying the witness's apartness status for the formula: at
//! finite scale the procedure is only faithful where apartness holds, and
//! showing where it breaks is part of the point.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{eval_budgeted, eval_delta0, eval_over_expansion, Assignment, Nat};
use crate::formula::{normalize_connectives, Formula};
use crate::goedel::goedel_encode;
use crate::mine::{GuardMode, IndiscernibleWitness};
use crate::render::render;
use crate::schemes::WitnessProfile;
use crate::star::{star, star_pnf, StarResult};
use crate::term::VarId;

/// Which star form the procedure uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StarVariant {
    Clause,
    Prenex,
}

/// The decision for one (formula, arguments) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SatVerdict {
    pub member: bool,
    /// The guard element chosen from I.
    pub j: u64,
    /// The k elements of I directly above j, bound to the z-block.
    pub iblock: Vec<u64>,
    pub star_used: StarResult,
    pub delta_trace: Option<DeltaTrace>,
}

/// Rendered record of the final Delta_0 evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaTrace {
    pub formula: String,
    pub assignment: Vec<(String, u64)>,
}

impl SatVerdict {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "member": self.member,
            "j": self.j,
            "iblock": self.iblock,
            "star": render(&self.star_used.star),
            "k": self.star_used.k,
            "trace": self.delta_trace,
        })
    }
}

fn checked_args(phi: &Formula, args: &[u64]) -> Result<Vec<VarId>> {
    if phi.mentions_predicate() {
        return Err(Error::PredicateNotInLanguage { pos: 0 });
    }
    let vars = phi.free_vars_sorted();
    if vars.len() != args.len() {
        return Err(Error::ArityMismatch { expected: vars.len(), found: args.len() });
    }
    Ok(vars)
}

/// Decides membership per the procedure. Arguments map to the formula's
/// free variables in canonical order.
pub fn sigma_membership(
    phi: &Formula,
    args: &[u64],
    witness: &IndiscernibleWitness,
    guard: GuardMode,
) -> Result<SatVerdict> {
    sigma_membership_with(phi, args, witness, guard, StarVariant::Clause, false)
}

pub fn sigma_membership_with(
    phi: &Formula,
    args: &[u64],
    witness: &IndiscernibleWitness,
    guard: GuardMode,
    variant: StarVariant,
    with_trace: bool,
) -> Result<SatVerdict> {
    let vars = checked_args(phi, args)?;
    let sr = match variant {
        StarVariant::Clause => star(&normalize_connectives(phi))?,
        StarVariant::Prenex => star_pnf(phi)?,
    };

    let code = match guard {
        GuardMode::Strict => Some(goedel_encode(phi).value),
        GuardMode::Relaxed => None,
    };
    let above_args = |x: u64| args.iter().all(|&a| a < x);
    let above_code = |x: u64| code.as_ref().is_none_or(|c| &Nat::from(x) > c);
    let jpos = match witness
        .elements
        .iter()
        .position(|&x| above_args(x) && above_code(x))
    {
        Some(p) => p,
        None => {
            if let Some(c) = &code {
                if witness
                    .elements
                    .iter()
                    .all(|&x| &Nat::from(x) <= c)
                {
                    return Err(Error::GuardInfeasible {
                        formula: render(phi),
                        domain: witness.elements.last().copied().unwrap_or(0),
                    });
                }
            }
            return Err(Error::IExhausted {
                msg: format!("no element of I lies above the arguments {args:?}"),
            });
        }
    };
    let j = witness.elements[jpos];
    let iblock: Vec<u64> = witness.elements[jpos + 1..]
        .iter()
        .copied()
        .take(sr.k as usize)
        .collect();
    if iblock.len() < sr.k as usize {
        return Err(Error::IExhausted {
            msg: format!(
                "need {} elements of I above the guard {j}, found {}",
                sr.k,
                iblock.len()
            ),
        });
    }

    let mut a = Assignment::new();
    for (v, &val) in vars.iter().zip(args.iter()) {
        a.set(*v, Nat::from(val));
    }
    for (zv, &val) in sr.zblock.iter().zip(iblock.iter()) {
        a.set(*zv, Nat::from(val));
    }
    let member = eval_delta0(&sr.star, &a)?;
    let delta_trace = with_trace.then(|| DeltaTrace {
        formula: render(&sr.star),
        assignment: vars
            .iter()
            .zip(args.iter())
            .map(|(v, &x)| (v.to_string(), x))
            .chain(sr.zblock.iter().zip(iblock.iter()).map(|(v, &x)| (v.to_string(), x)))
            .collect(),
    });
    Ok(SatVerdict { member, j, iblock, star_used: sr, delta_trace })
}

/// Apartness status of a formula over a witness: every unbounded
/// existential subformula of the normalized form passes the apartness
/// check. `None` when there is no unbounded existential.
pub fn apartness_status(phi: &Formula, witness: &IndiscernibleWitness) -> Result<Option<bool>> {
    let normalized = normalize_connectives(phi);
    let mut subs: Vec<(Formula, VarId)> = Vec::new();
    normalized.walk(&mut |g| {
        if let Formula::Exists(v, body) = g {
            subs.push((body.as_ref().clone(), *v));
        }
    });
    if subs.is_empty() {
        return Ok(None);
    }
    for (body, wvar) in subs {
        let params: Vec<VarId> = body
            .free_vars_sorted()
            .into_iter()
            .filter(|v| *v != wvar && !v.is_fresh())
            .collect();
        let mut profile = WitnessProfile::new(&body, params, wvar, witness.domain);
        for (pos, &i) in witness.elements.iter().enumerate() {
            let wit_max = profile.wit_max_below(i)?;
            if let Some(w) = wit_max {
                if witness.elements[pos + 1..].iter().any(|&j| w >= j) {
                    return Ok(Some(false));
                }
            }
        }
    }
    Ok(Some(true))
}

/// Outcome of comparing the procedure against direct (budgeted) truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NablaOutcome {
    Agree,
    Disagree,
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct NablaReport {
    pub formula: String,
    pub args: Vec<u64>,
    pub outcome: NablaOutcome,
    pub member: bool,
    pub direct: String,
    pub j: u64,
    pub iblock: Vec<u64>,
    /// Apartness status of the formula's existential subformulas over the
    /// witness; absent when the formula has none.
    pub apartness_ok: Option<bool>,
}

/// Compares procedure membership with budgeted direct truth.
pub fn verify_nabla(
    phi: &Formula,
    args: &[u64],
    witness: &IndiscernibleWitness,
    budget: u64,
    guard: GuardMode,
    variant: StarVariant,
) -> Result<NablaReport> {
    let vars = checked_args(phi, args)?;
    let verdict = sigma_membership_with(phi, args, witness, guard, variant, false)?;
    let nats: Vec<Nat> = args.iter().map(|&v| Nat::from(v)).collect();
    let a = Assignment::from_pairs(&vars, &nats);
    let direct = eval_budgeted(phi, &a, budget)?;
    let outcome = match direct.to_bool() {
        None => NablaOutcome::Undetermined,
        Some(d) if d == verdict.member => NablaOutcome::Agree,
        Some(_) => NablaOutcome::Disagree,
    };
    let apartness_ok = apartness_status(phi, witness)?;
    Ok(NablaReport {
        formula: render(phi),
        args: args.to_vec(),
        outcome,
        member: verdict.member,
        direct: format!("{direct:?}"),
        j: verdict.j,
        iblock: verdict.iblock,
        apartness_ok,
    })
}

/// Runs [`verify_nabla`] over a corpus in parallel, preserving order.
pub fn nabla_batch(
    corpus: &[(Formula, Vec<u64>)],
    witness: &IndiscernibleWitness,
    budget: u64,
    guard: GuardMode,
    variant: StarVariant,
) -> Result<Vec<NablaReport>> {
    corpus
        .par_iter()
        .map(|(phi, args)| verify_nabla(phi, args, witness, budget, guard, variant))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct ClauseStats {
    pub checked: usize,
    pub passed: usize,
}

impl ClauseStats {
    fn record(&mut self, pass: bool) {
        self.checked += 1;
        self.passed += usize::from(pass);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TarskiItem {
    pub formula: String,
    pub args: Vec<u64>,
    pub clause: String,
    pub pass: bool,
    /// Disjunction only: both sides picked the same guard element.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub same_j: Option<bool>,
    /// Existential only: apartness status of the formula over the witness.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub apartness_ok: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TarskiReport {
    pub items: Vec<TarskiItem>,
    pub negation: ClauseStats,
    pub disjunction_same_j: ClauseStats,
    pub disjunction_diff_j: ClauseStats,
    pub existential_apart_ok: ClauseStats,
    pub existential_apart_failed: ClauseStats,
}

fn restrict_args(parent_vars: &[VarId], parent_args: &[u64], child: &Formula) -> Vec<u64> {
    child
        .free_vars_sorted()
        .iter()
        .map(|v| {
            let pos = parent_vars
                .iter()
                .position(|u| u == v)
                .expect("child free variables are a subset of the parent's");
            parent_args[pos]
        })
        .collect()
}

/// Audits Tarski's recursive conditions for the membership relation on a
/// corpus, which is first normalized and closed under the negation and
/// disjunction subformula steps.
pub fn tarski_audit(
    corpus: &[(Formula, Vec<u64>)],
    witness: &IndiscernibleWitness,
    guard: GuardMode,
    variant: StarVariant,
) -> Result<TarskiReport> {
    // closure under immediate subformulas where the arguments carry over
    let mut worklist: Vec<(Formula, Vec<u64>)> = corpus
        .iter()
        .map(|(f, a)| (normalize_connectives(f), a.clone()))
        .collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut items: Vec<(Formula, Vec<u64>)> = Vec::new();
    while let Some((f, args)) = worklist.pop() {
        let key = (render(&f), args.clone());
        if !seen.insert(key) {
            continue;
        }
        let vars = f.free_vars_sorted();
        match &f {
            Formula::Not(g) => {
                worklist.push((g.as_ref().clone(), restrict_args(&vars, &args, g)));
            }
            Formula::Or(x, y) => {
                worklist.push((x.as_ref().clone(), restrict_args(&vars, &args, x)));
                worklist.push((y.as_ref().clone(), restrict_args(&vars, &args, y)));
            }
            _ => {}
        }
        items.push((f, args));
    }
    items.sort_by(|a, b| (render(&a.0), &a.1).cmp(&(render(&b.0), &b.1)));

    let audited: Vec<Option<TarskiItem>> = items
        .par_iter()
        .map(|(f, args)| audit_one(f, args, witness, guard, variant))
        .collect::<Result<Vec<_>>>()?;

    let mut report = TarskiReport {
        items: Vec::new(),
        negation: ClauseStats::default(),
        disjunction_same_j: ClauseStats::default(),
        disjunction_diff_j: ClauseStats::default(),
        existential_apart_ok: ClauseStats::default(),
        existential_apart_failed: ClauseStats::default(),
    };
    for item in audited.into_iter().flatten() {
        match (item.clause.as_str(), item.same_j, item.apartness_ok) {
            ("negation", _, _) => report.negation.record(item.pass),
            ("disjunction", Some(true), _) => report.disjunction_same_j.record(item.pass),
            ("disjunction", _, _) => report.disjunction_diff_j.record(item.pass),
            ("existential", _, Some(false)) => report.existential_apart_failed.record(item.pass),
            ("existential", _, _) => report.existential_apart_ok.record(item.pass),
            _ => {}
        }
        report.items.push(item);
    }
    Ok(report)
}

fn audit_one(
    f: &Formula,
    args: &[u64],
    witness: &IndiscernibleWitness,
    guard: GuardMode,
    variant: StarVariant,
) -> Result<Option<TarskiItem>> {
    let vars = f.free_vars_sorted();
    let sigma = |g: &Formula, ga: &[u64]| -> Result<SatVerdict> {
        sigma_membership_with(g, ga, witness, guard, variant, false)
    };
    match f {
        Formula::Not(g) => {
            let whole = sigma(f, args)?;
            let inner = sigma(g, &restrict_args(&vars, args, g))?;
            Ok(Some(TarskiItem {
                formula: render(f),
                args: args.to_vec(),
                clause: "negation".to_string(),
                pass: whole.member == !inner.member,
                same_j: None,
                apartness_ok: None,
            }))
        }
        Formula::Or(x, y) => {
            let whole = sigma(f, args)?;
            let left = sigma(x, &restrict_args(&vars, args, x))?;
            let right = sigma(y, &restrict_args(&vars, args, y))?;
            Ok(Some(TarskiItem {
                formula: render(f),
                args: args.to_vec(),
                clause: "disjunction".to_string(),
                pass: whole.member == (left.member || right.member),
                same_j: Some(whole.j == left.j && whole.j == right.j),
                apartness_ok: None,
            }))
        }
        Formula::Exists(v, body) => {
            let whole = sigma(f, args)?;
            // the witness bound justified by apartness: arguments sit below
            // the guard j, so witnesses (when any exist) sit below the next
            // element of I, which is exactly the z1 value the membership
            // evaluation searched under
            let bound = whole.iblock.first().copied().unwrap_or(whole.j);
            let body_vars = body.free_vars_sorted();
            let mut found = false;
            match body_vars.iter().position(|u| u == v) {
                Some(pos) => {
                    // the body's argument vector is the parent's with the
                    // bound variable's slot scanning b < j
                    let mut with_b: Vec<u64> = body_vars
                        .iter()
                        .map(|u| {
                            if u == v {
                                0
                            } else {
                                args[vars.iter().position(|w| w == u).expect("free in parent")]
                            }
                        })
                        .collect();
                    for b in 0..bound {
                        with_b[pos] = b;
                        if sigma(body, &with_b)?.member {
                            found = true;
                            break;
                        }
                    }
                }
                None => {
                    // vacuous binder: any b works, so only bound > 0 matters
                    if bound > 0 {
                        found = sigma(body, &restrict_args(&vars, args, body))?.member;
                    }
                }
            }
            Ok(Some(TarskiItem {
                formula: render(f),
                args: args.to_vec(),
                clause: "existential".to_string(),
                pass: whole.member == found,
                same_j: None,
                apartness_ok: apartness_status(f, witness)?,
            }))
        }
        _ => Ok(None),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CofinalItem {
    pub formula: String,
    pub args: Vec<u64>,
    pub member_full: bool,
    pub member_tail: bool,
    pub identical: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CofinalReport {
    pub tail_start: usize,
    pub items: Vec<CofinalItem>,
    pub identical: usize,
    pub total: usize,
}

/// Compares membership under I against membership under the tail of I from
/// `tail_start` on, across a corpus.
pub fn cofinal_stability_audit(
    corpus: &[(Formula, Vec<u64>)],
    witness: &IndiscernibleWitness,
    tail_start: usize,
    guard: GuardMode,
    variant: StarVariant,
) -> Result<CofinalReport> {
    if tail_start + 2 > witness.elements.len() {
        return Err(Error::TailTooShort {
            start: tail_start,
            len: witness.elements.len().saturating_sub(tail_start),
        });
    }
    let tail = IndiscernibleWitness {
        elements: witness.elements[tail_start..].to_vec(),
        ..witness.clone()
    };
    let items: Vec<CofinalItem> = corpus
        .par_iter()
        .map(|(f, args)| {
            let full = sigma_membership_with(f, args, witness, guard, variant, false)?;
            let tail_v = sigma_membership_with(f, args, &tail, guard, variant, false)
                .map_err(|e| match e {
                    Error::IExhausted { .. } => Error::TailTooShort {
                        start: tail_start,
                        len: tail.elements.len(),
                    },
                    other => other,
                })?;
            Ok(CofinalItem {
                formula: render(f),
                args: args.clone(),
                member_full: full.member,
                member_tail: tail_v.member,
                identical: full.member == tail_v.member,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let identical = items.iter().filter(|i| i.identical).count();
    let total = items.len();
    Ok(CofinalReport { tail_start, items, identical, total })
}

#[derive(Debug, Clone, Serialize)]
pub struct DefinableClassItem {
    pub formula: String,
    pub indis_pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DefinableClassReport {
    pub theta: String,
    pub extension_size: usize,
    pub max_element: Option<u64>,
    pub reach: f64,
    /// Whether the extension reaches the top decile of the domain (the
    /// finite stand-in for "defines an unbounded set").
    pub top_decile: bool,
    pub per_formula: Vec<DefinableClassItem>,
}

/// Checks whether a unary formula defines an indiscernible class for the
/// family over `[0, N]`: computes the extension, reports its reach, and
/// checks order indiscernibility of the extension for each family member.
pub fn definable_class_check(
    theta: &Formula,
    family: &[Formula],
    domain: u64,
) -> Result<DefinableClassReport> {
    if theta.mentions_predicate() {
        return Err(Error::PredicateNotInLanguage { pos: 0 });
    }
    let tvars = theta.free_vars_sorted();
    if tvars.len() != 1 {
        return Err(Error::ArityMismatch { expected: 1, found: tvars.len() });
    }
    let tv = tvars[0];
    let extension: Vec<u64> = (0..=domain)
        .into_par_iter()
        .map(|m| {
            let a = Assignment::new().bind(tv, m);
            Ok(eval_over_expansion(theta, &a, &[], domain)?.then_some(m))
        })
        .collect::<Result<Vec<Option<u64>>>>()?
        .into_iter()
        .flatten()
        .collect();
    let max_element = extension.last().copied();
    let reach = max_element.map_or(0.0, |top| top as f64 / domain as f64);
    let per_formula = family
        .iter()
        .map(|phi| {
            Ok(DefinableClassItem {
                formula: render(phi),
                indis_pass: crate::schemes::check_indis(phi, &extension, domain)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DefinableClassReport {
        theta: render(theta),
        extension_size: extension.len(),
        max_element,
        reach,
        top_decile: reach >= 0.9,
        per_formula,
    })
}
