//! Mining indiscernible witnesses over `[0, N]` by nested Ramsey thinning,
//! with optional apartness and diagonal refinement.
//!
//! The basic miner thins a candidate pool once per family formula (making
//! the pool one color for that formula's truth on increasing tuples), then
//! extracts the witness by the guard recursion: the first element is the
//! least pool survivor at or above the first guard, and each next element
//! is the least survivor exceeding both its predecessor and the pending
//! guard. Under the strict guard mode the guards are the formulas' codes;
//! relaxed mode (the default, appropriate for concrete formulas) uses 0.
//!
//! The diagonal miner additionally homogenizes, per family formula, the
//! bounded-witness behavior of pairs (which is what the apartness scheme
//! observes) and the truth patterns of tuples above small pivots uniformly
//! in parameters below the pivot (what the diagonal scheme and the
//! satisfaction procedure observe, via the formula's star form).
//!
//! Every witness is post-verified by the direct checkers before it is
//! returned; apartness and diagonal failures are recorded in the check
//! records rather than errored, since neither is guaranteed at finite
//! scale.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::Nat;
use crate::formula::{normalize_connectives, Formula, Language};
use crate::goedel::goedel_encode;
use crate::parse::parse_formula;
use crate::ramsey::{extract_homogeneous, ColoringKey};
use crate::render::render;
use crate::schemes::{
    apart_split, check_apart, check_indis, check_indis_circ, check_indis_plus, diag_pattern,
    eval_at, WitnessProfile,
};
use crate::star::star;
use crate::term::VarId;

/// Guard mode: strict follows the coded-guard recursion, relaxed drops it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GuardMode {
    Strict,
    Relaxed,
}

/// Which schemes a witness has been checked against, per family index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Indis,
    IndisCirc,
    Apart,
    IndisPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeCheck {
    pub scheme: SchemeKind,
    /// Index into the family.
    pub formula: usize,
    pub pass: bool,
}

/// Construction trace kept with a witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MineTrace {
    /// Pool size after each thinning stage (the first entry is the pool).
    pub h_sizes: Vec<usize>,
    /// Fraction of the domain reached by the largest element.
    pub reach: f64,
    /// Pivots covered by diagonal refinement (empty for the basic miner).
    pub diagonal_pivots: Vec<u64>,
}

/// A mined (or hand-built) witness: the set I, the family it was mined
/// for, and the scheme checks it has passed.
#[derive(Debug, Clone, PartialEq)]
pub struct IndiscernibleWitness {
    pub elements: Vec<u64>,
    pub family: Vec<Formula>,
    pub domain: u64,
    pub guard: GuardMode,
    pub passed: Vec<SchemeCheck>,
    pub trace: MineTrace,
}

#[derive(Serialize, Deserialize)]
struct WitnessJson {
    #[serde(rename = "I")]
    i: Vec<u64>,
    family: Vec<String>,
    #[serde(rename = "N")]
    n: u64,
    guard: GuardMode,
    checks: Vec<SchemeCheck>,
    trace: MineTrace,
}

impl IndiscernibleWitness {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(WitnessJson {
            i: self.elements.clone(),
            family: self.family.iter().map(render).collect(),
            n: self.domain,
            guard: self.guard,
            checks: self.passed.clone(),
            trace: self.trace.clone(),
        })
        .expect("witness serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let w: WitnessJson = serde_json::from_value(value.clone())?;
        let family = w
            .family
            .iter()
            .map(|s| parse_formula(s, Language::LA))
            .collect::<Result<Vec<_>>>()?;
        Ok(IndiscernibleWitness {
            elements: w.i,
            family,
            domain: w.n,
            guard: w.guard,
            passed: w.checks,
            trace: w.trace,
        })
    }

    /// Recomputes every recorded check with the direct checkers.
    pub fn recheck(&self) -> Result<Vec<SchemeCheck>> {
        self.passed
            .iter()
            .map(|c| {
                let phi = &self.family[c.formula];
                let pass = match c.scheme {
                    SchemeKind::Indis => check_indis(phi, &self.elements, self.domain)?,
                    SchemeKind::IndisCirc => check_indis_circ(phi, &self.elements, self.domain)?,
                    SchemeKind::Apart => check_apart(phi, &self.elements, self.domain)?,
                    SchemeKind::IndisPlus => {
                        let arity = phi.free_vars_sorted().len();
                        if arity < 2 {
                            return Err(Error::ArityMismatch { expected: 2, found: arity });
                        }
                        check_indis_plus(phi, arity - 2, 1, &self.elements, self.domain)?
                    }
                };
                Ok(SchemeCheck { pass, ..*c })
            })
            .collect()
    }
}

/// Candidate pool shape: a dense initial segment plus a geometric tail,
/// capped in value and size.
#[derive(Debug, Clone)]
pub struct PoolPolicy {
    pub dense_limit: u64,
    pub value_cap: u64,
    pub max_size: usize,
    /// Upper bound on witness length beyond the requested minimum.
    pub witness_len: usize,
    /// Cap on the parameter range enumerated by diagonal star patterns;
    /// late pivots would otherwise cost `pivot^arity` per tuple.
    pub diag_param_cap: u64,
}

impl PoolPolicy {
    pub fn for_domain(domain: u64) -> PoolPolicy {
        PoolPolicy {
            dense_limit: 64,
            value_cap: domain.min(1024),
            max_size: 256,
            witness_len: 10,
            diag_param_cap: 12,
        }
    }

    /// Same shape with the value cap raised to `cap` (still within the
    /// domain).
    pub fn with_value_cap(mut self, cap: u64) -> PoolPolicy {
        self.value_cap = cap;
        self
    }
}

/// The deterministic candidate pool for a domain.
pub fn candidate_pool(domain: u64, policy: &PoolPolicy) -> Vec<u64> {
    let cap = policy.value_cap.min(domain);
    let mut pool: Vec<u64> = (0..=cap.min(policy.dense_limit)).collect();
    let mut v = policy.dense_limit;
    while v < cap {
        v += (v / 8).max(1);
        pool.push(v.min(cap));
    }
    pool.dedup();
    if pool.len() > policy.max_size {
        // evenly spaced subsample, keeping both ends
        let len = pool.len();
        let take = policy.max_size;
        let picked: Vec<u64> = (0..take)
            .map(|t| pool[t * (len - 1) / (take - 1)])
            .collect();
        let mut picked = picked;
        picked.dedup();
        return picked;
    }
    pool
}

fn validate_family(family: &[Formula]) -> Result<Vec<Vec<VarId>>> {
    if family.is_empty() {
        return Err(Error::Config { msg: "family must not be empty".to_string() });
    }
    family
        .iter()
        .map(|phi| {
            if phi.mentions_predicate() {
                return Err(Error::PredicateNotInLanguage { pos: 0 });
            }
            if phi.mentions_fresh() {
                return Err(Error::FreshVariablePresent { var: "z".to_string() });
            }
            let vars = phi.free_vars_sorted();
            if vars.is_empty() {
                return Err(Error::ArityMismatch { expected: 1, found: 0 });
            }
            Ok(vars)
        })
        .collect()
}

fn strict_guards(family: &[Formula], domain: u64, guard: GuardMode) -> Result<Vec<u64>> {
    match guard {
        GuardMode::Relaxed => Ok(vec![0; family.len()]),
        GuardMode::Strict => family
            .iter()
            .map(|phi| {
                let code = goedel_encode(phi).value;
                if code > Nat::from(domain) {
                    return Err(Error::GuardInfeasible {
                        formula: render(phi),
                        domain,
                    });
                }
                Ok(code.to_u64().expect("checked against domain"))
            })
            .collect(),
    }
}

/// Thins the pool once per family formula, by truth on increasing tuples.
fn base_thinning(
    family: &[Formula],
    arities: &[Vec<VarId>],
    domain: u64,
    m: usize,
    mut pool: Vec<u64>,
    h_sizes: &mut Vec<usize>,
) -> Result<Vec<u64>> {
    for (phi, vars) in family.iter().zip(arities.iter()) {
        let mut color = |tuple: &[u64]| -> Result<ColoringKey> {
            Ok(ColoringKey::single(eval_at(phi, vars, tuple, domain)?))
        };
        pool = extract_homogeneous(&pool, vars.len(), &mut color)?;
        h_sizes.push(pool.len());
        if pool.len() < m {
            return Err(Error::InsufficientRamseyRoom { needed: m, best: pool });
        }
    }
    Ok(pool)
}

/// The guard recursion over the final pool.
fn extract_witness(
    h: &[u64],
    guards: &[u64],
    m: usize,
    witness_len: usize,
) -> Result<Vec<u64>> {
    let g0 = guards.first().copied().unwrap_or(0);
    let mut seq: Vec<u64> = Vec::new();
    match h.iter().copied().find(|&x| x >= g0) {
        Some(first) => seq.push(first),
        None => return Err(Error::InsufficientRamseyRoom { needed: m, best: seq }),
    }
    loop {
        let step = seq.len(); // about to pick element number step (0-based)
        let pending_guard = guards.get(step - 1).copied().unwrap_or(0);
        let prev = *seq.last().unwrap();
        match h.iter().copied().find(|&x| x > prev && x > pending_guard) {
            Some(next) => seq.push(next),
            None => break,
        }
    }
    if seq.len() < m {
        return Err(Error::InsufficientRamseyRoom { needed: m, best: seq });
    }
    seq.truncate(m.max(witness_len));
    Ok(seq)
}

fn finish_witness(
    elements: Vec<u64>,
    family: Vec<Formula>,
    domain: u64,
    guard: GuardMode,
    h_sizes: Vec<usize>,
    diagonal_pivots: Vec<u64>,
    diagonal: bool,
) -> Result<IndiscernibleWitness> {
    let mut passed = Vec::new();
    for (t, phi) in family.iter().enumerate() {
        let pass = match guard {
            GuardMode::Relaxed => check_indis(phi, &elements, domain)?,
            GuardMode::Strict => check_indis_circ(phi, &elements, domain)?,
        };
        if !pass {
            return Err(Error::PostVerification {
                scheme: "indis".to_string(),
                formula: render(phi),
            });
        }
        passed.push(SchemeCheck {
            scheme: match guard {
                GuardMode::Relaxed => SchemeKind::Indis,
                GuardMode::Strict => SchemeKind::IndisCirc,
            },
            formula: t,
            pass,
        });
    }
    if diagonal {
        for (t, phi) in family.iter().enumerate() {
            let arity = phi.free_vars_sorted().len();
            if arity >= 2 {
                passed.push(SchemeCheck {
                    scheme: SchemeKind::Apart,
                    formula: t,
                    pass: check_apart(phi, &elements, domain)?,
                });
                passed.push(SchemeCheck {
                    scheme: SchemeKind::IndisPlus,
                    formula: t,
                    pass: check_indis_plus(phi, arity - 2, 1, &elements, domain)?,
                });
            }
        }
    }
    let reach = elements.last().map_or(0.0, |&top| top as f64 / domain as f64);
    Ok(IndiscernibleWitness {
        elements,
        family,
        domain,
        guard,
        passed,
        trace: MineTrace { h_sizes, reach, diagonal_pivots },
    })
}

/// Mines an order-indiscernible witness of size at least `m` for the
/// family over `[0, N]`.
pub fn mine_indiscernibles(
    family: &[Formula],
    domain: u64,
    m: usize,
    guard: GuardMode,
    policy: &PoolPolicy,
) -> Result<IndiscernibleWitness> {
    if m < 2 || domain < m as u64 {
        return Err(Error::Config { msg: format!("need N >= m >= 2, got N={domain}, m={m}") });
    }
    let arities = validate_family(family)?;
    let guards = strict_guards(family, domain, guard)?;
    let pool = candidate_pool(domain, policy);
    let mut h_sizes = vec![pool.len()];
    let h = base_thinning(family, &arities, domain, m, pool, &mut h_sizes)?;
    let elements = extract_witness(&h, &guards, m, policy.witness_len)?;
    finish_witness(elements, family.to_vec(), domain, guard, h_sizes, Vec::new(), false)
}

/// Mines a witness additionally refined for apartness and diagonal
/// indiscernibility. Pivots for the diagonal pass are the first
/// `param_bound` surviving candidates; coverage is recorded in the trace.
pub fn mine_diagonal(
    family: &[Formula],
    domain: u64,
    m: usize,
    param_bound: usize,
    guard: GuardMode,
    policy: &PoolPolicy,
) -> Result<IndiscernibleWitness> {
    if m < 2 || domain < m as u64 {
        return Err(Error::Config { msg: format!("need N >= m >= 2, got N={domain}, m={m}") });
    }
    let arities = validate_family(family)?;
    let guards = strict_guards(family, domain, guard)?;
    let pool = candidate_pool(domain, policy);
    let mut h_sizes = vec![pool.len()];
    let mut h = base_thinning(family, &arities, domain, m, pool, &mut h_sizes)?;

    // apartness refinement: one pass per formula of arity >= 2, extracting
    // the longest chain on which the bounded-witness coloring is constantly
    // good. A pair (i, j) is good when every parameter tuple below i has
    // its least witness below j; the witness maximum is monotone in i, so
    // the greedy least-next chain is a longest all-good subset. When no
    // chain of the requested size exists the pool is left alone and the
    // post-check records the failure.
    for phi in family.iter() {
        let Ok((params, witness_var)) = apart_split(phi) else { continue };
        let mut profile = WitnessProfile::new(phi, params, witness_var, domain);
        let mut chain: Vec<u64> = Vec::new();
        for &x in &h {
            match chain.last() {
                None => chain.push(x),
                Some(&last) => {
                    let wit_max = profile.wit_max_below(last)?;
                    if wit_max.is_none_or(|w| w < x) {
                        chain.push(x);
                    }
                }
            }
        }
        if chain.len() >= m {
            h = chain;
        }
        h_sizes.push(h.len());
    }

    // diagonal refinement at the first `param_bound` pivots: homogenize the
    // truth patterns (over parameters below the pivot) of each formula's
    // canonical diagonal split and of its star form instantiated on the
    // tuple above the pivot
    let stars: Vec<_> = family
        .iter()
        .map(|phi| star(&normalize_connectives(phi)))
        .collect::<Result<Vec<_>>>()?;
    let r_max = stars
        .iter()
        .map(|s| s.k as usize)
        .chain(arities.iter().map(|v| usize::from(v.len() >= 2)))
        .max()
        .unwrap_or(0)
        .max(1);
    let mut diagonal_pivots = Vec::new();
    for t in 0..param_bound {
        if t + r_max >= h.len() {
            break;
        }
        let pivot = h[t];
        let above = h[t + 1..].to_vec();
        let mut color = |tail: &[u64]| -> Result<ColoringKey> {
            let mut bits = Vec::new();
            for ((phi, vars), sr) in family.iter().zip(arities.iter()).zip(stars.iter()) {
                if vars.len() >= 2 {
                    bits.extend(diag_pattern(
                        phi,
                        vars,
                        vars.len() - 2,
                        pivot,
                        policy.diag_param_cap,
                        &tail[..1],
                        domain,
                    )?);
                }
                if sr.k >= 1 {
                    bits.extend(star_pattern(
                        sr,
                        vars,
                        pivot.min(policy.diag_param_cap),
                        &tail[..sr.k as usize],
                    )?);
                }
            }
            Ok(ColoringKey(bits))
        };
        let refined = extract_homogeneous(&above, r_max, &mut color)?;
        h = h[..=t].to_vec();
        h.extend(refined);
        h_sizes.push(h.len());
        if h.len() < m {
            return Err(Error::InsufficientRamseyRoom { needed: m, best: h });
        }
        diagonal_pivots.push(pivot);
    }

    let elements = extract_witness(&h, &guards, m, policy.witness_len)?;
    finish_witness(
        elements,
        family.to_vec(),
        domain,
        guard,
        h_sizes,
        diagonal_pivots,
        true,
    )
}

/// Truth pattern of a star form over original arguments below
/// `param_limit`, with the z-block instantiated at `tail`.
fn star_pattern(
    sr: &crate::star::StarResult,
    orig_vars: &[VarId],
    param_limit: u64,
    tail: &[u64],
) -> Result<Vec<bool>> {
    use crate::eval::{eval_delta0, Assignment};
    let mut bits = Vec::new();
    let n = orig_vars.len();
    if n > 0 && param_limit == 0 {
        return Ok(bits); // no arguments below the limit
    }
    let mut a = Assignment::new();
    for (zv, &val) in sr.zblock.iter().zip(tail.iter()) {
        a.set(*zv, Nat::from(val));
    }
    let mut tuple = vec![0u64; n];
    loop {
        for (v, &val) in orig_vars.iter().zip(tuple.iter()) {
            a.set(*v, Nat::from(val));
        }
        bits.push(eval_delta0(&sr.star, &a)?);
        // odometer over [0, pivot)^n
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(bits);
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < param_limit {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn la(text: &str) -> Formula {
        parse_formula(text, Language::LA).unwrap()
    }

    #[test]
    fn pool_is_dense_then_geometric() {
        let pool = candidate_pool(1024, &PoolPolicy::for_domain(1024));
        assert_eq!(pool[0], 0);
        assert!(pool.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*pool.last().unwrap(), 1024);
        assert!(pool.len() <= 256);
        assert!(pool.contains(&64));
    }

    #[test]
    fn trivial_family_mines_and_passes() {
        let family = vec![la("x1 < x2")];
        let w = mine_indiscernibles(&family, 100, 5, GuardMode::Relaxed, &PoolPolicy::for_domain(100))
            .unwrap();
        assert!(w.elements.len() >= 5);
        assert!(w.passed.iter().all(|c| c.pass));
        assert_eq!(w.recheck().unwrap(), w.passed);
    }

    #[test]
    fn doubling_family_avoids_doubling_pairs() {
        let family = vec![la("(x1 + x1) = x2"), la("x1 < x2")];
        let w = mine_indiscernibles(&family, 200, 4, GuardMode::Relaxed, &PoolPolicy::for_domain(200))
            .unwrap();
        for &a in &w.elements {
            for &b in &w.elements {
                if a < b {
                    assert_ne!(a + a, b, "doubling pair in {:?}", w.elements);
                }
            }
        }
    }

    #[test]
    fn strict_mode_needs_room_for_the_code() {
        let family = vec![la("(x1 + x1) = x2")];
        let err = mine_indiscernibles(&family, 100, 3, GuardMode::Strict, &PoolPolicy::for_domain(100));
        assert!(matches!(err, Err(Error::GuardInfeasible { .. })));
    }

    #[test]
    fn diagonal_witness_passes_apartness() {
        let family = vec![la("(x1 + x1) = x2")];
        let w = mine_diagonal(
            &family,
            2000,
            4,
            6,
            GuardMode::Relaxed,
            &PoolPolicy::for_domain(2000),
        )
        .unwrap();
        let apart: Vec<_> = w
            .passed
            .iter()
            .filter(|c| c.scheme == SchemeKind::Apart)
            .collect();
        assert!(!apart.is_empty());
        assert!(apart.iter().all(|c| c.pass), "checks: {:?}", w.passed);
    }

    #[test]
    fn witness_json_round_trips() {
        let family = vec![la("x1 < x2")];
        let w = mine_indiscernibles(&family, 100, 4, GuardMode::Relaxed, &PoolPolicy::for_domain(100))
            .unwrap();
        let j = w.to_json();
        let back = IndiscernibleWitness::from_json(&j).unwrap();
        assert_eq!(back, w);
        // fixed key set
        let obj = j.as_object().unwrap();
        let keys: Vec<_> = obj.keys().collect();
        assert_eq!(keys, vec!["I", "N", "checks", "family", "guard", "trace"]);
    }
}
