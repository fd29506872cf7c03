//! Scheme sentences over the expanded language, as syntax and as direct
//! checks.
//!
//! Each scheme exists twice: an emitter that produces the closed sentence
//! over L_A(I), and a direct checker that loops over tuples of the witness
//! set. The two must agree with [`crate::eval::eval_over_expansion`] on the
//! emitted sentence; the checkers are just the fast path.
//!
//! Variable convention: a formula's argument positions are its free
//! variables in canonical order. For the apartness scheme the last position
//! is the witness variable; for the diagonal scheme the first `n` positions
//! are parameters, position `n + 1` is the pivot, and the last `r` are the
//! tuple positions.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::eval::{eval_over_expansion, Assignment, Nat};
use crate::formula::Formula;
use crate::goedel::goedel_encode;
use crate::term::{numeral, Term, VarId};

fn require_la(f: &Formula) -> Result<()> {
    if f.mentions_predicate() {
        return Err(Error::PredicateNotInLanguage { pos: 0 });
    }
    Ok(())
}

fn require_arity(f: &Formula, expected: usize) -> Result<Vec<VarId>> {
    let vars = f.free_vars_sorted();
    if vars.len() != expected {
        return Err(Error::ArityMismatch { expected, found: vars.len() });
    }
    Ok(vars)
}

/// Fresh ordinary variables `x_{base+1} .. x_{base+count}`.
fn fresh_block(base: u32, count: usize) -> Vec<VarId> {
    (1..=count as u32).map(|i| VarId::x(base + i)).collect()
}

/// `target[i] -> replacement[i]` as a substitution.
fn rename(f: &Formula, from: &[VarId], to: &[VarId]) -> Formula {
    let map: Vec<(VarId, VarId)> = from.iter().copied().zip(to.iter().copied()).collect();
    f.subst_free(&move |v| {
        map.iter()
            .find(|(u, _)| *u == v)
            .map(|(_, w)| Term::var(*w))
    })
}

/// `v1 < v2 < ... < vk` as a list of conjuncts (empty for k < 2).
fn chain_lt(vars: &[VarId]) -> Vec<Formula> {
    vars.windows(2)
        .map(|w| Formula::Lt(Term::var(w[0]), Term::var(w[1])))
        .collect()
}

/// Wraps `body` in `forall v (I(v) -> body)` for each variable, innermost
/// last.
fn forall_in_i(vars: &[VarId], body: Formula) -> Formula {
    vars.iter().rev().fold(body, |acc, v| {
        Formula::forall(*v, Formula::implies(Formula::InI(Term::var(*v)), acc))
    })
}

fn guarded(antecedent: Vec<Formula>, body: Formula) -> Formula {
    if antecedent.is_empty() {
        body
    } else {
        Formula::implies(Formula::and_all(antecedent), body)
    }
}

/// The order-indiscernibility sentence for an n-ary formula: any two
/// increasing n-tuples from I satisfy the formula alike.
pub fn emit_indis_sentence(phi: &Formula, n: usize) -> Result<Formula> {
    require_la(phi)?;
    if n == 0 {
        return Err(Error::ArityMismatch { expected: 1, found: 0 });
    }
    let vars = require_arity(phi, n)?;
    let base = phi.max_ordinary_index();
    let xs = fresh_block(base, n);
    let ys = fresh_block(base + n as u32, n);
    let mut antecedent = chain_lt(&xs);
    antecedent.extend(chain_lt(&ys));
    let body = guarded(
        antecedent,
        Formula::iff(rename(phi, &vars, &xs), rename(phi, &vars, &ys)),
    );
    let mut quantified = xs;
    quantified.extend(ys.iter().copied());
    Ok(forall_in_i(&quantified, body))
}

/// The guarded variant: indiscernibility is only required of tuples lying
/// entirely above the formula's own code.
pub fn emit_indis_circ_sentence(phi: &Formula) -> Result<Formula> {
    require_la(phi)?;
    let vars = phi.free_vars_sorted();
    let n = vars.len();
    if n == 0 {
        return Err(Error::ArityMismatch { expected: 1, found: 0 });
    }
    let code = goedel_encode(phi).value;
    let base = phi.max_ordinary_index();
    let xs = fresh_block(base, n);
    let ys = fresh_block(base + n as u32, n);
    let mut antecedent = chain_lt(&xs);
    antecedent.extend(chain_lt(&ys));
    antecedent.push(Formula::Lt(numeral(code.clone()), Term::var(xs[0])));
    antecedent.push(Formula::Lt(numeral(code), Term::var(ys[0])));
    let body = guarded(
        antecedent,
        Formula::iff(rename(phi, &vars, &xs), rename(phi, &vars, &ys)),
    );
    let mut quantified = xs;
    quantified.extend(ys.iter().copied());
    Ok(forall_in_i(&quantified, body))
}

/// The apartness sentence: witnesses for parameters below one element of I
/// appear below the next.
pub fn emit_apart_sentence(phi: &Formula) -> Result<Formula> {
    require_la(phi)?;
    let vars = phi.free_vars_sorted();
    if vars.len() < 2 {
        return Err(Error::ArityMismatch { expected: 2, found: vars.len() });
    }
    let n = vars.len() - 1;
    let witness = vars[n];
    let params = &vars[..n];
    let base = phi.max_ordinary_index();
    let i = VarId::x(base + 1);
    let j = VarId::x(base + 2);
    let fresh_params = fresh_block(base + 2, n);
    let phi_p = rename(phi, params, &fresh_params);
    let inner = Formula::implies(
        Formula::exists(witness, phi_p.clone()),
        Formula::bdd_exists(witness, Term::var(j), phi_p),
    );
    let param_quantified = fresh_params
        .iter()
        .rev()
        .fold(inner, |acc, p| Formula::bdd_forall(*p, Term::var(i), acc));
    let body = Formula::implies(Formula::Lt(Term::var(i), Term::var(j)), param_quantified);
    Ok(forall_in_i(&[i, j], body))
}

/// The diagonal indiscernibility sentence: above a pivot i in I, increasing
/// r-tuples from I look alike to the formula, uniformly in parameters
/// below i.
pub fn emit_indis_plus_sentence(phi: &Formula, n: usize, r: usize) -> Result<Formula> {
    require_la(phi)?;
    if r < 1 {
        return Err(Error::ArityMismatch { expected: n + 2, found: n + 1 });
    }
    let vars = require_arity(phi, n + 1 + r)?;
    let params = &vars[..n];
    let pivot = vars[n];
    let tail = &vars[n + 1..];
    let base = phi.max_ordinary_index();
    let i = VarId::x(base + 1);
    let js = fresh_block(base + 1, r);
    let ks = fresh_block(base + 1 + r as u32, r);
    let fresh_params = fresh_block(base + 1 + 2 * r as u32, n);

    let mut antecedent = chain_lt(&js);
    antecedent.extend(chain_lt(&ks));
    antecedent.push(Formula::Lt(Term::var(i), Term::var(js[0])));
    antecedent.push(Formula::Lt(Term::var(i), Term::var(ks[0])));

    let mut left = rename(phi, params, &fresh_params);
    left = rename(&left, &[pivot], &[i]);
    let right = rename(&left, tail, &ks);
    let left = rename(&left, tail, &js);
    let core = fresh_params
        .iter()
        .rev()
        .fold(Formula::iff(left, right), |acc, p| {
            Formula::bdd_forall(*p, Term::var(i), acc)
        });

    let mut quantified = vec![i];
    quantified.extend(js.iter().copied());
    quantified.extend(ks.iter().copied());
    Ok(forall_in_i(&quantified, guarded(antecedent, core)))
}

/// The relativized order-indiscernibility sentence over a unary predicate
/// theta: a plain L_A sentence quantifying over theta's extension instead
/// of I.
pub fn emit_indis_relativized(phi: &Formula, theta: &Formula) -> Result<Formula> {
    require_la(phi)?;
    require_la(theta)?;
    let theta_vars = require_arity(theta, 1)?;
    let vars = phi.free_vars_sorted();
    let n = vars.len();
    if n == 0 {
        return Err(Error::ArityMismatch { expected: 1, found: 0 });
    }
    let base = phi.max_ordinary_index().max(theta.max_ordinary_index());
    let xs = fresh_block(base, n);
    let ys = fresh_block(base + n as u32, n);
    let mut antecedent = chain_lt(&xs);
    antecedent.extend(chain_lt(&ys));
    for v in xs.iter().chain(ys.iter()) {
        antecedent.push(rename(theta, &theta_vars, &[*v]));
    }
    let body = guarded(
        antecedent,
        Formula::iff(rename(phi, &vars, &xs), rename(phi, &vars, &ys)),
    );
    let mut out = body;
    for v in xs.iter().chain(ys.iter()).rev() {
        out = Formula::forall(*v, out);
    }
    Ok(out)
}

/// Evaluates an emitted (closed) scheme sentence over `([0, N], I)`.
pub fn check_scheme(sentence: &Formula, i_set: &[u64], domain: u64) -> Result<bool> {
    let free = sentence.free_vars();
    if !free.is_empty() {
        return Err(Error::ArityMismatch { expected: 0, found: free.len() });
    }
    eval_over_expansion(sentence, &Assignment::new(), i_set, domain)
}

/// Truth of `phi` at a tuple, quantifiers relativized to `[0, N]`.
pub(crate) fn eval_at(phi: &Formula, vars: &[VarId], values: &[u64], domain: u64) -> Result<bool> {
    let nats: Vec<Nat> = values.iter().map(|&v| Nat::from(v)).collect();
    let a = Assignment::from_pairs(vars, &nats);
    eval_over_expansion(phi, &a, &[], domain)
}

/// Visits increasing `r`-tuples of `items` in lexicographic index order;
/// stops early when the visitor returns `false`.
pub(crate) fn for_each_increasing_tuple(
    items: &[u64],
    r: usize,
    visit: &mut dyn FnMut(&[u64]) -> Result<bool>,
) -> Result<()> {
    if items.len() < r {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..r).collect();
    let mut tuple = vec![0u64; r];
    loop {
        for (t, &i) in tuple.iter_mut().zip(idx.iter()) {
            *t = items[i];
        }
        if !visit(&tuple)? {
            return Ok(());
        }
        // next combination
        let mut pos = r;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            if idx[pos] + (r - pos) < items.len() {
                idx[pos] += 1;
                for p in pos + 1..r {
                    idx[p] = idx[p - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Visits all `n`-tuples over `[0, limit)` whose maximum coordinate is at
/// least `from` (an odometer over the fresh region).
fn for_each_new_param_tuple(
    from: u64,
    limit: u64,
    n: usize,
    visit: &mut dyn FnMut(&[u64]) -> Result<()>,
) -> Result<()> {
    if n == 0 {
        // the empty product has exactly one tuple, visited on first expansion
        if from == 0 {
            visit(&[])?;
        }
        return Ok(());
    }
    if limit == 0 || from >= limit {
        return Ok(());
    }
    let mut tuple = vec![0u64; n];
    loop {
        if tuple.iter().any(|&c| c >= from) {
            visit(&tuple)?;
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < limit {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

/// Direct order-indiscernibility check: `phi` is constant on increasing
/// n-tuples from I.
pub fn check_indis(phi: &Formula, i_set: &[u64], domain: u64) -> Result<bool> {
    require_la(phi)?;
    let vars = phi.free_vars_sorted();
    if vars.is_empty() {
        return Err(Error::ArityMismatch { expected: 1, found: 0 });
    }
    check_domain(i_set, domain)?;
    constant_on_tuples(phi, &vars, i_set, domain)
}

/// Direct guarded check: constancy only over tuples above the formula's
/// code. Vacuously true when no tuple qualifies.
pub fn check_indis_circ(phi: &Formula, i_set: &[u64], domain: u64) -> Result<bool> {
    require_la(phi)?;
    let vars = phi.free_vars_sorted();
    if vars.is_empty() {
        return Err(Error::ArityMismatch { expected: 1, found: 0 });
    }
    check_domain(i_set, domain)?;
    let code = goedel_encode(phi).value;
    let above: Vec<u64> = i_set
        .iter()
        .copied()
        .filter(|&v| BigUint::from(v) > code)
        .collect();
    constant_on_tuples(phi, &vars, &above, domain)
}

fn check_domain(i_set: &[u64], domain: u64) -> Result<()> {
    if i_set.last().is_some_and(|&last| last > domain) {
        return Err(Error::DomainViolation { domain });
    }
    Ok(())
}

fn constant_on_tuples(
    phi: &Formula,
    vars: &[VarId],
    items: &[u64],
    domain: u64,
) -> Result<bool> {
    let mut first: Option<bool> = None;
    let mut constant = true;
    for_each_increasing_tuple(items, vars.len(), &mut |tuple| {
        let v = eval_at(phi, vars, tuple, domain)?;
        match first {
            None => first = Some(v),
            Some(f) if f != v => {
                constant = false;
                return Ok(false);
            }
            _ => {}
        }
        Ok(true)
    })?;
    Ok(constant)
}

/// Incrementally tracks, for a formula with designated witness position,
/// the largest least-witness over all parameter tuples below a moving
/// threshold. Thresholds must be queried in non-decreasing order.
pub(crate) struct WitnessProfile<'a> {
    phi: &'a Formula,
    param_vars: Vec<VarId>,
    witness_var: VarId,
    domain: u64,
    region_end: u64,
    wit_max: Option<u64>,
}

impl<'a> WitnessProfile<'a> {
    /// `phi`'s free variables split into parameters and the witness.
    pub fn new(phi: &'a Formula, params: Vec<VarId>, witness: VarId, domain: u64) -> Self {
        WitnessProfile {
            phi,
            param_vars: params,
            witness_var: witness,
            domain,
            region_end: 0,
            wit_max: None,
        }
    }

    /// Least `y <= domain` with `phi(params, y)`, or `None` when no witness
    /// exists in the domain.
    fn least_witness(&self, params: &[u64]) -> Result<Option<u64>> {
        let mut a = Assignment::new();
        for (v, &val) in self.param_vars.iter().zip(params.iter()) {
            a.set(*v, Nat::from(val));
        }
        for y in 0..=self.domain {
            a.set(self.witness_var, Nat::from(y));
            if eval_over_expansion(self.phi, &a, &[], self.domain)? {
                return Ok(Some(y));
            }
        }
        Ok(None)
    }

    /// Max least-witness over all parameter tuples in `[0, threshold)^n`,
    /// ignoring tuples with no witness at all.
    pub fn wit_max_below(&mut self, threshold: u64) -> Result<Option<u64>> {
        assert!(
            threshold >= self.region_end,
            "thresholds must be non-decreasing"
        );
        let mut wit_max = self.wit_max;
        for_each_new_param_tuple(self.region_end, threshold, self.param_vars.len(), &mut |t| {
            if let Some(w) = self.least_witness(t)? {
                wit_max = Some(wit_max.map_or(w, |m| m.max(w)));
            }
            Ok(())
        })?;
        self.wit_max = wit_max;
        self.region_end = threshold;
        Ok(wit_max)
    }
}

/// Splits a formula of arity >= 2 into apartness shape: all but the last
/// canonical position are parameters, the last is the witness.
pub(crate) fn apart_split(phi: &Formula) -> Result<(Vec<VarId>, VarId)> {
    let vars = phi.free_vars_sorted();
    if vars.len() < 2 {
        return Err(Error::ArityMismatch { expected: 2, found: vars.len() });
    }
    let witness = *vars.last().unwrap();
    Ok((vars[..vars.len() - 1].to_vec(), witness))
}

/// Direct apartness check: for every i < j in I and every parameter tuple
/// below i, a witness anywhere in `[0, N]` implies a witness below j.
pub fn check_apart(phi: &Formula, i_set: &[u64], domain: u64) -> Result<bool> {
    require_la(phi)?;
    check_domain(i_set, domain)?;
    let (params, witness) = apart_split(phi)?;
    let mut profile = WitnessProfile::new(phi, params, witness, domain);
    for (pos, &i) in i_set.iter().enumerate() {
        let wit_max = profile.wit_max_below(i)?;
        if let Some(w) = wit_max {
            for &j in &i_set[pos + 1..] {
                if w >= j {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Direct diagonal-indiscernibility check for the (n, 1 + r) split: for
/// every pivot i in I, the truth pattern of `phi` over parameters below i
/// is the same for every increasing r-tuple from I above i.
pub fn check_indis_plus(
    phi: &Formula,
    n: usize,
    r: usize,
    i_set: &[u64],
    domain: u64,
) -> Result<bool> {
    require_la(phi)?;
    check_domain(i_set, domain)?;
    let vars = require_arity(phi, n + 1 + r)?;
    if r < 1 {
        return Err(Error::ArityMismatch { expected: n + 2, found: n + 1 });
    }
    for (pos, &pivot) in i_set.iter().enumerate() {
        let above = &i_set[pos + 1..];
        let mut first: Option<Vec<bool>> = None;
        let mut ok = true;
        for_each_increasing_tuple(above, r, &mut |tail| {
            let pattern = diag_pattern(phi, &vars, n, pivot, pivot, tail, domain)?;
            match &first {
                None => first = Some(pattern),
                Some(f) if *f != pattern => {
                    ok = false;
                    return Ok(false);
                }
                _ => {}
            }
            Ok(true)
        })?;
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Truth pattern of `phi(params, pivot, tail)` over all parameter tuples
/// in `[0, param_limit)^n`, in odometer order. The full scheme uses
/// `param_limit == pivot`; the miner may cap it.
pub(crate) fn diag_pattern(
    phi: &Formula,
    vars: &[VarId],
    n: usize,
    pivot: u64,
    param_limit: u64,
    tail: &[u64],
    domain: u64,
) -> Result<Vec<bool>> {
    let mut pattern = Vec::new();
    let mut values = vec![0u64; vars.len()];
    values[n] = pivot;
    values[n + 1..].copy_from_slice(tail);
    for_each_new_param_tuple(0, param_limit.min(pivot), n, &mut |params| {
        values[..n].copy_from_slice(params);
        pattern.push(eval_at(phi, vars, &values, domain)?);
        Ok(())
    })?;
    Ok(pattern)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Language;
    use crate::parse::parse_formula;

    fn la(text: &str) -> Formula {
        parse_formula(text, Language::LA).unwrap()
    }

    #[test]
    fn indis_sentence_is_closed_and_matches_direct_check() {
        let phi = la("(x1 + x1) = x2");
        let s = emit_indis_sentence(&phi, 2).unwrap();
        assert!(s.free_vars().is_empty());
        // pair (3,6) satisfies doubling, pair (3,12) does not
        let i = [3u64, 6, 12];
        assert!(!check_scheme(&s, &i, 100).unwrap());
        assert!(!check_indis(&phi, &i, 100).unwrap());
        // x1 < x2 is constant on increasing tuples
        let lt = la("x1 < x2");
        let s2 = emit_indis_sentence(&lt, 2).unwrap();
        assert!(check_scheme(&s2, &i, 100).unwrap());
        assert!(check_indis(&lt, &i, 100).unwrap());
    }

    #[test]
    fn circ_guard_value_is_the_code() {
        let phi = la("x1 < x2");
        let s = emit_indis_circ_sentence(&phi).unwrap();
        // the guard numeral evaluates to the code
        let code = goedel_encode(&phi).value;
        let mut found = false;
        s.walk(&mut |f| {
            if let Formula::Lt(lhs, _) = f {
                if let Ok(v) = crate::eval::eval_term(lhs, &Assignment::new()) {
                    if v == code {
                        found = true;
                    }
                }
            }
        });
        assert!(found);
    }

    #[test]
    fn circ_is_vacuous_below_the_code() {
        let phi = la("(x1 + x1) = x2");
        // I entirely below the code: guard never satisfied
        assert!(check_indis_circ(&phi, &[3, 6, 12], 100).unwrap());
        assert!(!check_indis(&phi, &[3, 6, 12], 100).unwrap());
    }

    #[test]
    fn apartness_examples() {
        let phi = la("(x1 + x1) = x2");
        // witnesses 2x for x < 4 stay below 10
        assert!(check_apart(&phi, &[4, 10], 100).unwrap());
        // x = 3 has witness 6, which is not below 6
        assert!(!check_apart(&phi, &[4, 6], 100).unwrap());
        // no witnesses at all: vacuously true
        let never = la("x2 < 0");
        let never2 = Formula::and(never, la("x1 = x1"));
        assert!(check_apart(&never2, &[4, 6], 100).unwrap());
    }

    #[test]
    fn apart_sentence_agrees_with_direct_check() {
        let phi = la("(x1 + x1) = x2");
        let s = emit_apart_sentence(&phi).unwrap();
        assert!(s.free_vars().is_empty());
        assert_eq!(check_scheme(&s, &[4, 10], 60).unwrap(), true);
        assert_eq!(check_apart(&phi, &[4, 10], 60).unwrap(), true);
        assert_eq!(check_scheme(&s, &[4, 6], 60).unwrap(), false);
        assert_eq!(check_apart(&phi, &[4, 6], 60).unwrap(), false);
    }

    #[test]
    fn diagonal_scheme_on_simple_shapes() {
        // i < j is constant above any pivot
        let phi = la("x1 < x2");
        assert!(check_indis_plus(&phi, 0, 1, &[2, 5, 9], 50).unwrap());
        let s = emit_indis_plus_sentence(&phi, 0, 1).unwrap();
        assert!(check_scheme(&s, &[2, 5, 9], 50).unwrap());

        // (x + i) < j with parameters below i: sensitive to gaps
        let psi = la("(x1 + x2) < x3");
        let tight = [3u64, 4, 5];
        let roomy = [3u64, 10, 30];
        let direct_tight = check_indis_plus(&psi, 1, 1, &tight, 50).unwrap();
        let direct_roomy = check_indis_plus(&psi, 1, 1, &roomy, 50).unwrap();
        let sent = emit_indis_plus_sentence(&psi, 1, 1).unwrap();
        assert_eq!(check_scheme(&sent, &tight, 50).unwrap(), direct_tight);
        assert_eq!(check_scheme(&sent, &roomy, 50).unwrap(), direct_roomy);
        assert!(!direct_tight);
        assert!(direct_roomy);
    }

    #[test]
    fn relativized_sentence_matches_direct_check_on_the_extension() {
        let phi = la("(x1 + x1) = x2");
        let theta = la("x1 = x1"); // everything
        let s = emit_indis_relativized(&phi, &theta).unwrap();
        assert!(s.free_vars().is_empty());
        let n = 12u64;
        let extension: Vec<u64> = (0..=n).collect();
        assert_eq!(
            check_scheme(&s, &[], n).unwrap(),
            check_indis(&phi, &extension, n).unwrap()
        );
        assert!(!check_scheme(&s, &[], n).unwrap());
    }
}
