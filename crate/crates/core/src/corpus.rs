//! Corpus files: one formula per line, `#` comments, and a seeded
//! generator for test corpora.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::formula::{normalize_connectives, Formula, Language};
use crate::parse::parse_formula;
use crate::render::render;
use crate::term::{numeral, Term, VarId};

/// Parses a corpus file body. Blank lines and `#` comments are skipped.
pub fn parse_corpus(text: &str, lang: Language) -> Result<Vec<Formula>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f = parse_formula(line, lang).map_err(|e| Error::Corpus {
            line: lineno + 1,
            source: Box::new(e),
        })?;
        out.push(f);
    }
    Ok(out)
}

/// Renders a corpus with per-formula metadata comments.
pub fn write_corpus(formulas: &[Formula]) -> String {
    let mut out = String::new();
    for f in formulas {
        let arity = f.free_vars().len();
        let edepth = normalize_connectives(f).exists_depth();
        out.push_str(&format!("# arity={arity} edepth={edepth}\n{}\n", render(f)));
    }
    out
}

/// Deterministic pseudo-random formula corpus over the grammar.
///
/// `depth` bounds connective/quantifier nesting; identical seeds give
/// byte-identical corpora. Only the ordinary namespace and the plain
/// language are generated.
pub fn generate_corpus(seed: u64, depth: u32, count: usize) -> Vec<Formula> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count).map(|_| gen_formula(&mut rng, depth, 3)).collect()
}

fn pick(rng: &mut ChaCha20Rng, n: u64) -> u64 {
    rng.next_u64() % n
}

fn gen_term(rng: &mut ChaCha20Rng, depth: u32, var_pool: u32) -> Term {
    let choice = if depth == 0 { pick(rng, 3) } else { pick(rng, 6) };
    match choice {
        0 => Term::Zero,
        1 => numeral(pick(rng, 4)),
        2 => Term::var(VarId::x(pick(rng, var_pool as u64) as u32 + 1)),
        3 => Term::succ(gen_term(rng, depth - 1, var_pool)),
        4 => Term::add(gen_term(rng, depth - 1, var_pool), gen_term(rng, depth - 1, var_pool)),
        _ => Term::mul(gen_term(rng, depth - 1, var_pool), gen_term(rng, depth - 1, var_pool)),
    }
}

fn gen_atom(rng: &mut ChaCha20Rng, var_pool: u32) -> Formula {
    let a = gen_term(rng, 1, var_pool);
    let b = gen_term(rng, 1, var_pool);
    if pick(rng, 2) == 0 {
        Formula::Eq(a, b)
    } else {
        Formula::Lt(a, b)
    }
}

fn gen_formula(rng: &mut ChaCha20Rng, depth: u32, var_pool: u32) -> Formula {
    if depth == 0 {
        return gen_atom(rng, var_pool);
    }
    match pick(rng, 9) {
        0 | 1 => gen_atom(rng, var_pool),
        2 => Formula::not(gen_formula(rng, depth - 1, var_pool)),
        3 => Formula::or(
            gen_formula(rng, depth - 1, var_pool),
            gen_formula(rng, depth - 1, var_pool),
        ),
        4 => Formula::and(
            gen_formula(rng, depth - 1, var_pool),
            gen_formula(rng, depth - 1, var_pool),
        ),
        5 => Formula::implies(
            gen_formula(rng, depth - 1, var_pool),
            gen_formula(rng, depth - 1, var_pool),
        ),
        6 | 7 => {
            // quantify over a fresh slot so the bound variable is never in
            // its own bound term
            let v = VarId::x(var_pool + depth);
            let body = gen_body_with(rng, depth - 1, var_pool, v);
            if pick(rng, 2) == 0 {
                Formula::exists(v, body)
            } else {
                Formula::forall(v, body)
            }
        }
        _ => {
            let v = VarId::x(var_pool + depth);
            let bound = gen_term(rng, 1, var_pool);
            let body = gen_body_with(rng, depth - 1, var_pool, v);
            if pick(rng, 2) == 0 {
                Formula::bdd_exists(v, bound, body)
            } else {
                Formula::bdd_forall(v, bound, body)
            }
        }
    }
}

/// Body generator that can also mention the newly bound variable.
fn gen_body_with(rng: &mut ChaCha20Rng, depth: u32, var_pool: u32, extra: VarId) -> Formula {
    let body = gen_formula(rng, depth, var_pool);
    // splice the bound variable into a random atom position by conjoining
    // a cheap atom mentioning it
    match pick(rng, 3) {
        0 => body,
        1 => Formula::and(Formula::Lt(Term::var(extra), gen_term(rng, 1, var_pool)), body),
        _ => Formula::or(Formula::Eq(Term::var(extra), gen_term(rng, 1, var_pool)), body),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let a = generate_corpus(1, 2, 50);
        let b = generate_corpus(1, 2, 50);
        assert_eq!(a, b);
        let c = generate_corpus(2, 2, 50);
        assert_ne!(a, c);
    }

    #[test]
    fn depth_zero_is_quantifier_free() {
        for f in generate_corpus(1, 0, 10) {
            assert!(f.is_delta0());
            assert_eq!(normalize_connectives(&f).exists_depth(), 0);
        }
    }

    #[test]
    fn corpus_round_trips_through_text() {
        let formulas = generate_corpus(7, 3, 40);
        let text = write_corpus(&formulas);
        let parsed = parse_corpus(&text, Language::LA).unwrap();
        assert_eq!(parsed, formulas);
    }

    #[test]
    fn corpus_errors_carry_line_numbers() {
        let text = "# fine\n0 = 0\nexists y y\n";
        match parse_corpus(text, Language::LA) {
            Err(Error::Corpus { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected corpus error, got {other:?}"),
        }
    }
}
