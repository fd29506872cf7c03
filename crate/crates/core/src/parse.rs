//! Formula parser.
//!
//! The accepted surface syntax (whitespace-insensitive):
//!
//! ```text
//! term    := sum
//! sum     := product { "+" product }            (left-associative)
//! product := factor { "*" factor }              (left-associative)
//! factor  := "0" | numeral | var | "S" "(" term ")" | "(" term ")"
//! var     := "x" digits | "z" digits | single letter a..y (sugar)
//! atom    := term "=" term | term "<" term | "I" "(" term ")"
//! formula := atom | "~" formula
//!          | "(" formula ("\/" | "/\" | "->") formula ")"
//!          | ("exists" | "forall") var [ "<" term ] "." formula
//! ```
//!
//! This is a mild superset of the canonical output: unparenthesized `+`/`*`
//! chains and decimal numerals are accepted on input, while [`crate::render`]
//! always emits fully parenthesized operators and decimal numerals.
//!
//! Sugar letters (`a`..`y`, including bare `x` and `y`) map into the ordinary
//! namespace in order of first use, starting above the largest explicit `x`
//! index in the text, so sugar can never collide with explicit names. `z` is
//! reserved for the fresh namespace and always needs an index.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::formula::{Formula, Language};
use crate::term::{numeral, Term, VarId};

/// Numeral literals above this would allocate one node per unit.
const MAX_NUMERAL: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Eq,
    Lt,
    Tilde,
    Orr,
    Andd,
    Arrow,
    Dot,
    Plus,
    Star,
    Number(BigUint),
    Ident(String),
    Exists,
    Forall,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src: src.as_bytes(), pos: 0 };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            if lx.pos >= lx.src.len() {
                return Ok(out);
            }
            let start = lx.pos;
            let c = lx.src[lx.pos];
            let tok = match c {
                b'(' => {
                    lx.pos += 1;
                    Tok::LParen
                }
                b')' => {
                    lx.pos += 1;
                    Tok::RParen
                }
                b'=' => {
                    lx.pos += 1;
                    Tok::Eq
                }
                b'<' => {
                    lx.pos += 1;
                    Tok::Lt
                }
                b'~' => {
                    lx.pos += 1;
                    Tok::Tilde
                }
                b'.' => {
                    lx.pos += 1;
                    Tok::Dot
                }
                b'+' => {
                    lx.pos += 1;
                    Tok::Plus
                }
                b'*' => {
                    lx.pos += 1;
                    Tok::Star
                }
                b'\\' => {
                    if lx.src.get(lx.pos + 1) == Some(&b'/') {
                        lx.pos += 2;
                        Tok::Orr
                    } else {
                        return Err(err_at(start, "expected \\/"));
                    }
                }
                b'/' => {
                    if lx.src.get(lx.pos + 1) == Some(&b'\\') {
                        lx.pos += 2;
                        Tok::Andd
                    } else {
                        return Err(err_at(start, "expected /\\"));
                    }
                }
                b'-' => {
                    if lx.src.get(lx.pos + 1) == Some(&b'>') {
                        lx.pos += 2;
                        Tok::Arrow
                    } else {
                        return Err(err_at(start, "expected ->"));
                    }
                }
                b'0'..=b'9' => {
                    let mut end = lx.pos;
                    while end < lx.src.len() && lx.src[end].is_ascii_digit() {
                        end += 1;
                    }
                    let digits = std::str::from_utf8(&lx.src[lx.pos..end]).unwrap();
                    lx.pos = end;
                    Tok::Number(digits.parse::<BigUint>().unwrap())
                }
                c if c.is_ascii_alphabetic() => {
                    let mut end = lx.pos;
                    while end < lx.src.len()
                        && (lx.src[end].is_ascii_alphanumeric() || lx.src[end] == b'_')
                    {
                        end += 1;
                    }
                    let word = std::str::from_utf8(&lx.src[lx.pos..end]).unwrap().to_string();
                    lx.pos = end;
                    match word.as_str() {
                        "exists" => Tok::Exists,
                        "forall" => Tok::Forall,
                        _ => Tok::Ident(word),
                    }
                }
                _ => return Err(err_at(start, &format!("unexpected character {:?}", c as char))),
            };
            out.push((tok, start));
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
}

fn err_at(pos: usize, msg: &str) -> Error {
    Error::Parse { pos, msg: msg.to_string() }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    lang: Language,
    sugar: BTreeMap<String, u32>,
    next_sugar: u32,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.idx += 1;
            Ok(())
        } else {
            Err(err_at(self.pos(), &format!("expected {what}")))
        }
    }

    /// Resolves an identifier token to a variable, applying the sugar rules.
    fn resolve_var(&mut self, word: &str, pos: usize) -> Result<VarId> {
        let bytes = word.as_bytes();
        let head = bytes[0];
        let rest = &word[1..];
        if (head == b'x' || head == b'z') && !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            let index: u32 = rest
                .parse()
                .map_err(|_| err_at(pos, "variable index out of range"))?;
            if index == 0 {
                return Err(err_at(pos, "variable indices start at 1"));
            }
            return Ok(if head == b'x' { VarId::x(index) } else { VarId::z(index) });
        }
        if word.len() == 1 && head.is_ascii_lowercase() && head != b'z' {
            let key = word.to_string();
            if let Some(&i) = self.sugar.get(&key) {
                return Ok(VarId::x(i));
            }
            let i = self.next_sugar;
            self.next_sugar += 1;
            self.sugar.insert(key, i);
            return Ok(VarId::x(i));
        }
        if word == "z" {
            return Err(err_at(pos, "z is the reserved fresh namespace and needs an index, e.g. z1"));
        }
        Err(err_at(pos, &format!("unknown identifier {word:?}")))
    }

    fn parse_var(&mut self) -> Result<VarId> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Ident(w)) if w != "S" && w != "I" => self.resolve_var(&w, pos),
            _ => Err(err_at(pos, "expected a variable")),
        }
    }

    fn parse_factor(&mut self) -> Result<Term> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Number(n)) => {
                if n > BigUint::from(MAX_NUMERAL) {
                    return Err(err_at(pos, "numeral literal too large"));
                }
                Ok(numeral(n))
            }
            Some(Tok::Ident(w)) if w == "S" => {
                self.expect(Tok::LParen, "( after S")?;
                let inner = self.parse_term()?;
                self.expect(Tok::RParen, ") closing S(...)")?;
                Ok(Term::succ(inner))
            }
            Some(Tok::Ident(w)) => {
                if w == "I" {
                    return Err(err_at(pos, "I(...) is a formula, not a term"));
                }
                Ok(Term::var(self.resolve_var(&w, pos)?))
            }
            Some(Tok::LParen) => {
                let inner = self.parse_term()?;
                self.expect(Tok::RParen, ") closing term")?;
                Ok(inner)
            }
            _ => Err(err_at(pos, "expected a term")),
        }
    }

    fn parse_product(&mut self) -> Result<Term> {
        let mut t = self.parse_factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.idx += 1;
            let rhs = self.parse_factor()?;
            t = Term::mul(t, rhs);
        }
        Ok(t)
    }

    fn parse_term(&mut self) -> Result<Term> {
        let mut t = self.parse_product()?;
        while self.peek() == Some(&Tok::Plus) {
            self.idx += 1;
            let rhs = self.parse_product()?;
            t = Term::add(t, rhs);
        }
        Ok(t)
    }

    fn parse_atom(&mut self) -> Result<Formula> {
        // I(t) membership atom
        if let Some(Tok::Ident(w)) = self.peek() {
            if w == "I" {
                let pos = self.pos();
                self.idx += 1;
                self.expect(Tok::LParen, "( after I")?;
                let t = self.parse_term()?;
                self.expect(Tok::RParen, ") closing I(...)")?;
                if self.lang == Language::LA {
                    return Err(Error::PredicateNotInLanguage { pos });
                }
                return Ok(Formula::InI(t));
            }
        }
        let lhs = self.parse_term()?;
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Eq) => Ok(Formula::Eq(lhs, self.parse_term()?)),
            Some(Tok::Lt) => Ok(Formula::Lt(lhs, self.parse_term()?)),
            _ => Err(err_at(pos, "expected = or < after term")),
        }
    }

    fn parse_formula(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.idx += 1;
                Ok(Formula::not(self.parse_formula()?))
            }
            Some(Tok::Exists) | Some(Tok::Forall) => {
                let is_exists = self.peek() == Some(&Tok::Exists);
                self.idx += 1;
                let v = self.parse_var()?;
                let bound = if self.peek() == Some(&Tok::Lt) {
                    self.idx += 1;
                    let bpos = self.pos();
                    let b = self.parse_term()?;
                    if b.contains_var(v) {
                        return Err(err_at(bpos, &format!("bound term contains the bound variable {v}")));
                    }
                    Some(b)
                } else {
                    None
                };
                self.expect(Tok::Dot, ". after quantifier binding")?;
                let body = self.parse_formula()?;
                Ok(match (is_exists, bound) {
                    (true, None) => Formula::exists(v, body),
                    (false, None) => Formula::forall(v, body),
                    (true, Some(b)) => Formula::bdd_exists(v, b, body),
                    (false, Some(b)) => Formula::bdd_forall(v, b, body),
                })
            }
            Some(Tok::LParen) => {
                // Either a binary formula or an atom whose left term is
                // parenthesized; try the formula reading first and rewind.
                let save_idx = self.idx;
                let save_next = self.next_sugar;
                let save_sugar = self.sugar.clone();
                match self.try_binary_formula() {
                    Ok(f) => Ok(f),
                    Err(_) => {
                        self.idx = save_idx;
                        self.next_sugar = save_next;
                        self.sugar = save_sugar;
                        self.parse_atom()
                    }
                }
            }
            _ => self.parse_atom(),
        }
    }

    fn try_binary_formula(&mut self) -> Result<Formula> {
        self.expect(Tok::LParen, "(")?;
        let lhs = self.parse_formula()?;
        let pos = self.pos();
        let op = self.bump();
        if op == Some(Tok::RParen) {
            // redundant parentheses around a formula
            return Ok(lhs);
        }
        let rhs = self.parse_formula()?;
        self.expect(Tok::RParen, ") closing formula")?;
        match op {
            Some(Tok::Orr) => Ok(Formula::or(lhs, rhs)),
            Some(Tok::Andd) => Ok(Formula::and(lhs, rhs)),
            Some(Tok::Arrow) => Ok(Formula::implies(lhs, rhs)),
            _ => Err(err_at(pos, "expected \\/, /\\ or -> between formulas")),
        }
    }
}

/// Parses one formula from `text` in the given language.
pub fn parse_formula(text: &str, lang: Language) -> Result<Formula> {
    let toks = Lexer::tokenize(text)?;
    // Sugar letters start above every explicit x index in the text.
    let mut max_explicit = 0u32;
    for (t, _) in &toks {
        if let Tok::Ident(w) = t {
            if let Some(rest) = w.strip_prefix('x') {
                if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                    if let Ok(i) = rest.parse::<u32>() {
                        max_explicit = max_explicit.max(i);
                    }
                }
            }
        }
    }
    let mut p = Parser {
        toks,
        idx: 0,
        lang,
        sugar: BTreeMap::new(),
        next_sugar: max_explicit + 1,
        end: text.len(),
    };
    let f = p.parse_formula()?;
    if p.idx != p.toks.len() {
        return Err(err_at(p.pos(), "trailing input after formula"));
    }
    f.validate(lang)?;
    Ok(f)
}
