//! Finite group presentations and a bounded Tietze simplifier.
//!
//! Text syntax: `gens a b ; rel b3a5 ; rel b2a-3`. A relator is a sequence of
//! generator names each followed by an optional (signed) integer exponent;
//! `^` before the exponent is accepted.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

/// Maximum number of Tietze moves before abstaining.
pub const MOVE_CAP: usize = 1000;

/// A word in the generators: letter `g + 1` is generator `g`, `-(g + 1)` its
/// inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<i32>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    /// `gen^exp`.
    pub fn power(gen: usize, exp: i64) -> Self {
        let letter = if exp >= 0 { gen as i32 + 1 } else { -(gen as i32 + 1) };
        Word(vec![letter; exp.unsigned_abs() as usize])
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.push_word(other);
        w
    }

    fn push_letter(&mut self, l: i32) {
        if self.0.last() == Some(&-l) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    fn push_word(&mut self, other: &Word) {
        for &l in &other.0 {
            self.push_letter(l);
        }
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k >= 0 { self.clone() } else { self.inverse() };
        let mut w = Word::new();
        for _ in 0..k.unsigned_abs() {
            w.push_word(&base);
        }
        w
    }

    pub fn freely_reduced(&self) -> Word {
        let mut w = Word::new();
        for &l in &self.0 {
            w.push_letter(l);
        }
        w
    }

    pub fn cyclically_reduced(&self) -> Word {
        let mut w = self.freely_reduced().0;
        let mut start = 0;
        while w.len() >= start + 2 && w[start] == -w[w.len() - 1] {
            start += 1;
            w.pop();
        }
        Word(w[start..].to_vec())
    }

    /// All cyclic rotations.
    fn rotations(&self) -> impl Iterator<Item = Word> + '_ {
        (0..self.0.len().max(1)).map(move |i| {
            let mut v = self.0[i.min(self.0.len())..].to_vec();
            v.extend_from_slice(&self.0[..i.min(self.0.len())]);
            Word(v)
        })
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self, num_gens: usize) -> Vec<i64> {
        let mut v = vec![0; num_gens];
        for &l in &self.0 {
            v[l.unsigned_abs() as usize - 1] += l.signum() as i64;
        }
        v
    }

    fn occurrences(&self, gen: usize) -> usize {
        self.0.iter().filter(|l| l.unsigned_abs() as usize == gen + 1).count()
    }

    /// Replace every occurrence of `gen` by `image`.
    fn substitute(&self, gen: usize, image: &Word) -> Word {
        let mut w = Word::new();
        for &l in &self.0 {
            if l.unsigned_abs() as usize == gen + 1 {
                w.push_word(&if l > 0 { image.clone() } else { image.inverse() });
            } else {
                w.push_letter(l);
            }
        }
        w
    }

    /// Drop generator `gen` from the numbering: higher indices shift down.
    fn renumber_without(&self, gen: usize) -> Word {
        Word(
            self.0
                .iter()
                .map(|&l| {
                    let g = l.unsigned_abs() as usize - 1;
                    debug_assert_ne!(g, gen);
                    let g = if g > gen { g - 1 } else { g };
                    (g as i32 + 1) * l.signum()
                })
                .collect(),
        )
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        let mut out = String::new();
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == l {
                j += 1;
            }
            let exp = (j - i) as i64 * l.signum() as i64;
            out.push_str(&names[l.unsigned_abs() as usize - 1]);
            if exp != 1 {
                out.push_str(&exp.to_string());
            }
            i = j;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("presentation must start with `gens`")]
    MissingGens,
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("generator names must be alphabetic: `{0}`")]
    BadGeneratorName(String),
    #[error("unknown generator at `{0}`")]
    UnknownGenerator(String),
    #[error("malformed exponent in `{0}`")]
    BadExponent(String),
    #[error("unexpected clause `{0}`")]
    UnexpectedClause(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Self {
        Presentation { generators, relators }
    }

    pub fn parse(text: &str) -> Result<Self, PresentationError> {
        let mut clauses = text.split(';').map(str::trim).filter(|c| !c.is_empty());
        let head = clauses.next().ok_or(PresentationError::MissingGens)?;
        let names = head.strip_prefix("gens").ok_or(PresentationError::MissingGens)?;
        let mut generators: Vec<String> = Vec::new();
        for name in names.split_whitespace() {
            if !name.chars().all(|c| c.is_ascii_alphabetic()) {
                return Err(PresentationError::BadGeneratorName(name.into()));
            }
            if generators.iter().any(|g| g == name) {
                return Err(PresentationError::DuplicateGenerator(name.into()));
            }
            generators.push(name.into());
        }
        let mut pres = Presentation { generators, relators: Vec::new() };
        for clause in clauses {
            let body = clause.strip_prefix("rel").ok_or_else(|| PresentationError::UnexpectedClause(clause.into()))?;
            let word = pres.parse_word(body)?;
            pres.relators.push(word);
        }
        Ok(pres)
    }

    /// Parse a word over this presentation's generators.
    pub fn parse_word(&self, text: &str) -> Result<Word, PresentationError> {
        let s: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut w = Word::new();
        let mut i = 0;
        while i < s.len() {
            // Longest generator name matching here.
            let rest: String = s[i..].iter().collect();
            let gen = (0..self.generators.len())
                .filter(|&g| rest.starts_with(self.generators[g].as_str()))
                .max_by_key(|&g| self.generators[g].len())
                .ok_or_else(|| PresentationError::UnknownGenerator(rest.clone()))?;
            i += self.generators[gen].chars().count();
            if i < s.len() && s[i] == '^' {
                i += 1;
            }
            let start = i;
            if i < s.len() && (s[i] == '-' || s[i] == '+') {
                i += 1;
            }
            while i < s.len() && s[i].is_ascii_digit() {
                i += 1;
            }
            let exp_text: String = s[start..i].iter().collect();
            let exp = match exp_text.as_str() {
                "" => 1,
                "-" => -1,
                "+" => 1,
                t => t.parse::<i64>().map_err(|_| PresentationError::BadExponent(rest.clone()))?,
            };
            w.push_word(&Word::power(gen, exp));
        }
        Ok(w)
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn with_relator(&self, r: Word) -> Presentation {
        let mut p = self.clone();
        p.relators.push(r);
        p
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gens {}", self.generators.join(" "))?;
        for r in &self.relators {
            write!(f, " ; rel {}", r.display(&self.generators))?;
        }
        Ok(())
    }
}

/// Outcome of [`cyclic_reduction`]. `Cyclic(0)` is the infinite cyclic group.
/// `Unreduced` is an abstention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduction {
    Cyclic { order: BigInt, moves: usize, final_presentation: Presentation },
    Unreduced { moves: usize, final_presentation: Presentation },
}

impl Reduction {
    pub fn cyclic_order(&self) -> Option<&BigInt> {
        match self {
            Reduction::Cyclic { order, .. } => Some(order),
            Reduction::Unreduced { .. } => None,
        }
    }
}

fn normalize(p: &mut Presentation) {
    for r in &mut p.relators {
        *r = r.cyclically_reduced();
    }
    p.relators.retain(|r| !r.is_empty());
    p.relators.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.0.cmp(&b.0)));
    p.relators.dedup();
}

/// One Tietze elimination: a relator in which some generator occurs once.
fn eliminate(p: &Presentation) -> Option<Presentation> {
    for (ri, r) in p.relators.iter().enumerate() {
        for gen in 0..p.num_generators() {
            if r.occurrences(gen) != 1 {
                continue;
            }
            // Rotate so the generator comes first: g^e · w = 1, so g = w^{-e}.
            let rot = r.rotations().find(|w| w.0[0].unsigned_abs() as usize == gen + 1)?;
            let tail = Word(rot.0[1..].to_vec());
            let image = if rot.0[0] > 0 { tail.inverse() } else { tail };
            let mut generators = p.generators.clone();
            generators.remove(gen);
            let relators = p
                .relators
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != ri)
                .map(|(_, w)| w.substitute(gen, &image).renumber_without(gen))
                .collect();
            return Some(Presentation { generators, relators });
        }
    }
    None
}

/// One relator-product move: replace `r_i` by `r_i^{±1} · c` for a cyclic
/// conjugate `c` of `r_j^{±1}` when that shortens it or exposes a generator
/// occurring once.
fn combine(p: &Presentation) -> Option<Presentation> {
    let mut best: Option<(usize, usize, Word)> = None;
    for i in 0..p.relators.len() {
        for j in 0..p.relators.len() {
            if i == j {
                continue;
            }
            for x in [p.relators[i].clone(), p.relators[i].inverse()] {
                for y in [p.relators[j].clone(), p.relators[j].inverse()] {
                    for c in y.rotations() {
                        let cand = x.concat(&c).cyclically_reduced();
                        let exposes = (0..p.num_generators()).any(|g| cand.occurrences(g) == 1);
                        let score = if exposes { 0 } else { 1 };
                        if !exposes && cand.len() >= p.relators[i].len() {
                            continue;
                        }
                        let better = match &best {
                            None => true,
                            Some((s, _, w)) => (score, cand.len()) < (*s, w.len()),
                        };
                        if better {
                            best = Some((score, i, cand));
                        }
                    }
                }
            }
        }
    }
    best.map(|(_, i, w)| {
        let mut q = p.clone();
        q.relators[i] = w;
        q
    })
}

fn single_generator_order(p: &Presentation) -> BigInt {
    p.relators.iter().fold(BigInt::zero(), |acc, r| acc.gcd(&BigInt::from(r.exponent_sums(1)[0])))
}

/// Tietze-reduce towards `⟨a | aⁿ⟩`, giving up after [`MOVE_CAP`] moves.
pub fn cyclic_reduction(presentation: &Presentation) -> Reduction {
    let mut p = presentation.clone();
    let mut moves = 0;
    loop {
        normalize(&mut p);
        match p.num_generators() {
            0 => return Reduction::Cyclic { order: BigInt::from(1), moves, final_presentation: p },
            1 => {
                let order = single_generator_order(&p).abs();
                return Reduction::Cyclic { order, moves, final_presentation: p };
            }
            _ => {}
        }
        if moves >= MOVE_CAP {
            return Reduction::Unreduced { moves, final_presentation: p };
        }
        if let Some(q) = eliminate(&p) {
            p = q;
        } else if let Some(q) = combine(&p) {
            p = q;
        } else {
            return Reduction::Unreduced { moves, final_presentation: p };
        }
        moves += 1;
    }
}
