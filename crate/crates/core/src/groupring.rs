//! Words and formal sums in the generators `S` and `T`.
//!
//! `S` is the quarter turn about `y` and `T` the sixth turn about `x`. Words
//! are kept in a normal form where exponents are reduced modulo the generator
//! orders (4 and 6) and neighbouring syllables use different generators. No
//! other relations are applied.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::repgen::{rot, Axis, IrrepIndex, UnitaryOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    S,
    T,
}

impl Generator {
    pub const fn order(self) -> u8 {
        match self {
            Generator::S => 4,
            Generator::T => 6,
        }
    }

    pub const fn axis(self) -> Axis {
        match self {
            Generator::S => Axis::Y,
            Generator::T => Axis::X,
        }
    }

    pub const fn angle(self) -> f64 {
        match self {
            Generator::S => FRAC_PI_2,
            Generator::T => PI / 3.0,
        }
    }

    pub fn rotation(self, k: IrrepIndex) -> UnitaryOperator {
        rot(self.axis(), k, self.angle())
    }

    fn symbol(self) -> char {
        match self {
            Generator::S => 'S',
            Generator::T => 'T',
        }
    }
}

/// A normalized word: `(generator, exponent)` syllables, exponents in
/// `1..order`, adjacent generators distinct. Empty means the identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<(Generator, u8)>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(g: Generator, exponent: i64) -> Self {
        Word::new([(g, exponent)])
    }

    /// Normalizes an arbitrary syllable sequence.
    pub fn new(syllables: impl IntoIterator<Item = (Generator, i64)>) -> Self {
        let mut stack: Vec<(Generator, u8)> = Vec::new();
        for (g, e) in syllables {
            let order = g.order() as i64;
            let mut e = e.rem_euclid(order);
            if let Some(&(top, te)) = stack.last() {
                if top == g {
                    stack.pop();
                    e = (e + te as i64) % order;
                }
            }
            if e != 0 {
                stack.push((g, e as u8));
            }
        }
        Word(stack)
    }

    pub fn syllables(&self) -> &[(Generator, u8)] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn normalized(&self) -> Self {
        Word::new(self.0.iter().map(|&(g, e)| (g, e as i64)))
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::new(
            self.0
                .iter()
                .chain(other.0.iter())
                .map(|&(g, e)| (g, e as i64)),
        )
    }

    pub fn inverse(&self) -> Word {
        Word::new(self.0.iter().rev().map(|&(g, e)| (g, -(e as i64))))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, &(g, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if e == 1 {
                write!(f, "{}", g.symbol())?;
            } else {
                write!(f, "{}^{}", g.symbol(), e)?;
            }
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts whitespace-separated tokens such as `S`, `T^3`, `S^-1` or `1`.
    fn from_str(input: &str) -> Result<Self> {
        let fail = |reason: String| Error::WordParse {
            input: input.to_string(),
            reason,
        };
        let tokens: Vec<&str> = input
            .split(|c: char| c.is_whitespace() || c == '*' || c == '·')
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.is_empty() {
            return Err(fail("empty word; use \"1\" for the identity".into()));
        }
        let mut syllables = Vec::with_capacity(tokens.len());
        for token in tokens {
            if token == "1" {
                continue;
            }
            let (head, exponent) = match token.split_once('^') {
                Some((h, e)) => (
                    h,
                    e.parse::<i64>()
                        .map_err(|_| fail(format!("bad exponent in {token:?}")))?,
                ),
                None => (token, 1),
            };
            let g = match head {
                "S" | "s" => Generator::S,
                "T" | "t" => Generator::T,
                _ => return Err(fail(format!("unknown generator {head:?}"))),
            };
            syllables.push((g, exponent));
        }
        Ok(Word::new(syllables))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Cached powers of `S` and `T` in one irrep, for evaluating many words.
#[derive(Debug, Clone)]
pub struct WordEvaluator {
    k: IrrepIndex,
    s_powers: Vec<CMatrix>,
    t_powers: Vec<CMatrix>,
}

impl WordEvaluator {
    pub fn new(k: IrrepIndex) -> Self {
        let powers = |g: Generator| {
            let base = g.rotation(k).into_matrix();
            let mut out = vec![linalg::identity(k.dim())];
            for i in 1..g.order() as usize {
                out.push(&out[i - 1] * &base);
            }
            out
        };
        WordEvaluator {
            k,
            s_powers: powers(Generator::S),
            t_powers: powers(Generator::T),
        }
    }

    pub fn k(&self) -> IrrepIndex {
        self.k
    }

    pub fn power(&self, g: Generator, exponent: u8) -> &CMatrix {
        let table = match g {
            Generator::S => &self.s_powers,
            Generator::T => &self.t_powers,
        };
        &table[(exponent % g.order()) as usize]
    }

    /// Left-to-right product of the syllables of `w`.
    pub fn evaluate(&self, w: &Word) -> CMatrix {
        let mut syllables = w.syllables().iter();
        let Some(&(g, e)) = syllables.next() else {
            return linalg::identity(self.k.dim());
        };
        syllables.fold(self.power(g, e).clone(), |acc, &(g, e)| {
            acc * self.power(g, e)
        })
    }
}

pub fn evaluate_word(w: &Word, k: IrrepIndex) -> UnitaryOperator {
    let matrix = WordEvaluator::new(k).evaluate(w);
    UnitaryOperator::from_matrix(k, matrix).expect("evaluator returns dim×dim matrices")
}

/// Finite formal sum `Σ c_w · w` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupRingElement {
    terms: BTreeMap<Word, Rational64>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Word, Rational64)>) -> Self {
        let mut out = Self::zero();
        for (w, c) in terms {
            out.add_term(w, c);
        }
        out
    }

    pub fn add_term(&mut self, word: Word, coefficient: Rational64) {
        let word = word.normalized();
        let updated = self.coefficient(&word) + coefficient;
        if updated == Rational64::from_integer(0) {
            self.terms.remove(&word);
        } else {
            self.terms.insert(word, updated);
        }
    }

    pub fn coefficient(&self, word: &Word) -> Rational64 {
        self.terms
            .get(&word.normalized())
            .copied()
            .unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = (&Word, &Rational64)> {
        self.terms.iter()
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient_sum(&self) -> Rational64 {
        self.terms.values().sum()
    }

    pub fn scale(&self, factor: Rational64) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| (w.clone(), c * factor)))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(w, c)| (w.clone(), *c)),
        )
    }

    pub fn evaluate(&self, k: IrrepIndex) -> CMatrix {
        self.evaluate_with(&WordEvaluator::new(k))
    }

    pub fn evaluate_with(&self, evaluator: &WordEvaluator) -> CMatrix {
        let n = evaluator.k().dim();
        self.terms.iter().fold(CMatrix::zeros(n, n), |acc, (w, c)| {
            let c = *c.numer() as f64 / *c.denom() as f64;
            acc + evaluator.evaluate(w).scale(c)
        })
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}·{w}")?;
        }
        Ok(())
    }
}

/// Orientation words of the eight daughter tiles, in the fixed order
/// `1, 1, 1, S²T³, T⁴, T⁴S², S, ST³`.
pub fn daughter_words() -> [Word; 8] {
    use Generator::{S, T};
    [
        Word::identity(),
        Word::identity(),
        Word::identity(),
        Word::new([(S, 2), (T, 3)]),
        Word::new([(T, 4)]),
        Word::new([(T, 4), (S, 2)]),
        Word::new([(S, 1)]),
        Word::new([(S, 1), (T, 3)]),
    ]
}

/// The quaquaversal element: the uniform average of the daughter words.
pub fn quaquaversal_element() -> GroupRingElement {
    GroupRingElement::from_terms(
        daughter_words()
            .into_iter()
            .map(|w| (w, Rational64::new(1, 8))),
    )
}
